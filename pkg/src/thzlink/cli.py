"""Experiment runner: scenario configs in, CSV result tables out.

Subcommands: pathloss, rayleigh, rate, sense, validate.  Every table file
starts with a provenance comment (version, config hash, seed) followed by
the column header; a JSON sidecar repeats the provenance.  Output bytes are
a deterministic function of (config, seed, version): diagnostics go to
stderr, never into the data files.
"""

from __future__ import annotations

import argparse
import json
import pathlib
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .channel import los_channel
from .config import ScenarioConfig, load_scenario
from .constants import C0
from .errors import ConfigError, IllConditionedPlanError, ThzLinkError
from .geometry import rayleigh_distance
from .phy import (
    build_analog_precoder,
    build_digital_precoder,
    daosa_rate,
    fixed_mask,
    full_mask,
    single_chain_mask,
)
from .sensing import (
    SensingObservation,
    build_sensing_model,
    estimate_mixture,
    extract_absorption,
    sensing_geometric_gains,
)
from .spectro.absorption import absorption_coefficient_exact

DB_PER_NEPER = 10.0 / np.log(10.0)

_MASK_BUILDERS = {
    "fully": full_mask,
    "fixed": fixed_mask,
    "single": single_chain_mask,
}


def _format_value(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def write_result_table(out_dir, name, columns, rows, cfg_hash, seed, command):
    """Write one CSV table and its provenance sidecar; returns the path."""
    out_dir = pathlib.Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{name}.csv"
    seed_txt = "none" if seed is None else str(seed)
    lines = [
        f"# thzlink {__version__} config={cfg_hash} seed={seed_txt}",
        ",".join(columns),
    ]
    for row in rows:
        lines.append(",".join(_format_value(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    sidecar = path.with_name(path.name + ".meta.json")
    meta = {
        "command": command,
        "config_hash": cfg_hash,
        "n_rows": len(rows),
        "seed": seed,
        "version": __version__,
    }
    sidecar.write_text(json.dumps(meta, sort_keys=True, indent=1) + "\n")
    return path


def _absorption_grid(grid, medium, db, threads):
    """K(f) over the grid, chunked across worker threads in grid order."""
    if threads <= 1 or grid.size < 1024:
        return absorption_coefficient_exact(grid, medium, db)
    chunks = np.array_split(grid, threads * 4)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(
            pool.map(lambda c: absorption_coefficient_exact(c, medium, db), chunks)
        )
    return np.concatenate(parts)


def cmd_pathloss(cfg: ScenarioConfig, out_dir, seed, threads) -> int:
    pl = cfg.data.get("pathloss")
    if pl is None:
        raise ConfigError("pathloss", "missing block required by this command")
    medium = cfg.medium()
    db = cfg.database()
    grid = np.arange(pl["f_start_hz"], pl["f_stop_hz"] + pl["f_step_hz"] / 2,
                     pl["f_step_hz"])
    print(
        f"pathloss: {grid.size} frequencies x {len(pl['distances_m'])} distances",
        file=sys.stderr,
    )
    k_abs = _absorption_grid(grid, medium, db, threads)
    rows = []
    for d in pl["distances_m"]:
        spreading = 20.0 * np.log10(4.0 * np.pi * grid * d / C0)
        molecular = DB_PER_NEPER * k_abs * d
        total = spreading + molecular
        for i in range(grid.size):
            rows.append((grid[i], d, spreading[i], molecular[i], total[i]))
    write_result_table(
        out_dir,
        "pathloss",
        ("f_hz", "d_m", "spreading_db", "molecular_db", "total_db"),
        rows,
        cfg.config_hash,
        seed,
        "pathloss",
    )
    return 0


def cmd_rayleigh(cfg: ScenarioConfig, out_dir, seed, threads) -> int:
    ray = cfg.data.get("rayleigh")
    if ray is None:
        raise ConfigError("rayleigh", "missing block required by this command")
    deltas = np.geomspace(ray["delta_start_m"], ray["delta_stop_m"], ray["n_delta"])
    rows = []
    for m, n in (tuple(int(v) for v in g) for g in ray["grids"]):
        for f in ray["frequencies_hz"]:
            lam = C0 / f
            for delta in deltas:
                rows.append(
                    (delta, f, m, n, lam, rayleigh_distance(m, n, delta, delta, lam))
                )
    write_result_table(
        out_dir,
        "rayleigh",
        ("delta_m", "f_hz", "m", "n", "lambda_m", "d_ray_m"),
        rows,
        cfg.config_hash,
        seed,
        "rayleigh",
    )
    return 0


def cmd_rate(cfg: ScenarioConfig, out_dir, seed, threads) -> int:
    rt = cfg.data.get("rate")
    if rt is None:
        raise ConfigError("rate", "missing block required by this command")
    medium = cfg.medium()
    db = cfg.database()
    tx = cfg.tx_array()
    rx = cfg.rx_array(rt["distance_m"])
    h = los_channel(tx, rx, medium, db, level="ae").entries
    n_s = rt["n_s"]
    noise = rt["noise_w"]
    rows = []
    for mask_id, mask_name in enumerate(rt["masks"]):
        mask = _MASK_BUILDERS[mask_name](tx.n_sa)
        p_a = build_analog_precoder(h, mask, tx.q)
        for power in rt["powers_w"]:
            p_d = build_digital_precoder(h, p_a, power, noise, n_s)
            rate = daosa_rate(h, p_a, p_d, power, noise, n_s, mask=mask, q=tx.q)
            rows.append((mask_id, n_s, power, rate))
    write_result_table(
        out_dir,
        "rate",
        ("mask_id", "n_s", "p_w", "rate_bpshz"),
        rows,
        cfg.config_hash,
        seed,
        "rate",
    )
    return 0


def cmd_sense(cfg: ScenarioConfig, out_dir, seed, threads) -> int:
    sn = cfg.data.get("sense")
    if sn is None:
        raise ConfigError("sense", "missing block required by this command")
    if seed is None:
        raise ConfigError("seed", "sense runs are stochastic and need a seed")
    medium = cfg.medium()
    db = cfg.database()
    plan = np.asarray(sn["frequencies_hz"], dtype=float)
    tx = cfg.tx_array()
    rx = cfg.rx_array(sn["distance_m"])
    if plan.size != tx.n_sa:
        raise ConfigError(
            "sense.frequencies_hz",
            f"plan must list {tx.n_sa} frequencies (one per subarray pair)",
        )
    gases = [int(g) for g in sn["gases"]]
    q_true = {g: medium.mixing_ratio(g, 0) for g in gases}
    h_true = np.diag(build_sensing_model(tx, rx, medium, db, plan).entries)
    gains, dists = sensing_geometric_gains(tx, rx, plan)
    snr = 10.0 ** (sn["snr_db"] / 10.0)
    noise_var = np.abs(h_true) ** 2 / snr

    root = np.random.SeedSequence(seed)
    estimates = {g: [] for g in gases}
    rel_errs = {g: [] for g in gases}
    residuals = []
    for child in root.spawn(sn["trials"]):
        rng = np.random.default_rng(child)
        noise = np.sqrt(noise_var / 2) * (
            rng.standard_normal(plan.size) + 1j * rng.standard_normal(plan.size)
        )
        obs = SensingObservation(
            pair=np.arange(plan.size),
            frequency=plan,
            distance=dists,
            response=h_true + noise,
        )
        k_hat, _ = extract_absorption(obs, gains)
        est = estimate_mixture(plan, k_hat, db, medium, gases=gases)
        residuals.append(est.residual)
        for g in gases:
            q = est.mixing_ratios[g]
            estimates[g].append(q)
            if q_true[g] > 0:
                rel_errs[g].append(abs(q - q_true[g]) / q_true[g])
            else:
                rel_errs[g].append(abs(q))
    rows = []
    for g in sorted(gases):
        rows.append(
            (
                g,
                q_true[g],
                float(np.median(estimates[g])),
                float(np.median(rel_errs[g])),
                float(np.median(residuals)),
            )
        )
    write_result_table(
        out_dir,
        "sense",
        ("gas", "q_true", "q_hat", "rel_err", "residual"),
        rows,
        cfg.config_hash,
        seed,
        "sense",
    )
    return 0


def cmd_validate(cfg: ScenarioConfig, out_dir, seed, threads) -> int:
    # touching every referenced object surfaces file errors and warnings
    cfg.database()
    cfg.medium()
    if "tx_array" in cfg.data:
        cfg.tx_array()
    if "rx_array" in cfg.data:
        distance = 1.0
        for block in ("rate", "sense"):
            if block in cfg.data:
                distance = cfg.data[block]["distance_m"]
        cfg.rx_array(distance)
    for line in cfg.summary_lines():
        print(line)
    return 0


_COMMANDS = {
    "pathloss": cmd_pathloss,
    "rayleigh": cmd_rayleigh,
    "rate": cmd_rate,
    "sense": cmd_sense,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thzlink",
        description="Terahertz ultra-massive-MIMO link experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", required=True, help="scenario TOML file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the scenario seed")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads for grid evaluation")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_scenario(args.config)
        seed = args.seed if args.seed is not None else cfg.seed
        return _COMMANDS[args.command](cfg, args.out, seed, max(args.threads, 1))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except IllConditionedPlanError as exc:
        print(f"{exc}", file=sys.stderr)
        return 3
    except ThzLinkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
