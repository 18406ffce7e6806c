"""Gas sensing piggybacked on the communication link.

Subarray pairs tuned to per-pair frequencies form a diagonal channel whose
entries carry the absorption factor exp(-K(f_n) d / 2); inverting the
magnitudes yields per-frequency absorption samples, and a nonnegative
least-squares fit onto per-gas basis spectra estimates the mixing ratios.

Linearization: the absorption coefficient also depends on the mixing ratio
through the broadening mix.  For trace gases the broadening is frozen at a
template composition, making K linear in q; an optional fixed-point
refinement re-evaluates the broadening at the estimate.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from .channel import ChannelMatrix
from .constants import C0
from .errors import IllConditionedPlanError, ThzLinkError
from .geometry import UNIT_GAIN, ArrayConfig, GainModel, antenna_gain
from .spectro.absorption import absorption_coefficient_exact
from .spectro.linelist import LineDatabase, Medium

OBS_HEADER = "pair,f_hz,d_m,re,im"


@dataclass(frozen=True)
class SensingObservation:
    """Measured per-pair complex responses at the plan frequencies."""

    pair: np.ndarray           # (n,) int pair ids
    frequency: np.ndarray      # (n,) [Hz]
    distance: np.ndarray       # (n,) [m]
    response: np.ndarray       # (n,) complex measured channel

    def __post_init__(self):
        pair = np.asarray(self.pair, dtype=int)
        freq = np.asarray(self.frequency, dtype=float)
        dist = np.asarray(self.distance, dtype=float)
        resp = np.asarray(self.response, dtype=complex)
        if not (pair.shape == freq.shape == dist.shape == resp.shape):
            raise ThzLinkError("observation arrays must share one shape")
        if np.any(freq <= 0):
            raise ThzLinkError("observation frequencies must be > 0")
        for name, value in (
            ("pair", pair), ("frequency", freq), ("distance", dist), ("response", resp)
        ):
            object.__setattr__(self, name, value)

    def __len__(self):
        return self.pair.size


@dataclass(frozen=True)
class GasEstimate:
    """Mixing-ratio estimate with residual norm and covariance proxy."""

    mixing_ratios: dict        # gas id -> q_hat
    residual: float
    covariance_proxy: dict = field(default_factory=dict)

    def __post_init__(self):
        total = 0.0
        for gas, q in self.mixing_ratios.items():
            if q < 0:
                raise ThzLinkError(f"estimated ratio for gas {gas} is negative")
            total += q
        if total > 1.0 + 1e-9:
            raise ThzLinkError(f"estimated ratios sum to {total} > 1")


def _pair_geometry(tx: ArrayConfig, rx: ArrayConfig):
    tx_centers = [tx.sa_center_world(s) for s in tx.sa_indices()]
    rx_centers = [rx.sa_center_world(s) for s in rx.sa_indices()]
    return tx_centers, rx_centers


def sensing_geometric_gains(
    tx: ArrayConfig,
    rx: ArrayConfig,
    plan,
    tx_gain: GainModel = UNIT_GAIN,
    rx_gain: GainModel = UNIT_GAIN,
):
    """Absorption-free diagonal responses (spreading, phase, antenna gains).

    Returns (gains, distances) for the symmetric pair plan; entry k links
    tx subarray k with rx subarray k at plan frequency k.
    """
    plan = np.asarray(plan, dtype=float)
    if tx.n_sa != rx.n_sa:
        raise ThzLinkError("sensing needs matching subarray counts at both ends")
    if plan.shape != (tx.n_sa,):
        raise ThzLinkError(
            f"frequency plan must list {tx.n_sa} entries, got {plan.shape}"
        )
    tx_centers, rx_centers = _pair_geometry(tx, rx)
    gains = np.zeros(tx.n_sa, dtype=complex)
    dists = np.zeros(tx.n_sa)
    for k in range(tx.n_sa):
        sep = rx_centers[k] - tx_centers[k]
        d = float(np.linalg.norm(sep))
        if d == 0:
            raise ThzLinkError(f"subarray pair {k} overlaps")
        aod = _angles_of(tx, tx_centers[k], rx_centers[k])
        aoa = _angles_of(rx, rx_centers[k], tx_centers[k])
        g = antenna_gain(tx_gain, *aod) * antenna_gain(rx_gain, *aoa)
        gains[k] = g * (C0 / (4 * np.pi * plan[k] * d)) * np.exp(
            -2j * np.pi * plan[k] * d / C0
        )
        dists[k] = d
    return gains, dists


def _angles_of(cfg: ArrayConfig, origin, target):
    v = cfg.rotation.T @ (np.asarray(target) - np.asarray(origin))
    r = np.linalg.norm(v)
    theta = np.arccos(np.clip(v[2] / r, -1.0, 1.0))
    phi = np.arctan2(v[1], v[0])
    return float(phi), float(theta)


def build_sensing_model(
    tx: ArrayConfig,
    rx: ArrayConfig,
    medium: Medium,
    db: LineDatabase,
    plan,
    tx_gain: GainModel = UNIT_GAIN,
    rx_gain: GainModel = UNIT_GAIN,
) -> ChannelMatrix:
    """Diagonal sensing channel: per-pair geometric gain times absorption."""
    plan = np.asarray(plan, dtype=float)
    gains, dists = sensing_geometric_gains(tx, rx, plan, tx_gain, rx_gain)
    diag = np.zeros(tx.n_sa, dtype=complex)
    for k in range(tx.n_sa):
        k_abs = float(absorption_coefficient_exact(plan[k], medium, db))
        diag[k] = gains[k] * np.exp(-0.5 * k_abs * dists[k])
    d_center = float(np.linalg.norm(np.asarray(rx.origin) - np.asarray(tx.origin)))
    return ChannelMatrix(
        entries=np.diag(diag), frequency=float(plan[0]), distance=d_center,
        kind="LoS",
    )


def extract_absorption(obs: SensingObservation, geometric_gains):
    """Per-frequency absorption estimates from measured magnitudes.

    K_hat = -(2 / d) ln(|h_meas| / |h_geometric|), clipped at zero with a
    flag when noise pushes the magnitude ratio above one.  Returns
    (k_hat, clipped) arrays aligned with the observations.
    """
    g = np.asarray(geometric_gains, dtype=complex)
    if g.shape != obs.response.shape:
        raise ThzLinkError("geometric gains must align with the observations")
    mag_g = np.abs(g)
    if np.any(mag_g == 0):
        raise ThzLinkError("geometric gain is zero for some observation")
    ratio = np.abs(obs.response) / mag_g
    clipped = ratio > 1.0
    k_hat = np.zeros_like(ratio)
    ok = ~clipped
    k_hat[ok] = -(2.0 / obs.distance[ok]) * np.log(ratio[ok])
    return k_hat, clipped


def gas_basis_spectra(frequencies, db: LineDatabase, template: Medium, gases):
    """Per-unit-mixing-ratio absorption spectra with template broadening.

    Column g is K evaluated with that gas's intensity factor forced to one
    while the broadening keeps the template's composition.
    """
    frequencies = np.asarray(frequencies, dtype=float)
    basis = np.zeros((frequencies.size, len(gases)))
    for col, gas in enumerate(gases):
        basis[:, col] = absorption_coefficient_exact(
            frequencies, template, db.for_gases([gas]), intensity_q={gas: 1.0}
        )
    return basis


def estimate_mixture(
    frequencies,
    k_hat,
    db: LineDatabase,
    template: Medium,
    gases=None,
    refine: int = 0,
    cond_limit: float = 1e8,
) -> GasEstimate:
    """Nonnegative least squares of absorption samples onto gas spectra.

    Needs at least as many frequencies as unknown gases and linearly
    independent basis columns on the plan; raises IllConditionedPlanError
    suggesting line-adjacent frequencies otherwise (the default limit flags
    normal equations near double-precision singularity, cond(B)^2 ~ 1e16).
    refine > 0 re-evaluates the broadening composition at the estimate
    (fixed-point rounds).
    """
    frequencies = np.asarray(frequencies, dtype=float)
    k_hat = np.asarray(k_hat, dtype=float)
    if gases is None:
        gases = [g for g, _, q in template.species if q > 0]
        gases = sorted(set(gases))
    if frequencies.size < len(gases):
        raise ThzLinkError(
            f"{len(gases)} unknowns need at least that many frequencies, "
            f"got {frequencies.size}"
        )

    work_template = template
    for round_idx in range(refine + 1):
        basis = gas_basis_spectra(frequencies, db, work_template, gases)
        cond = np.linalg.cond(basis)
        if not np.isfinite(cond) or cond > cond_limit:
            raise IllConditionedPlanError(
                "sensing plan yields singular normal equations "
                f"(condition {cond:.3g}); move frequencies nearer distinct "
                "line centers"
            )
        q_hat, rnorm = nnls(basis, k_hat, maxiter=10 * max(len(gases), 3))
        if round_idx < refine:
            species = tuple(
                (gas, 0, float(min(q, 1.0))) for gas, q in zip(gases, q_hat)
            )
            work_template = Medium(
                temperature=template.temperature,
                pressure=template.pressure,
                reference_temperature=template.reference_temperature,
                reference_pressure=template.reference_pressure,
                species=species,
            )

    normal_inv = np.linalg.pinv(basis.T @ basis)
    cov = {g: float(normal_inv[i, i]) for i, g in enumerate(gases)}
    return GasEstimate(
        mixing_ratios={g: float(q) for g, q in zip(gases, q_hat)},
        residual=float(rnorm),
        covariance_proxy=cov,
    )


def advise_frequency_plan(
    db: LineDatabase,
    template: Medium,
    gases,
    n_per_gas: int = 1,
    band=(100e9, 1.1e12),
    grid_step: float = 2e8,
    exclusion: float = 2e9,
):
    """Greedy per-gas frequency picks maximizing basis diagonal dominance.

    For each gas (ascending id) repeatedly selects the grid frequency with
    the largest own-to-other basis ratio weighted by own magnitude, keeping
    picks at least `exclusion` apart.  Deterministic.
    """
    grid = np.arange(band[0], band[1] + grid_step, grid_step)
    basis = gas_basis_spectra(grid, db, template, gases)
    total = basis.sum(axis=1)
    chosen = []
    for col, _gas in enumerate(sorted(gases)):
        own = basis[:, col]
        others = total - own
        score = own * (own / (others + 1e-30))
        order = np.argsort(score)[::-1]
        picked = 0
        for idx in order:
            f = grid[idx]
            if all(abs(f - c) >= exclusion for c in chosen):
                chosen.append(float(f))
                picked += 1
                if picked == n_per_gas:
                    break
    return sorted(chosen)


def observations_to_csv(obs: SensingObservation) -> str:
    out = [OBS_HEADER]
    for p, f, d, h in zip(obs.pair, obs.frequency, obs.distance, obs.response):
        out.append(f"{p},{f:.12g},{d:.12g},{h.real:.12g},{h.imag:.12g}")
    return "\n".join(out) + "\n"


def observations_from_csv(text) -> SensingObservation:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    stream = io.StringIO(text) if isinstance(text, str) else text
    pair, freq, dist, resp = [], [], [], []
    header_seen = False
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            if line != OBS_HEADER:
                raise ThzLinkError(f"line {lineno}: expected header '{OBS_HEADER}'")
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise ThzLinkError(f"line {lineno}: expected 5 fields")
        pair.append(int(parts[0]))
        freq.append(float(parts[1]))
        dist.append(float(parts[2]))
        resp.append(float(parts[3]) + 1j * float(parts[4]))
    return SensingObservation(
        pair=np.array(pair), frequency=np.array(freq),
        distance=np.array(dist), response=np.array(resp),
    )
