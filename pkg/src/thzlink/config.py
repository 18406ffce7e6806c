"""Scenario configuration: a single TOML document per experiment.

Unknown keys are errors (fail closed) since silent typos are the dominant
config failure mode; every violation is reported with its dotted key path.
The line list resolves in order: `linelist` key, THZLINK_LINELIST
environment variable, bundled list.
"""

from __future__ import annotations

import hashlib
import os
import pathlib

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from .errors import ConfigError
from .geometry import ArrayConfig, facing_rotation
from .spectro.absorption import bundled_linelist
from .spectro.linelist import LineDatabase, Medium, load_linelist

ENV_LINELIST = "THZLINK_LINELIST"

_ARRAY_SCHEMA = {
    "m": int,
    "n": int,
    "q": int,
    "sa_spacing_m": float,
    "ae_spacing_m": float,
    "carrier_frequency_hz": float,
}

_SCHEMA = {
    "seed": int,
    "linelist": str,
    "medium": {
        "temperature_k": float,
        "pressure_atm": float,
        "reference_temperature_k": float,
        "reference_pressure_atm": float,
        "species": list,
    },
    "tx_array": _ARRAY_SCHEMA,
    "rx_array": _ARRAY_SCHEMA,
    "pathloss": {
        "f_start_hz": float,
        "f_stop_hz": float,
        "f_step_hz": float,
        "distances_m": list,
    },
    "rayleigh": {
        "delta_start_m": float,
        "delta_stop_m": float,
        "n_delta": int,
        "frequencies_hz": list,
        "grids": list,
    },
    "rate": {
        "distance_m": float,
        "n_s": int,
        "powers_w": list,
        "noise_w": float,
        "masks": list,
    },
    "sense": {
        "frequencies_hz": list,
        "distance_m": float,
        "snr_db": float,
        "trials": int,
        "gases": list,
    },
    "impairments": {
        "eta_t": float,
        "eta_r": float,
        "avg_power_w": float,
    },
    "misalignment": {
        "a0": float,
        "w_eq_m": float,
        "radial_offset_m": float,
        "offset_sigma_m": float,
    },
}

_REQUIRED = {
    "medium": ("temperature_k", "pressure_atm", "species"),
    "tx_array": tuple(_ARRAY_SCHEMA),
    "rx_array": tuple(_ARRAY_SCHEMA),
    "pathloss": ("f_start_hz", "f_stop_hz", "f_step_hz", "distances_m"),
    "rayleigh": ("delta_start_m", "delta_stop_m", "n_delta", "frequencies_hz", "grids"),
    "rate": ("distance_m", "n_s", "powers_w", "noise_w", "masks"),
    "sense": ("frequencies_hz", "distance_m", "snr_db", "trials", "gases"),
    "impairments": ("eta_t", "eta_r", "avg_power_w"),
    "misalignment": ("a0", "w_eq_m"),
}

# blocks whose presence makes the scenario stochastic
_STOCHASTIC_BLOCKS = ("sense", "impairments")


def _check_keys(data, schema, path=""):
    for key, value in data.items():
        here = f"{path}.{key}" if path else key
        if key not in schema:
            raise ConfigError(here, "unknown key")
        expected = schema[key]
        if isinstance(expected, dict):
            if not isinstance(value, dict):
                raise ConfigError(here, "expected a table")
            _check_keys(value, expected, here)
        elif expected is float:
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError(here, f"expected a number, got {value!r}")
        elif expected is int:
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError(here, f"expected an integer, got {value!r}")
        elif expected is list:
            if not isinstance(value, list) or not value:
                raise ConfigError(here, "expected a non-empty array")
        elif expected is str:
            if not isinstance(value, str):
                raise ConfigError(here, f"expected a string, got {value!r}")


def _check_required(data):
    for block, keys in _REQUIRED.items():
        if block not in data:
            continue
        if block == "misalignment":
            ma = data[block]
            if "radial_offset_m" not in ma and "offset_sigma_m" not in ma:
                raise ConfigError(
                    "misalignment", "needs radial_offset_m or offset_sigma_m"
                )
        for key in keys:
            if key not in data[block]:
                raise ConfigError(f"{block}.{key}", "missing required key")


class ScenarioConfig:
    """Parsed and validated scenario; builds library objects on demand."""

    def __init__(self, data: dict, config_hash: str, base_dir: pathlib.Path):
        self.data = data
        self.config_hash = config_hash
        self.base_dir = base_dir
        self._db = None

    @property
    def seed(self):
        return self.data.get("seed")

    def require_seed(self):
        if self.seed is None:
            raise ConfigError(
                "seed", "required because the scenario has stochastic blocks"
            )
        return self.seed

    def linelist_path(self):
        if "linelist" in self.data:
            path = pathlib.Path(self.data["linelist"])
            if not path.is_absolute():
                path = self.base_dir / path
            return path
        env = os.environ.get(ENV_LINELIST)
        return pathlib.Path(env) if env else None

    def database(self) -> LineDatabase:
        if self._db is None:
            path = self.linelist_path()
            if path is None:
                self._db = bundled_linelist()
            else:
                if not path.exists():
                    raise ConfigError("linelist", f"file not found: {path}")
                self._db = load_linelist(path)
        return self._db

    def medium(self) -> Medium:
        m = self.data["medium"]
        species = []
        for i, entry in enumerate(m["species"]):
            if not isinstance(entry, list) or len(entry) != 3:
                raise ConfigError(
                    f"medium.species[{i}]", "expected [gas, isotope, ratio]"
                )
            species.append((int(entry[0]), int(entry[1]), float(entry[2])))
        try:
            return Medium(
                temperature=float(m["temperature_k"]),
                pressure=float(m["pressure_atm"]),
                reference_temperature=float(m.get("reference_temperature_k", 296.0)),
                reference_pressure=float(m.get("reference_pressure_atm", 1.0)),
                species=tuple(species),
            )
        except ValueError as exc:
            raise ConfigError("medium", str(exc)) from None

    def _array(self, block, origin, orientation=None) -> ArrayConfig:
        a = self.data[block]
        try:
            return ArrayConfig(
                m=a["m"],
                n=a["n"],
                q=a["q"],
                sa_spacing=float(a["sa_spacing_m"]),
                ae_spacing=float(a["ae_spacing_m"]),
                carrier_frequency=float(a["carrier_frequency_hz"]),
                origin=origin,
                orientation=orientation,
            )
        except Exception as exc:
            raise ConfigError(block, str(exc)) from None

    def tx_array(self) -> ArrayConfig:
        return self._array("tx_array", (0.0, 0.0, 0.0))

    def rx_array(self, distance: float) -> ArrayConfig:
        rot = facing_rotation((distance, 0.0, 0.0), (0.0, 0.0, 0.0))
        return self._array(
            "rx_array", (distance, 0.0, 0.0), tuple(map(tuple, rot))
        )

    def summary_lines(self):
        """Resolved parameter summary (sorted, one key per line)."""

        def walk(prefix, value):
            if isinstance(value, dict):
                for k in sorted(value):
                    yield from walk(f"{prefix}.{k}" if prefix else k, value[k])
            else:
                yield f"{prefix} = {value!r}"

        lines = [f"config_hash = {self.config_hash}"]
        path = self.linelist_path()
        lines.append(f"linelist = {str(path) if path else 'bundled'}")
        lines.extend(walk("", self.data))
        return lines


def load_scenario(path) -> ScenarioConfig:
    """Parse, hash, and validate a scenario file."""
    path = pathlib.Path(path)
    if not path.exists():
        raise ConfigError(str(path), "config file not found")
    raw = path.read_bytes()
    config_hash = hashlib.sha256(raw).hexdigest()[:16]
    try:
        data = tomllib.loads(raw.decode("utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(str(path), f"TOML parse error: {exc}") from None
    _check_keys(data, _SCHEMA)
    _check_required(data)
    cfg = ScenarioConfig(data, config_hash, path.parent)

    if any(block in data for block in _STOCHASTIC_BLOCKS):
        cfg.require_seed()
    if "pathloss" in data:
        pl = data["pathloss"]
        if pl["f_stop_hz"] < pl["f_start_hz"]:
            raise ConfigError("pathloss.f_stop_hz", "must be >= f_start_hz")
        if pl["f_step_hz"] <= 0:
            raise ConfigError("pathloss.f_step_hz", "must be > 0")
        if any(d <= 0 for d in pl["distances_m"]):
            raise ConfigError("pathloss.distances_m", "distances must be > 0")
    if "rayleigh" in data:
        ray = data["rayleigh"]
        if ray["n_delta"] < 2:
            raise ConfigError("rayleigh.n_delta", "need at least 2 grid points")
        for i, grid in enumerate(ray["grids"]):
            if (
                not isinstance(grid, list)
                or len(grid) != 2
                or any(int(g) < 1 for g in grid)
            ):
                raise ConfigError(f"rayleigh.grids[{i}]", "expected [M, N] counts")
    if "sense" in data:
        sn = data["sense"]
        if sn["trials"] < 1:
            raise ConfigError("sense.trials", "must be >= 1")
        if any(f <= 0 for f in sn["frequencies_hz"]):
            raise ConfigError("sense.frequencies_hz", "frequencies must be > 0")
    if "rate" in data:
        rt = data["rate"]
        if rt["n_s"] < 1:
            raise ConfigError("rate.n_s", "must be >= 1")
        if rt["noise_w"] <= 0:
            raise ConfigError("rate.noise_w", "must be > 0")
        known = {"fully", "fixed", "single"}
        for i, mask in enumerate(rt["masks"]):
            if not isinstance(mask, str) or mask not in known:
                raise ConfigError(
                    f"rate.masks[{i}]", f"expected one of {sorted(known)}"
                )
        if np.any(np.asarray(rt["powers_w"], dtype=float) < 0):
            raise ConfigError("rate.powers_w", "powers must be >= 0")
    return cfg
