"""Molecular absorption coefficient and absorption noise.

The exact coefficient sums Lorentzian contributions of every (gas, isotope)
line: a pressure-shifted center, pressure/temperature-scaled broadening that
mixes air and self widths by the mixing ratio, a tanh temperature factor,
and a negative-frequency mirror term.  The summation itself runs in the
selected kernel backend (compiled or numpy).
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from ..constants import CONSTANTS
from ..errors import ThzLinkError
from ..kernels import lbl_sum
from .linelist import LineDatabase, Medium, parse_linelist

ATM_PA = 101325.0         # 1 atm in pascal
DEFAULT_LINE_CUTOFF_HZ = 2e12


def bundled_linelist() -> LineDatabase:
    """The curated line list shipped with the package."""
    text = (
        resources.files("thzlink.spectro").joinpath("data/thz_lines.csv").read_text()
    )
    return parse_linelist(text, source_label="bundled:thz_lines.csv")


def line_parameters(medium: Medium, db: LineDatabase, intensity_q=None):
    """Reduce (medium, database) to the flat per-line kernel arrays.

    Returns (fc, alpha, pref, tanhc, b) where fc is the shifted center,
    alpha the scaled broadening half width, pref the line prefactor and
    tanhc the tanh factor at the center; b scales the tanh argument.

    intensity_q optionally overrides, per gas id, the mixing ratio used in
    the intensity prefactor only (broadening keeps the medium's ratio);
    the gas-sensing module uses this to build per-unit-ratio basis spectra.
    """
    c = CONSTANTS
    t = medium.temperature
    p_ratio = medium.pressure / medium.reference_pressure
    t_ratio = medium.reference_temperature / t
    number_density = (medium.pressure * ATM_PA) / (c.r_gas * t) * c.n_a  # [1/m^3]
    b = c.h * c.c0 / (2.0 * c.k_b * t)

    fc, alpha, pref = [], [], []
    for line in db.lines:
        q = medium.mixing_ratio(line.gas_id, line.isotope_id)
        q_int = q
        if intensity_q is not None and line.gas_id in intensity_q:
            q_int = intensity_q[line.gas_id]
        if q_int == 0.0:
            continue
        center = line.fc0_hz + line.delta_hz * p_ratio
        width = (
            ((1.0 - q) * line.alpha_air_hz + q * line.alpha_gas_hz)
            * p_ratio
            * t_ratio**line.gamma
        )
        fc.append(center)
        alpha.append(width)
        pref.append(
            p_ratio * (c.t_stp / t) * number_density * q_int * line.intensity
        )
    fc = np.asarray(fc, dtype=np.float64)
    alpha = np.asarray(alpha, dtype=np.float64)
    pref = np.asarray(pref, dtype=np.float64)
    tanhc = np.tanh(b * fc)
    return fc, alpha, pref, tanhc, b


def absorption_coefficient_exact(
    f,
    medium: Medium,
    db: LineDatabase,
    cutoff_hz: float = DEFAULT_LINE_CUTOFF_HZ,
    intensity_q=None,
):
    """Per-meter absorption coefficient K(f) from the line-by-line sum.

    f may be a scalar or an array [Hz]; lines whose shifted center lies more
    than cutoff_hz from the query frequency are skipped.  A non-finite
    result signals a unit mismatch in the line list and raises.
    """
    f_arr = np.atleast_1d(np.asarray(f, dtype=np.float64))
    if np.any(f_arr <= 0):
        raise ValueError("frequencies must be > 0")
    fc, alpha, pref, tanhc, b = line_parameters(medium, db, intensity_q=intensity_q)
    out = lbl_sum(np.ascontiguousarray(f_arr), fc, alpha, pref, tanhc, b, cutoff_hz)
    if not np.all(np.isfinite(out)):
        raise ThzLinkError(
            "non-finite absorption coefficient; check line-list units"
        )
    return out[0] if np.isscalar(f) or np.ndim(f) == 0 else out


def molecular_noise_temperature(f, d: float, medium: Medium, db: LineDatabase):
    """Absorption-induced antenna temperature T0 (1 - exp(-K(f) d)) [K]."""
    if d < 0:
        raise ValueError("distance must be >= 0")
    k = absorption_coefficient_exact(f, medium, db)
    return medium.reference_temperature * (1.0 - np.exp(-k * d))


def total_noise_power(
    band,
    d: float,
    system_temperature: float,
    medium: Medium,
    db: LineDatabase,
    grid_step_hz: float = 1e6,
):
    """Integrated noise power K_B * int_B (T_sys + T_mol(f, d)) df [W].

    Trapezoidal quadrature on a uniform grid (default 1 MHz step); the
    integrand is smooth between lines so uniform sampling suffices.
    """
    f_lo, f_hi = band
    if f_hi < f_lo:
        raise ValueError("band must satisfy f_hi >= f_lo")
    if f_hi == f_lo:
        return 0.0
    n = max(int(np.ceil((f_hi - f_lo) / grid_step_hz)) + 1, 2)
    grid = np.linspace(f_lo, f_hi, n)
    t_noise = system_temperature + molecular_noise_temperature(grid, d, medium, db)
    return CONSTANTS.k_b * float(np.trapezoid(t_noise, grid))
