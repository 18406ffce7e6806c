"""Closed-form approximation of the absorption coefficient.

Two models with the same shape: water-vapor lines as Lorentzian terms whose
numerator/denominator are polynomial functions of the water volume mixing
ratio v, evaluated against the wavenumber f/(100 c), a fixed oxygen term,
and a cubic polynomial in f absorbing the smooth background:

    K(f, v) = sum_l A_l(v) / (B_l(v) + (f/(100 c) - x_l)^2)  +  K3(f)
    A_l(v)  = kappa_l * v * (w_air_l + v (w_self_l - w_air_l))
    B_l(v)  = (w_air_l + v (w_self_l - w_air_l))^2

The '275-400' model keeps only the two in-band water lines; the extended
'100-450' model adds the remaining sub-450 GHz spikes.  Coefficients are
pinned in _approx_coeffs.py and regenerated from the bundled line list by
tools/calibrate_absorption_approx.py; the cubic is fitted at the reference
humidity v = 0.0157 (50% RH at 298.15 K), so background accuracy degrades
away from that composition.
"""

from __future__ import annotations

import numpy as np

from ..constants import C0
from ..errors import OutOfBandError
from ._approx_coeffs import COEFFS

BAND_LIMITS = {
    "100-450": (100e9, 450e9),
    "275-400": (275e9, 400e9),
}


def absorption_coefficient_approx(f, water_mixing_ratio, band="100-450", force=False):
    """Approximate per-meter absorption K1 + K2 + K3 at standard atmosphere.

    f is a scalar or array [Hz]; water_mixing_ratio is the water volume
    mixing ratio in [0, 1].  Frequencies outside the model band raise
    OutOfBandError unless force=True.
    """
    v = float(water_mixing_ratio)
    if not 0.0 <= v <= 1.0:
        raise ValueError("water mixing ratio must be in [0, 1]")
    if band not in BAND_LIMITS:
        raise ValueError(f"unknown band '{band}'; choose from {sorted(BAND_LIMITS)}")
    f_arr = np.atleast_1d(np.asarray(f, dtype=np.float64))
    lo, hi = BAND_LIMITS[band]
    if not force and (np.any(f_arr < lo) or np.any(f_arr > hi)):
        raise OutOfBandError(
            f"frequency outside the {band} GHz validity band; "
            "pass force=True to evaluate anyway"
        )

    coeffs = COEFFS[band]
    x = f_arr / (100.0 * C0)  # wavenumber [cm^-1]
    out = np.zeros_like(f_arr)
    for center, kappa, w_air, w_self in coeffs["water_terms"]:
        width = w_air + v * (w_self - w_air)
        out += kappa * v * width / (width**2 + (x - center) ** 2)
    for center, a_num, b_den in coeffs["fixed_terms"]:
        out += a_num / (b_den + (x - center) ** 2)
    rho1, rho2, rho3, rho4 = coeffs["cubic"]
    out += ((rho1 * f_arr + rho2) * f_arr + rho3) * f_arr + rho4
    out = np.maximum(out, 0.0)
    return float(out[0]) if np.ndim(f) == 0 else out
