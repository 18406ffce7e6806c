#!/usr/bin/env python3
"""Regenerate the pinned coefficients of the approximate absorption model.

Derives the Lorentzian term constants analytically from the bundled line
list at standard atmosphere (298.15 K, 1 atm) and fits the residual cubic
at the reference humidity v = 0.0157.  Writes
src/thzlink/spectro/_approx_coeffs.py.

Run from the repository root:  python tools/calibrate_absorption_approx.py
"""

import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from thzlink.constants import CONSTANTS  # noqa: E402
from thzlink.spectro.absorption import (  # noqa: E402
    ATM_PA,
    absorption_coefficient_exact,
    bundled_linelist,
)
from thzlink.spectro.linelist import Medium  # noqa: E402

T_CAL = 298.15      # calibration temperature [K]
P_CAL = 1.0         # calibration pressure [atm]
V_REF = 0.0157      # reference water mixing ratio (50% RH at 298.15 K)
Q_O2 = 0.20946

H2O_GAS = 1
O2_GAS = 7

# modeled spikes per band, by line center [GHz]
WATER_LINES = {
    "100-450": [183.3101, 325.1529, 380.1974, 439.1508, 448.0011],
    "275-400": [325.1529, 380.1974],
}
O2_LINES = {
    "100-450": [118.7503, 368.4984, 424.763],
    "275-400": [368.4984],
}
FIT_GRID_STEP = 5e7


def _term_constants(db):
    """Per-line (center_cm, kappa, w_air_cm, w_self_cm) and fixed O2 terms."""
    c = CONSTANTS
    cm = 100.0 * c.c0
    t_ratio = 296.0 / T_CAL
    n_tot = (P_CAL * ATM_PA) / (c.r_gas * T_CAL) * c.n_a
    base = (c.t_stp / T_CAL) * n_tot / (np.pi * cm)

    water, o2 = {}, {}
    for line in db.lines:
        xc = (line.fc0_hz + line.delta_hz) / cm
        scale_t = t_ratio**line.gamma
        w_air = line.alpha_air_hz / cm * scale_t
        w_self = line.alpha_gas_hz / cm * scale_t
        if line.gas_id == H2O_GAS and line.isotope_id == 1:
            kappa = base * line.intensity
            water[round(line.fc0_hz / 1e9, 4)] = (xc, kappa, w_air, w_self)
        elif line.gas_id == O2_GAS:
            width = ((1 - Q_O2) * w_air + Q_O2 * w_self)
            a_num = base * Q_O2 * line.intensity * width
            o2[round(line.fc0_hz / 1e9, 4)] = (xc, a_num, width**2)
    return water, o2


def _model_terms(f, v, water_terms, fixed_terms):
    x = f / (100.0 * CONSTANTS.c0)
    out = np.zeros_like(f)
    for center, kappa, w_air, w_self in water_terms:
        width = w_air + v * (w_self - w_air)
        out += kappa * v * width / (width**2 + (x - center) ** 2)
    for center, a_num, b_den in fixed_terms:
        out += a_num / (b_den + (x - center) ** 2)
    return out


def calibrate():
    db = bundled_linelist()
    water_all, o2_all = _term_constants(db)
    medium = Medium(
        temperature=T_CAL,
        pressure=P_CAL,
        species=((H2O_GAS, 0, V_REF), (O2_GAS, 0, Q_O2)),
    )

    coeffs = {}
    for band, (lo, hi) in (("100-450", (100e9, 450e9)), ("275-400", (275e9, 400e9))):
        water_terms = [water_all[g] for g in WATER_LINES[band]]
        fixed_terms = [o2_all[g] for g in O2_LINES[band]]
        grid = np.arange(lo, hi + FIT_GRID_STEP, FIT_GRID_STEP)
        exact = absorption_coefficient_exact(grid, medium, db)
        residual = exact - _model_terms(grid, V_REF, water_terms, fixed_terms)
        # fit on THz scale for conditioning, then convert to per-Hz powers
        poly_thz = np.polyfit(grid / 1e12, residual, 3)
        cubic = tuple(float(c) / 1e12 ** (3 - i) for i, c in enumerate(poly_thz))
        coeffs[band] = {
            "water_terms": [tuple(map(float, t)) for t in water_terms],
            "fixed_terms": [tuple(map(float, t)) for t in fixed_terms],
            "cubic": cubic,
        }
        fit = residual - np.polyval(poly_thz, grid / 1e12)
        k3 = np.polyval(poly_thz, grid / 1e12)
        print(
            f"{band}: cubic residual rms {np.sqrt(np.mean(fit**2)):.3e} 1/m, "
            f"min K3 {k3.min():.3e}, max |dev@1km| "
            f"{np.max(np.abs(fit)) * 4342.94:.2f} dB"
        )
    return coeffs


def main():
    coeffs = calibrate()
    target = (
        pathlib.Path(__file__).resolve().parents[1]
        / "src/thzlink/spectro/_approx_coeffs.py"
    )
    lines = [
        '"""Pinned approximate-model coefficients.',
        "",
        "Generated by tools/calibrate_absorption_approx.py from the bundled",
        "line list; do not edit by hand.",
        '"""',
        "",
        "COEFFS = {",
    ]
    for band, c in coeffs.items():
        lines.append(f'    "{band}": {{')
        lines.append('        "water_terms": [')
        for t in c["water_terms"]:
            lines.append(f"            {t!r},")
        lines.append("        ],")
        lines.append('        "fixed_terms": [')
        for t in c["fixed_terms"]:
            lines.append(f"            {t!r},")
        lines.append("        ],")
        lines.append(f'        "cubic": {c["cubic"]!r},')
        lines.append("    },")
    lines.append("}")
    target.write_text("\n".join(lines) + "\n")
    print(f"wrote {target}")


if __name__ == "__main__":
    main()
