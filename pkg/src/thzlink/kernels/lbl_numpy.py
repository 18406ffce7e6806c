"""Pure-numpy line-by-line summation kernel (fallback backend).

Same contract as the compiled kernel in _lbl_cy.pyx: given per-line
parameters already reduced to SI scalars, accumulate the Lorentzian line
terms (including the negative-frequency mirror) over a frequency grid.
"""

import numpy as np


def lbl_sum(f, fc, alpha, pref, tanhc, b, cutoff):
    """Accumulate per-meter absorption over the grid `f`.

    f      : (n,) query frequencies [Hz]
    fc     : (m,) pressure-shifted line centers [Hz]
    alpha  : (m,) pressure/temperature-scaled broadening half widths [Hz]
    pref   : (m,) per-line prefactor [Hz m^-1], carries number density,
             mixing ratio and line intensity
    tanhc  : (m,) tanh factor evaluated at each line center
    b      : scalar argument scale of the tanh temperature factor [1/Hz]
    cutoff : lines farther than this from the query frequency are skipped [Hz]
    """
    f = np.asarray(f, dtype=np.float64)
    out = np.zeros_like(f)
    if fc.size == 0:
        return out
    tanh_f = np.tanh(b * f)
    for j in range(fc.size):
        mask = np.abs(f - fc[j]) <= cutoff
        if not mask.any():
            continue
        fm = f[mask]
        shape = 1.0 / ((fm - fc[j]) ** 2 + alpha[j] ** 2)
        shape += 1.0 / ((fm + fc[j]) ** 2 + alpha[j] ** 2)
        ratio = fm / fc[j]
        out[mask] += (
            pref[j]
            * ratio
            * (tanh_f[mask] / tanhc[j])
            * (alpha[j] / np.pi)
            * ratio
            * shape
        )
    return out
