# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled line-by-line summation kernel (hot path).

Mirrors thzlink.kernels.lbl_numpy.lbl_sum; see that module for the
parameter contract.  The double loop releases the GIL.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, tanh

cnp.import_array()


def lbl_sum(double[::1] f, double[::1] fc, double[::1] alpha,
            double[::1] pref, double[::1] tanhc, double b, double cutoff):
    cdef Py_ssize_t n = f.shape[0]
    cdef Py_ssize_t m = fc.shape[0]
    out_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double fi, tf, df, ratio, shape, pi = 3.14159265358979323846

    with nogil:
        for i in range(n):
            fi = f[i]
            tf = tanh(b * fi)
            for j in range(m):
                df = fi - fc[j]
                if fabs(df) > cutoff:
                    continue
                ratio = fi / fc[j]
                shape = 1.0 / (df * df + alpha[j] * alpha[j])
                shape = shape + 1.0 / ((fi + fc[j]) * (fi + fc[j])
                                       + alpha[j] * alpha[j])
                out[i] = out[i] + (pref[j] * ratio * (tf / tanhc[j])
                                   * (alpha[j] / pi) * ratio * shape)
    return out_arr
