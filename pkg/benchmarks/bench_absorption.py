#!/usr/bin/env python3
"""Benchmark: compiled vs pure-numpy line-by-line absorption kernel.

Times the full absorption evaluation (bundled line list, standard
atmosphere) on figure-scale frequency grids and reports both backends plus
their agreement.  Run from the repository root:

    python benchmarks/bench_absorption.py
"""

import time

import numpy as np

from thzlink.kernels import lbl_numpy
from thzlink.spectro.absorption import bundled_linelist, line_parameters
from thzlink.spectro.linelist import Medium

try:
    from thzlink.kernels import _lbl_cy
except ImportError:
    _lbl_cy = None


def time_backend(fn, args, repeats=5):
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, out


def main():
    db = bundled_linelist()
    medium = Medium(
        temperature=298.15,
        pressure=1.0,
        species=((1, 0, 0.0157), (7, 0, 0.20946)),
    )
    fc, alpha, pref, tanhc, b = line_parameters(medium, db)

    print(f"{len(db)} lines, backends: numpy"
          + (", compiled" if _lbl_cy else " (compiled kernel missing)"))
    header = f"{'grid points':>12} {'numpy [ms]':>12} {'compiled [ms]':>14} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for step, lo, hi in ((1e8, 0.1e12, 1.0e12),
                         (1e7, 0.1e12, 1.0e12),
                         (1e6, 0.1e12, 1.0e12)):
        grid = np.arange(lo, hi + step / 2, step)
        args = (grid, fc, alpha, pref, tanhc, b, 2e12)
        t_np, out_np = time_backend(lbl_numpy.lbl_sum, args)
        if _lbl_cy is None:
            print(f"{grid.size:>12} {t_np * 1e3:>12.2f} {'-':>14} {'-':>8}")
            continue
        t_cy, out_cy = time_backend(_lbl_cy.lbl_sum, args)
        worst = np.max(np.abs(out_np - out_cy) / np.maximum(np.abs(out_np), 1e-300))
        print(f"{grid.size:>12} {t_np * 1e3:>12.2f} {t_cy * 1e3:>14.2f} "
              f"{t_np / t_cy:>7.1f}x")
        assert worst < 1e-12, f"backend mismatch: {worst}"
    print("backends agree to < 1e-12 relative")


if __name__ == "__main__":
    main()
