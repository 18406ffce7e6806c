"""Kernel backend selection.

The line-by-line absorption sum dominates runtime on dense frequency grids,
so it is offered as a compiled Cython extension with a numpy fallback.  The
backend is picked once at import:

  * THZLINK_KERNEL=python    force the numpy implementation
  * THZLINK_KERNEL=compiled  require the extension (ImportError if missing)
  * unset                    compiled if available, numpy otherwise

Both backends implement the same `lbl_sum` contract and agree to roundoff;
benchmarks/bench_absorption.py compares them.
"""

import os

from . import lbl_numpy

_choice = os.environ.get("THZLINK_KERNEL", "").strip().lower()

if _choice == "python":
    _impl = lbl_numpy
    BACKEND = "python"
elif _choice == "compiled":
    from . import _lbl_cy as _impl  # noqa: F401

    BACKEND = "compiled"
else:
    try:
        from . import _lbl_cy as _impl  # noqa: F401

        BACKEND = "compiled"
    except ImportError:
        _impl = lbl_numpy
        BACKEND = "python"

lbl_sum = _impl.lbl_sum


def backend_name() -> str:
    """Name of the active kernel backend ('compiled' or 'python')."""
    return BACKEND
