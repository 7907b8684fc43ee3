"""Select between numba-compiled kernels and the plain numpy/Python path.

Set ``COMPACT_AVL_BACKEND=numpy`` (or ``NUMBA_DISABLE_JIT=1``) before import
to run every kernel interpreted. The choice is fixed at import time.
"""
from __future__ import annotations

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency
    numba = None

_requested = os.environ.get("COMPACT_AVL_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"COMPACT_AVL_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

USE_NUMBA = (
    numba is not None
    and _requested == "numba"
    and os.environ.get("NUMBA_DISABLE_JIT", "0") in ("", "0")
)
BACKEND = "numba" if USE_NUMBA else "numpy"


def jit(func):
    """``numba.njit(cache=True)`` when the numba backend is active, else identity."""
    if USE_NUMBA:
        return numba.njit(cache=True)(func)
    return func
