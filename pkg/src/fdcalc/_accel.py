"""Numba availability and the environment switch that disables it.

Set ``FDCALC_DISABLE_NUMBA=1`` to force the pure-numpy kernels.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

ENV_FLAG = "FDCALC_DISABLE_NUMBA"

NUMBA_AVAILABLE = numba is not None
NUMBA_DISABLED = os.environ.get(ENV_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}
USE_NUMBA = NUMBA_AVAILABLE and not NUMBA_DISABLED


def njit(fn):
    if numba is None:
        return fn
    return numba.njit(cache=True)(fn)
