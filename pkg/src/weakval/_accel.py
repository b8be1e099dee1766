"""Optional numba acceleration.

Kernels are written once as plain loops. When numba is importable they are
compiled with ``njit``; setting ``WEAKVAL_DISABLE_NUMBA=1`` selects the
vectorized numpy implementations instead. Both paths compare the same
uniforms against the same thresholds, so their counts are identical.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

HAVE_NUMBA = numba is not None
DISABLED = os.environ.get("WEAKVAL_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}
USE_NUMBA = HAVE_NUMBA and not DISABLED


def optional_njit(func):
    if HAVE_NUMBA:
        return numba.njit(nogil=True, cache=False)(func)
    return func
