"""Numba switch.

Set ``DISTGEO_DISABLE_NUMBA=1`` to route every hot kernel through the
vectorized numpy fallback instead of the compiled loops.
"""
import os

DISABLED = os.environ.get("DISTGEO_DISABLE_NUMBA", "0").lower() in ("1", "true", "yes")

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

USE_NUMBA = numba is not None and not DISABLED


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise an identity decorator."""
    if numba is not None:
        return numba.njit(*args, cache=True, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn
