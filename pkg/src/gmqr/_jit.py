"""Numba switch.

Set ``GMQR_DISABLE_JIT=1`` to run every kernel through its pure-numpy path
(useful for debugging and for platforms without numba).
"""
import os

_FLAG = os.environ.get("GMQR_DISABLE_JIT", "").strip().lower()
JIT_REQUESTED = _FLAG not in ("1", "true", "yes", "on")

try:
    from numba import njit as _numba_njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

USE_NUMBA = JIT_REQUESTED and HAVE_NUMBA


def njit(func=None, **kwargs):
    """``numba.njit`` when numba is importable, identity decorator otherwise.

    Kernels are always compiled when numba exists so the benchmark can compare
    both paths in one process; ``USE_NUMBA`` only decides which path the
    library dispatches to.
    """
    if HAVE_NUMBA:
        kwargs.setdefault("cache", True)
        if func is not None:
            return _numba_njit(**kwargs)(func)
        return _numba_njit(**kwargs)

    if func is not None:
        return func

    def wrapper(f):
        return f

    return wrapper
