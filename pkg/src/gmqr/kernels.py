"""Elementwise first-derivative kernels, the hot loop of every fit.

Each kernel maps a residual array ``u`` to the loss derivative evaluated
elementwise, with a uniform signature ``kernel(u, tau, shape, k)`` so the
optimizer can swap loss families freely. Two implementations exist per
family: a numba loop and a pure-numpy expression. ``USE_NUMBA`` (see
``_jit``) decides which one :func:`get_kernel` hands out by default.
"""
import math

import numpy as np
from scipy import special

from ._jit import HAVE_NUMBA, USE_NUMBA, njit

_SQRT2 = math.sqrt(2.0)

FAMILIES = (
    "gmq",
    "conquer_gaussian",
    "conquer_logistic",
    "expectile",
    "smooth_als",
    "kth_power",
    "smooth_kth_power",
)


# ---------------------------------------------------------------- numpy path

def _np_gmq(u, tau, c, k):
    return 0.5 * (2.0 * tau - 1.0) + 0.5 * u / np.hypot(c, u)


def _np_conquer_gaussian(u, tau, h, k):
    return tau - special.ndtr(-u / h)


def _np_conquer_logistic(u, tau, h, k):
    return tau - special.expit(-u / h)


def _np_expectile(u, tau, c, k):
    return 2.0 * u * np.where(u >= 0.0, tau, 1.0 - tau)


def _np_smooth_als(u, tau, c, k):
    return u + (2.0 * tau - 1.0) * np.hypot(c, u)


def _np_kth_power(u, tau, c, k):
    a = np.abs(u)
    return k * a ** (k - 1.0) * np.where(u >= 0.0, tau, tau - 1.0)


def _np_smooth_kth_power(u, tau, c, k):
    a = np.abs(u)
    ak1 = a ** (k - 1.0)
    ak = ak1 * a
    ratio = np.sign(u) * ak / np.hypot(c, ak)
    return 0.5 * k * ak1 * ((2.0 * tau - 1.0) + ratio)


# ---------------------------------------------------------------- numba path

@njit
def _nb_gmq(u, tau, c, k):
    out = np.empty_like(u)
    a = 0.5 * (2.0 * tau - 1.0)
    for i in range(u.shape[0]):
        x = u[i]
        out[i] = a + 0.5 * x / math.hypot(c, x)
    return out


@njit
def _nb_conquer_gaussian(u, tau, h, k):
    out = np.empty_like(u)
    s = 1.0 / (h * _SQRT2)
    for i in range(u.shape[0]):
        # Phi(-x) = erfc(x / sqrt 2) / 2
        out[i] = tau - 0.5 * math.erfc(u[i] * s)
    return out


@njit
def _nb_conquer_logistic(u, tau, h, k):
    out = np.empty_like(u)
    for i in range(u.shape[0]):
        z = u[i] / h
        if z >= 0.0:
            e = math.exp(-z)
            out[i] = tau - e / (1.0 + e)
        else:
            out[i] = tau - 1.0 / (1.0 + math.exp(z))
    return out


@njit
def _nb_expectile(u, tau, c, k):
    out = np.empty_like(u)
    for i in range(u.shape[0]):
        x = u[i]
        out[i] = 2.0 * x * (tau if x >= 0.0 else 1.0 - tau)
    return out


@njit
def _nb_smooth_als(u, tau, c, k):
    out = np.empty_like(u)
    a = 2.0 * tau - 1.0
    for i in range(u.shape[0]):
        x = u[i]
        out[i] = x + a * math.hypot(c, x)
    return out


@njit
def _nb_kth_power(u, tau, c, k):
    out = np.empty_like(u)
    for i in range(u.shape[0]):
        x = u[i]
        w = tau if x >= 0.0 else tau - 1.0
        out[i] = k * abs(x) ** (k - 1.0) * w
    return out


@njit
def _nb_smooth_kth_power(u, tau, c, k):
    out = np.empty_like(u)
    a = 2.0 * tau - 1.0
    for i in range(u.shape[0]):
        x = u[i]
        ax = abs(x)
        if ax == 0.0:
            out[i] = 0.0
            continue
        ak1 = ax ** (k - 1.0)
        ak = ak1 * ax
        r = ak / math.hypot(c, ak)
        if x < 0.0:
            r = -r
        out[i] = 0.5 * k * ak1 * (a + r)
    return out


NUMPY_KERNELS = {name: globals()["_np_" + name] for name in FAMILIES}
NUMBA_KERNELS = {name: globals()["_nb_" + name] for name in FAMILIES} if HAVE_NUMBA else {}


def available_backends():
    return ("numba", "numpy") if HAVE_NUMBA else ("numpy",)


def default_backend():
    return "numba" if USE_NUMBA else "numpy"


def get_kernel(family, backend=None):
    """Return the derivative kernel for ``family`` on ``backend``.

    ``backend`` is ``"numba"``, ``"numpy"`` or ``None`` (the process default).
    """
    if family not in FAMILIES:
        raise KeyError(f"no derivative kernel for family {family!r}")
    backend = backend or default_backend()
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is not installed")
        return NUMBA_KERNELS[family]
    if backend == "numpy":
        return NUMPY_KERNELS[family]
    raise ValueError(f"unknown backend {backend!r}")


def warmup():
    """Compile every numba kernel once (no-op without numba)."""
    u = np.linspace(-1.0, 1.0, 8)
    for kernel in NUMBA_KERNELS.values():
        kernel(u, 0.5, 0.1, 1.5)
