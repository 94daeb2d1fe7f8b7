"""Loss families for quantile-type regression and their closed-form derivatives.

Every function accepts a scalar or an array of residuals ``u`` and returns a
float or an ndarray of matching shape. Radicals ``sqrt(c**2 + u**2)`` are
evaluated with ``hypot`` so residuals near the float range do not overflow.
"""
import enum
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import special

from . import kernels
from .errors import DomainError, ParameterError

__all__ = [
    "Family",
    "Kernel",
    "LossSpec",
    "check_loss",
    "gmq_loss",
    "gmq_grad",
    "gmq_hess",
    "smoothing_gap_bound",
    "expectile_loss",
    "expectile_grad",
    "smooth_expectile_loss",
    "smooth_expectile_grad",
    "smooth_als_loss",
    "smooth_als_grad",
    "smooth_als_hess",
    "kth_power_loss",
    "kth_power_grad",
    "smooth_kth_power_loss",
    "smooth_kth_power_grad",
    "smooth_kth_power_hess",
    "conquer_loss",
    "conquer_grad",
    "conquer_hess",
]


def _arr(u):
    return np.asarray(u, dtype=np.float64)


def _ret(x, like):
    if np.ndim(like) == 0:
        return float(x)
    return x


def _check_tau(tau):
    if not 0.0 < tau < 1.0:
        raise ParameterError(f"tau must lie in (0, 1), got {tau}")


def _check_shape(c, name="c", strict=False):
    if not np.isfinite(c) or c < 0.0 or (strict and c == 0.0):
        bound = "> 0" if strict else ">= 0"
        raise ParameterError(f"{name} must be finite and {bound}, got {c}")


def _check_k(k):
    if not 1.0 < k <= 2.0:
        raise ParameterError(f"k must lie in (1, 2], got {k}")


# ------------------------------------------------------------- check / GMQ

def check_loss(u, tau):
    """Quantile check loss ``u * (tau - 1[u < 0])``."""
    _check_tau(tau)
    x = _arr(u)
    return _ret(x * (tau - (x < 0.0)), u)


def gmq_loss(u, tau, c):
    """Generalized multiquadric loss ``((2 tau - 1) u + sqrt(c^2 + u^2)) / 2``.

    Upper branch of the hyperbola whose asymptotes are ``tau * u`` and
    ``(tau - 1) * u``; equals :func:`check_loss` when ``c == 0``.
    """
    _check_tau(tau)
    _check_shape(c)
    x = _arr(u)
    return _ret(0.5 * ((2.0 * tau - 1.0) * x + np.hypot(c, x)), u)


def gmq_grad(u, tau, c):
    _check_tau(tau)
    _check_shape(c)
    x = _arr(u)
    if c == 0.0 and np.any(x == 0.0):
        raise DomainError("GMQ derivative with c = 0 is undefined at u = 0")
    return _ret(0.5 * (2.0 * tau - 1.0) + 0.5 * x / np.hypot(c, x), u)


def gmq_hess(u, tau, c):
    """Second derivative ``c^2 / (2 (c^2 + u^2)^(3/2))``; independent of tau."""
    _check_tau(tau)
    _check_shape(c, strict=True)
    x = _arr(u)
    r = np.hypot(c, x)
    return _ret(0.5 * (c / r) ** 2 / r, u)


def smoothing_gap_bound(u, c):
    """Upper bound on ``gmq_loss - check_loss``: c/2 inside |u| <= c, c^2/(2|u|) outside."""
    _check_shape(c, strict=True)
    a = np.abs(_arr(u))
    inside = a <= c
    with np.errstate(divide="ignore"):
        out = np.where(inside, 0.5 * c, c * c / (2.0 * np.where(inside, 1.0, a)))
    return _ret(out, u)


# ------------------------------------------------------------- expectile

def expectile_loss(u, tau):
    """Asymmetric squared loss: ``tau u^2`` for u >= 0, ``(1 - tau) u^2`` otherwise."""
    _check_tau(tau)
    x = _arr(u)
    return _ret(np.where(x >= 0.0, tau, 1.0 - tau) * x * x, u)


def expectile_grad(u, tau):
    _check_tau(tau)
    x = _arr(u)
    return _ret(2.0 * x * np.where(x >= 0.0, tau, 1.0 - tau), u)


def smooth_expectile_loss(u, tau, c):
    """Antiderivative of ``2 * gmq_loss`` that vanishes at zero.

    ``(2 tau - 1) u^2 / 2 + (u sqrt(c^2 + u^2) + c^2 asinh(u / c)) / 2``, where
    ``c^2 asinh(u/c) = c^2 ln|u + sqrt(c^2 + u^2)| - c^2 ln c``.

    Its derivative is nonnegative everywhere, so for tau < 1 the function is
    unbounded below as u -> -inf and cannot serve as a regression objective.
    Fitting with the ``SMOOTH_EXPECTILE`` family uses :func:`smooth_als_loss`.
    """
    _check_tau(tau)
    _check_shape(c, strict=True)
    x = _arr(u)
    out = 0.5 * (2.0 * tau - 1.0) * x * x + 0.5 * (x * np.hypot(c, x) + c * c * np.arcsinh(x / c))
    return _ret(out, u)


def smooth_expectile_grad(u, tau, c):
    """Derivative of :func:`smooth_expectile_loss`; identically ``2 * gmq_loss``."""
    return 2.0 * gmq_loss(u, tau, c)


def smooth_als_loss(u, tau, c):
    """Convex smoothing of the asymmetric squared loss.

    The exact derivative of :func:`expectile_loss` is ``u + (2 tau - 1)|u|``;
    replacing ``|u|`` by ``sqrt(c^2 + u^2)`` and integrating from zero gives
    ``u^2 / 2 + (2 tau - 1)(u sqrt(c^2 + u^2) + c^2 asinh(u / c)) / 2``.
    Second derivative lies in ``(2 min(tau, 1 - tau), 2 max(tau, 1 - tau))``.
    """
    _check_tau(tau)
    _check_shape(c, strict=True)
    x = _arr(u)
    out = 0.5 * x * x + 0.5 * (2.0 * tau - 1.0) * (x * np.hypot(c, x) + c * c * np.arcsinh(x / c))
    return _ret(out, u)


def smooth_als_grad(u, tau, c):
    _check_tau(tau)
    _check_shape(c, strict=True)
    x = _arr(u)
    return _ret(x + (2.0 * tau - 1.0) * np.hypot(c, x), u)


def smooth_als_hess(u, tau, c):
    _check_tau(tau)
    _check_shape(c, strict=True)
    x = _arr(u)
    return _ret(1.0 + (2.0 * tau - 1.0) * x / np.hypot(c, x), u)


# ------------------------------------------------------------- kth power

def kth_power_loss(u, tau, k):
    _check_tau(tau)
    _check_k(k)
    x = _arr(u)
    return _ret(np.where(x >= 0.0, tau, 1.0 - tau) * np.abs(x) ** k, u)


def kth_power_grad(u, tau, k):
    _check_tau(tau)
    _check_k(k)
    x = _arr(u)
    return _ret(k * np.abs(x) ** (k - 1.0) * np.where(x >= 0.0, tau, tau - 1.0), u)


def smooth_kth_power_loss(u, tau, c, k):
    """``((2 tau - 1) s(u) + sqrt(c^2 + |u|^(2k))) / 2`` with ``s(u) = sign(u)|u|^k``.

    The signed power keeps the formula defined for negative residuals and
    fractional k, and makes ``c = 0`` reproduce :func:`kth_power_loss`.
    For k < 2 and tau != 1/2 the function is not convex in a neighbourhood
    of zero of width about ``c^(1/k)``.
    """
    _check_tau(tau)
    _check_shape(c)
    _check_k(k)
    x = _arr(u)
    ak = np.abs(x) ** k
    return _ret(0.5 * ((2.0 * tau - 1.0) * np.sign(x) * ak + np.hypot(c, ak)), u)


def smooth_kth_power_grad(u, tau, c, k):
    _check_tau(tau)
    _check_shape(c, strict=True)
    _check_k(k)
    x = _arr(u)
    a = np.abs(x)
    ak = a**k
    ratio = np.sign(x) * ak / np.hypot(c, ak)
    return _ret(0.5 * k * a ** (k - 1.0) * ((2.0 * tau - 1.0) + ratio), u)


def smooth_kth_power_hess(u, tau, c, k):
    """Second derivative; unbounded as u -> 0 when k < 2, so u = 0 is excluded."""
    _check_tau(tau)
    _check_shape(c, strict=True)
    _check_k(k)
    x = _arr(u)
    if k < 2.0 and np.any(x == 0.0):
        raise DomainError("smoothed kth-power second derivative is unbounded at u = 0 for k < 2")
    a = np.abs(x)
    ak = a**k
    r = np.hypot(c, ak)
    bracket = (2.0 * tau - 1.0) + np.sign(x) * ak / r
    with np.errstate(divide="ignore", invalid="ignore"):
        first = (k - 1.0) * np.sign(x) * a ** (k - 2.0) * bracket
    second = k * a ** (2.0 * k - 2.0) * (c / r) ** 2 / r
    return _ret(0.5 * k * (first + second), u)


# ------------------------------------------------------------- conquer

class Kernel(str, enum.Enum):
    GAUSSIAN = "gaussian"
    LOGISTIC = "logistic"


def _kernel(kernel):
    try:
        return Kernel(kernel.lower() if isinstance(kernel, str) else kernel)
    except ValueError:
        raise ParameterError(f"unsupported conquer kernel {kernel!r}") from None


def conquer_loss(u, tau, h, kernel=Kernel.GAUSSIAN):
    """Check loss convolved with a Gaussian or logistic kernel of bandwidth h."""
    _check_tau(tau)
    _check_shape(h, "h", strict=True)
    x = _arr(u)
    z = x / h
    if _kernel(kernel) is Kernel.GAUSSIAN:
        out = (tau - special.ndtr(-z)) * x + h * np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
    else:
        # tau u + h log(1 + exp(-u/h)), written to stay finite for large |u|/h
        out = tau * x + h * np.logaddexp(0.0, -z)
    return _ret(out, u)


def conquer_grad(u, tau, h, kernel=Kernel.GAUSSIAN):
    """``tau - Phi(-u/h)`` (Gaussian) or ``tau - 1/(1 + exp(u/h))`` (logistic)."""
    _check_tau(tau)
    _check_shape(h, "h", strict=True)
    x = _arr(u)
    if _kernel(kernel) is Kernel.GAUSSIAN:
        out = tau - special.ndtr(-x / h)
    else:
        out = tau - special.expit(-x / h)
    return _ret(out, u)


def conquer_hess(u, tau, h, kernel=Kernel.GAUSSIAN):
    _check_tau(tau)
    _check_shape(h, "h", strict=True)
    z = _arr(u) / h
    if _kernel(kernel) is Kernel.GAUSSIAN:
        out = np.exp(-0.5 * z * z) / (h * math.sqrt(2.0 * math.pi))
    else:
        out = special.expit(z) * special.expit(-z) / h
    return _ret(out, u)


# ------------------------------------------------------------- LossSpec

class Family(str, enum.Enum):
    CHECK = "check"
    GMQ = "gmq"
    EXPECTILE = "expectile"
    SMOOTH_EXPECTILE = "smooth_expectile"
    KTH_POWER = "kth_power"
    SMOOTH_KTH_POWER = "smooth_kth_power"
    CONQUER_GAUSSIAN = "conquer_gaussian"
    CONQUER_LOGISTIC = "conquer_logistic"


_SHAPED = {Family.GMQ, Family.SMOOTH_EXPECTILE, Family.SMOOTH_KTH_POWER,
           Family.CONQUER_GAUSSIAN, Family.CONQUER_LOGISTIC}
_POWERED = {Family.KTH_POWER, Family.SMOOTH_KTH_POWER}

_KERNEL_NAME = {
    Family.GMQ: "gmq",
    Family.EXPECTILE: "expectile",
    Family.SMOOTH_EXPECTILE: "smooth_als",
    Family.KTH_POWER: "kth_power",
    Family.SMOOTH_KTH_POWER: "smooth_kth_power",
    Family.CONQUER_GAUSSIAN: "conquer_gaussian",
    Family.CONQUER_LOGISTIC: "conquer_logistic",
}


@dataclass(frozen=True)
class LossSpec:
    """A loss family with its quantile level and shape.

    ``shape`` is the multiquadric ``c`` for the GMQ-type families and the
    bandwidth ``h`` for the conquer families; it is ignored by the unsmoothed
    families. ``k`` is used only by the kth-power families.
    """

    family: Family
    tau: float
    shape: float = 0.0
    k: float = 2.0

    def __post_init__(self):
        try:
            object.__setattr__(self, "family", Family(self.family))
        except ValueError:
            raise ParameterError(f"unknown loss family {self.family!r}") from None
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "shape", float(self.shape))
        object.__setattr__(self, "k", float(self.k))
        _check_tau(self.tau)
        _check_shape(self.shape, "shape")
        if self.family in _POWERED:
            _check_k(self.k)
        if self.family in (Family.CONQUER_GAUSSIAN, Family.CONQUER_LOGISTIC, Family.SMOOTH_EXPECTILE):
            _check_shape(self.shape, "shape", strict=True)

    @property
    def is_smooth(self):
        """True when the first derivative is defined everywhere."""
        if self.family is Family.CHECK:
            return False
        if self.family is Family.GMQ:
            return self.shape > 0.0
        if self.family is Family.SMOOTH_KTH_POWER:
            return self.shape > 0.0
        return True

    def loss(self, u):
        f, t, s, k = self.family, self.tau, self.shape, self.k
        if f is Family.CHECK:
            return check_loss(u, t)
        if f is Family.GMQ:
            return gmq_loss(u, t, s)
        if f is Family.EXPECTILE:
            return expectile_loss(u, t)
        if f is Family.SMOOTH_EXPECTILE:
            return smooth_als_loss(u, t, s)
        if f is Family.KTH_POWER:
            return kth_power_loss(u, t, k)
        if f is Family.SMOOTH_KTH_POWER:
            if s == 0.0:
                return kth_power_loss(u, t, k)
            return smooth_kth_power_loss(u, t, s, k)
        kernel = Kernel.GAUSSIAN if f is Family.CONQUER_GAUSSIAN else Kernel.LOGISTIC
        return conquer_loss(u, t, s, kernel)

    def grad(self, u, backend=None):
        """Elementwise first derivative, routed through the compiled kernels."""
        if self.family is Family.CHECK:
            raise DomainError("the check loss has no derivative at 0; use a smoothed family")
        x = np.ascontiguousarray(u, dtype=np.float64)
        if self.family is Family.GMQ and self.shape == 0.0 and np.any(x == 0.0):
            raise DomainError("GMQ derivative with c = 0 is undefined at u = 0")
        family = _KERNEL_NAME[self.family]
        if self.family is Family.SMOOTH_KTH_POWER and self.shape == 0.0:
            family = "kth_power"
        kernel = kernels.get_kernel(family, backend)
        out = kernel(x.reshape(-1), self.tau, self.shape, self.k).reshape(x.shape)
        return _ret(out, u)

    def hess(self, u):
        f, t, s, k = self.family, self.tau, self.shape, self.k
        if f is Family.GMQ:
            return gmq_hess(u, t, s)
        if f is Family.SMOOTH_EXPECTILE:
            return smooth_als_hess(u, t, s)
        if f is Family.SMOOTH_KTH_POWER:
            return smooth_kth_power_hess(u, t, s, k)
        if f is Family.CONQUER_GAUSSIAN:
            return conquer_hess(u, t, s, Kernel.GAUSSIAN)
        if f is Family.CONQUER_LOGISTIC:
            return conquer_hess(u, t, s, Kernel.LOGISTIC)
        if f is Family.EXPECTILE:
            x = _arr(u)
            return _ret(2.0 * np.where(x >= 0.0, t, 1.0 - t), u)
        raise DomainError(f"no second derivative for family {f.value}")

    def to_dict(self):
        d = asdict(self)
        d["family"] = self.family.value
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(**d)
