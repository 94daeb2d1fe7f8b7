"""Linear quantile-type regression: data container, empirical risk, and the fitter."""
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, ParameterError
from .loss import Family, LossSpec
from .optimize import OptimizerConfig, OptimizeTrace, bb_minimize, gd_minimize


@dataclass
class Dataset:
    """Covariates ``X`` (n x p), response ``y`` (n).

    When ``has_intercept`` is set, a leading column of ones is prepended to
    form the design, so coefficient vectors have length ``p + 1`` with the
    intercept first. ``X`` may then have zero columns (intercept-only model).
    """

    X: np.ndarray
    y: np.ndarray
    has_intercept: bool = True

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64).reshape(-1)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2:
            raise DataError(f"X must be a matrix, got {X.ndim} dimensions")
        if y.shape[0] < 1:
            raise DataError("dataset needs at least one observation")
        if X.shape[0] != y.shape[0]:
            raise DataError(f"X has {X.shape[0]} rows but y has {y.shape[0]} entries")
        if X.shape[1] + bool(self.has_intercept) < 1:
            raise DataError("design has no columns")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise DataError("X and y must be finite")
        self.X, self.y = X, y
        self.has_intercept = bool(self.has_intercept)

    @property
    def n(self):
        return self.y.shape[0]

    @property
    def p(self):
        return self.X.shape[1]

    @property
    def dim(self):
        """Length of the coefficient vector."""
        return self.p + int(self.has_intercept)

    def design(self):
        if self.has_intercept:
            return np.column_stack([np.ones(self.n), self.X])
        return self.X


@dataclass
class Standardizer:
    """Per-column affine map ``(x - mean) / sd`` applied to the covariates.

    Without an intercept the means are held at zero: a centred design with
    no constant column cannot express the mean shift on back-transformation.
    """

    means: np.ndarray
    sds: np.ndarray

    def __post_init__(self):
        self.means = np.asarray(self.means, dtype=np.float64).reshape(-1)
        self.sds = np.asarray(self.sds, dtype=np.float64).reshape(-1)
        if self.means.shape != self.sds.shape:
            raise DataError("means and sds must have equal length")
        if not np.all(self.sds > 0):
            raise DataError("standardizer has a zero-variance column")

    @classmethod
    def fit(cls, dataset):
        X = dataset.X
        sds = X.std(axis=0) if dataset.n > 0 else np.ones(dataset.p)
        bad = np.flatnonzero(~(sds > 0))
        if bad.size:
            cols = ", ".join(f"x{j + 1}" for j in bad)
            raise DataError(f"covariate column(s) {cols} have zero variance")
        means = X.mean(axis=0) if dataset.has_intercept else np.zeros(dataset.p)
        return cls(means, sds)

    @classmethod
    def identity(cls, p):
        return cls(np.zeros(p), np.ones(p))

    def transform(self, X):
        return (np.asarray(X, dtype=np.float64) - self.means) / self.sds

    def inverse_transform(self, Z):
        return np.asarray(Z, dtype=np.float64) * self.sds + self.means

    def to_original(self, beta_std, has_intercept):
        """Coefficients on the standardized design -> coefficients on the raw design."""
        b = np.asarray(beta_std, dtype=np.float64)
        if not has_intercept:
            return b / self.sds
        slopes = b[1:] / self.sds
        return np.concatenate([[b[0] - self.means @ slopes], slopes])

    def to_standardized(self, beta, has_intercept):
        b = np.asarray(beta, dtype=np.float64)
        if not has_intercept:
            return b * self.sds
        return np.concatenate([[b[0] + self.means @ b[1:]], b[1:] * self.sds])

    def to_dict(self):
        return {"means": self.means.tolist(), "sds": self.sds.tolist()}


@dataclass
class FitResult:
    beta_hat: np.ndarray
    beta_std: np.ndarray
    trace: OptimizeTrace
    loss_spec: LossSpec
    standardizer: Standardizer = None
    has_intercept: bool = True
    wall_time: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def converged(self):
        return self.trace.converged

    def to_dict(self):
        return {
            "beta_hat": self.beta_hat.tolist(),
            "beta_std": self.beta_std.tolist(),
            "has_intercept": self.has_intercept,
            "loss_spec": self.loss_spec.to_dict(),
            "standardizer": self.standardizer.to_dict() if self.standardizer is not None else None,
            "wall_time": self.wall_time,
            "trace": self.trace.to_dict(),
            **({"extra": self.extra} if self.extra else {}),
        }

    @classmethod
    def from_dict(cls, d):
        st = d.get("standardizer")
        return cls(
            beta_hat=np.asarray(d["beta_hat"], dtype=np.float64),
            beta_std=np.asarray(d["beta_std"], dtype=np.float64),
            trace=OptimizeTrace.from_dict(d["trace"]),
            loss_spec=LossSpec.from_dict(d["loss_spec"]),
            standardizer=Standardizer(**st) if st is not None else None,
            has_intercept=bool(d["has_intercept"]),
            wall_time=float(d["wall_time"]),
            extra=d.get("extra", {}),
        )


def _check_beta(dataset, beta):
    b = np.asarray(beta, dtype=np.float64).reshape(-1)
    if b.shape[0] != dataset.dim:
        raise ParameterError(f"beta has length {b.shape[0]}, expected {dataset.dim}")
    return b


def empirical_risk(dataset, beta, loss_spec):
    """Mean loss of the residuals ``y - D beta`` over the sample."""
    b = _check_beta(dataset, beta)
    r = dataset.y - dataset.design() @ b
    return float(np.mean(loss_spec.loss(r)))


def _risk_gradient(D, y, loss_spec, backend=None):
    n = y.shape[0]

    def grad(beta):
        r = y - D @ beta
        return -(D.T @ loss_spec.grad(r, backend)) / n

    return grad


def _risk_function(D, y, loss_spec):
    def risk(beta):
        return float(np.mean(loss_spec.loss(y - D @ beta)))

    return risk


def empirical_grad(dataset, beta, loss_spec, backend=None):
    """Gradient ``-(1/n) sum_i x_i rho'(y_i - x_i' beta)`` of :func:`empirical_risk`."""
    b = _check_beta(dataset, beta)
    return _risk_gradient(dataset.design(), dataset.y, loss_spec, backend)(b)


def curvature_bound(loss_spec):
    """Supremum of the loss second derivative (for fixed-step descent)."""
    f, t, s = loss_spec.family, loss_spec.tau, loss_spec.shape
    if f is Family.GMQ and s > 0:
        return 0.5 / s
    if f in (Family.EXPECTILE, Family.SMOOTH_EXPECTILE):
        return 2.0 * max(t, 1.0 - t)
    if f is Family.CONQUER_GAUSSIAN:
        return 1.0 / (s * math.sqrt(2.0 * math.pi))
    if f is Family.CONQUER_LOGISTIC:
        return 0.25 / s
    raise ParameterError(f"no finite curvature bound for family {f.value}")


def default_start(dataset, tau):
    """Starting point in standardized coordinates: slopes 0, intercept at the
    sample tau-quantile of ``y``.

    With centred covariates this is the exact minimizer of the unsmoothed
    intercept-only risk. Starting the intercept at 0 instead can leave every
    residual far beyond ``c``; the gradient is then saturated and nearly
    constant, and Barzilai-Borwein steps hit the step cap and cycle.
    """
    beta0 = np.zeros(dataset.dim)
    if dataset.has_intercept:
        beta0[0] = np.quantile(dataset.y, tau)
    return beta0


def fit(dataset, loss_spec, config=None, *, standardize=True, method="bb", step=None,
        backend=None, safeguard=True):
    """Fit linear regression coefficients by minimizing the smoothed empirical risk.

    Covariates are standardized (centred only when an intercept is fitted),
    the risk is minimized from ``config.beta0`` (:func:`default_start` by
    default, in standardized coordinates) with Barzilai-Borwein descent, or fixed-step
    descent when ``method="gd"``, and the solution is mapped back to the raw
    covariate scale. ``safeguard`` hands the risk to the optimizer so it can
    reject Barzilai-Borwein steps that fail a sufficient-decrease test
    (see :func:`~gmqr.optimize.bb_minimize`); without it steps are taken raw. Non-convergence is reported through
    ``result.trace.converged`` rather than raised.
    """
    if not loss_spec.is_smooth:
        raise ParameterError(
            f"family {loss_spec.family.value} with shape {loss_spec.shape} is not differentiable; "
            "use a positive shape parameter"
        )
    if dataset.n < dataset.dim:
        raise DataError(f"n = {dataset.n} is smaller than the number of coefficients {dataset.dim}")
    t0 = time.perf_counter()
    st = Standardizer.fit(dataset) if standardize else Standardizer.identity(dataset.p)
    Z = st.transform(dataset.X)
    D = np.column_stack([np.ones(dataset.n), Z]) if dataset.has_intercept else Z
    D = np.ascontiguousarray(D)
    if config is None:
        config = OptimizerConfig(beta0=default_start(dataset, loss_spec.tau))
    elif config.beta0.shape[0] != dataset.dim:
        raise ParameterError(f"beta0 has length {config.beta0.shape[0]}, expected {dataset.dim}")

    grad = _risk_gradient(D, dataset.y, loss_spec, backend)
    if method == "bb":
        risk = _risk_function(D, dataset.y, loss_spec) if safeguard else None
        beta_std, trace = bb_minimize(grad, config, fun=risk)
    elif method == "gd":
        if step is None:
            lam = np.linalg.eigvalsh(D.T @ D / dataset.n)[-1]
            step = 1.0 / (curvature_bound(loss_spec) * lam)
        beta_std, trace = gd_minimize(grad, config, step)
    else:
        raise ParameterError(f"unknown method {method!r}")

    beta_hat = st.to_original(beta_std, dataset.has_intercept)
    return FitResult(
        beta_hat=beta_hat,
        beta_std=beta_std,
        trace=trace,
        loss_spec=loss_spec,
        standardizer=st,
        has_intercept=dataset.has_intercept,
        wall_time=time.perf_counter() - t0,
    )


def default_c(n, p):
    """Rule-of-thumb shape ``((p + ln n) / n)^(1/3)``, clamped to [1e-3, 1]."""
    if not (n > 0 and 0 <= p < n):
        raise ParameterError(f"need n > p >= 0, got n={n}, p={p}")
    return min(1.0, max(1e-3, ((p + math.log(n)) / n) ** (1.0 / 3.0)))


def conquer_bandwidth(n, p):
    """Bandwidth ``((p + ln n) / n)^(2/5)`` used for the conquer baselines."""
    if not (n > 0 and 0 <= p < n):
        raise ParameterError(f"need n > p >= 0, got n={n}, p={p}")
    return ((p + math.log(n)) / n) ** 0.4
