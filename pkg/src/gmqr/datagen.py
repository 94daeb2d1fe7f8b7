"""Seeded synthetic data for the three linear simulation models.

Random numbers come from numpy's Philox 4x64 counter-based generator, which
produces the same stream on every platform for a given seed.
"""
import enum
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import ParameterError
from .model import Dataset


class Model(str, enum.Enum):
    # y = x'b + (e - q)
    HOMOSKEDASTIC = "homoskedastic"
    # y = b0 + x'b + (0.5 x_p + 1)(e - q)
    LINEAR_SCALE = "linear_scale"
    # y = b0 + x'b + 0.5((x_p + 1)^2 + 1)(e - q)
    QUADRATIC_SCALE = "quadratic_scale"


_MODEL_ALIASES = {"3.2": Model.HOMOSKEDASTIC, "3.3": Model.LINEAR_SCALE, "3.4": Model.QUADRATIC_SCALE}


class ErrorDist(str, enum.Enum):
    NORMAL0_4 = "normal0_4"
    STUDENT_T2 = "student_t2"


_DIST_ALIASES = {"normal": ErrorDist.NORMAL0_4, "n04": ErrorDist.NORMAL0_4,
                 "t2": ErrorDist.STUDENT_T2}


def parse_model(value):
    if isinstance(value, Model):
        return value
    try:
        return _MODEL_ALIASES.get(str(value), None) or Model(str(value).lower())
    except ValueError:
        raise ParameterError(f"unknown model {value!r}") from None


def parse_dist(value):
    if isinstance(value, ErrorDist):
        return value
    try:
        return _DIST_ALIASES.get(str(value).lower(), None) or ErrorDist(str(value).lower())
    except ValueError:
        raise ParameterError(f"unknown error distribution {value!r}") from None


@dataclass
class SimSpec:
    """One simulation design.

    ``beta_star`` defaults to all ones and ``beta0_star`` to 1. Model
    ``homoskedastic`` has no true intercept; if ``intercept`` is set the
    fitted design still carries one and its true value is 0.
    """

    model: Model = Model.HOMOSKEDASTIC
    n: int = 1000
    p: int = 5
    tau: float = 0.5
    error_dist: ErrorDist = ErrorDist.NORMAL0_4
    beta_star: tuple = None
    beta0_star: float = 1.0
    seed: int = 0
    intercept: bool = True

    def __post_init__(self):
        self.model = parse_model(self.model)
        self.error_dist = parse_dist(self.error_dist)
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"invariant violated: n must be an integer >= 1, got {self.n}")
        if int(self.p) != self.p or self.p < 1:
            raise ParameterError(f"invariant violated: p must be an integer >= 1, got {self.p}")
        self.n, self.p = int(self.n), int(self.p)
        if not 0.0 < self.tau < 1.0:
            raise ParameterError(f"invariant violated: tau must lie in (0, 1), got {self.tau}")
        if self.beta_star is None:
            self.beta_star = (1.0,) * self.p
        self.beta_star = tuple(float(b) for b in self.beta_star)
        if len(self.beta_star) != self.p:
            raise ParameterError(f"invariant violated: beta_star has {len(self.beta_star)} entries, p = {self.p}")
        if not 0 <= int(self.seed) < 2**64:
            raise ParameterError(f"invariant violated: seed must be a 64-bit unsigned integer, got {self.seed}")
        self.seed = int(self.seed)
        self.beta0_star = float(self.beta0_star)
        self.intercept = bool(self.intercept)
        if self.model is not Model.HOMOSKEDASTIC and not self.intercept:
            raise ParameterError(f"invariant violated: model {self.model.value} has an intercept term")

    def replace(self, **changes):
        d = self.to_dict()
        d.update(changes)
        if "p" in changes and "beta_star" not in changes:
            d["beta_star"] = None
        return SimSpec(**d)

    def to_dict(self):
        return {
            "model": self.model.value,
            "n": self.n,
            "p": self.p,
            "tau": self.tau,
            "error_dist": self.error_dist.value,
            "beta_star": list(self.beta_star),
            "beta0_star": self.beta0_star,
            "seed": self.seed,
            "intercept": self.intercept,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ParameterError(f"unknown SimSpec field(s): {', '.join(sorted(unknown))}")
        return cls(**d)

    @classmethod
    def from_json(cls, text):
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParameterError(f"malformed SimSpec JSON: {exc}") from None
        if not isinstance(d, dict):
            raise ParameterError("SimSpec JSON must be an object")
        return cls.from_dict(d)


def error_quantile(dist, tau):
    """tau-quantile of the error law: ``2 Phi^-1(tau)`` or the closed-form t2 quantile."""
    if not 0.0 < tau < 1.0:
        raise ParameterError(f"tau must lie in (0, 1), got {tau}")
    dist = parse_dist(dist)
    if dist is ErrorDist.NORMAL0_4:
        return 2.0 * float(special.ndtri(tau))
    return (2.0 * tau - 1.0) / math.sqrt(2.0 * tau * (1.0 - tau))


def draw_errors(rng, dist, n):
    dist = parse_dist(dist)
    if dist is ErrorDist.NORMAL0_4:
        return 2.0 * rng.standard_normal(n)
    z = rng.standard_normal((n, 3))
    return z[:, 0] / np.sqrt(0.5 * (z[:, 1] ** 2 + z[:, 2] ** 2))


def scale_factor(model, x_last):
    model = parse_model(model)
    if model is Model.HOMOSKEDASTIC:
        return np.ones_like(x_last)
    if model is Model.LINEAR_SCALE:
        return 0.5 * x_last + 1.0
    return 0.5 * ((x_last + 1.0) ** 2 + 1.0)


def responses(model, X, centered_errors, beta_star, beta0_star):
    """Response vector for a given design and already-centred errors."""
    model = parse_model(model)
    X = np.asarray(X, dtype=np.float64)
    base = X @ np.asarray(beta_star, dtype=np.float64)
    if model is not Model.HOMOSKEDASTIC:
        base = base + beta0_star
    return base + scale_factor(model, X[:, -1]) * centered_errors


def make_rng(seed, stream=None):
    """Philox generator for ``seed``; ``stream`` derives an independent substream."""
    if stream is None:
        return np.random.Generator(np.random.Philox(seed))
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(ss))


def true_coefficients(spec):
    """Coefficients of the conditional tau-quantile, intercept first when fitted.

    Errors are centred at their tau-quantile, so wherever the scale factor is
    positive the conditional quantile is the location part itself. For the
    linear-scale model the factor is negative when x_p < -2 (probability
    about 0.023 under a standard normal design), where this is a pseudo-truth.
    """
    beta = np.asarray(spec.beta_star, dtype=np.float64)
    if not spec.intercept:
        return beta
    b0 = 0.0 if spec.model is Model.HOMOSKEDASTIC else spec.beta0_star
    return np.concatenate([[b0], beta])


def generate(spec, stream=None):
    """Draw one dataset. Returns ``(Dataset, truth)``."""
    rng = make_rng(spec.seed, stream)
    X = rng.standard_normal((spec.n, spec.p))
    eps = draw_errors(rng, spec.error_dist, spec.n) - error_quantile(spec.error_dist, spec.tau)
    y = responses(spec.model, X, eps, spec.beta_star, spec.beta0_star)
    return Dataset(X, y, has_intercept=spec.intercept), true_coefficients(spec)
