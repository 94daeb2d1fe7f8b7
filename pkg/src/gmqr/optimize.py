"""Gradient descent with Barzilai-Borwein steps, and a fixed-step baseline."""
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import OptimizationError, ParameterError

# Denominators below this fall back to a unit step instead of dividing.
_TINY = 1e-30


@dataclass
class OptimizerConfig:
    beta0: np.ndarray
    tol_delta: float = 1e-6
    max_iter: int = 5000
    step_cap: float = 100.0

    def __post_init__(self):
        self.beta0 = np.array(self.beta0, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(self.beta0)):
            raise ParameterError("beta0 must be finite")
        if not self.tol_delta > 0:
            raise ParameterError(f"tol_delta must be > 0, got {self.tol_delta}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 2:
            raise ParameterError(f"max_iter must be an integer >= 2, got {self.max_iter}")
        if not self.step_cap > 0:
            raise ParameterError(f"step_cap must be > 0, got {self.step_cap}")
        self.max_iter = int(self.max_iter)


@dataclass
class OptimizeTrace:
    """Per-iteration record. Entry t of each array belongs to iterate t + 1."""

    iterations: int = 0
    grad_norms: np.ndarray = field(default_factory=lambda: np.empty(0))
    step_sizes: np.ndarray = field(default_factory=lambda: np.empty(0))
    converged: bool = False
    wall_time: float = 0.0
    message: str = ""
    backtracks: int = 0

    def to_dict(self):
        return {
            "iterations": self.iterations,
            "grad_norms": [float(x) for x in self.grad_norms],
            "step_sizes": [float(x) for x in self.step_sizes],
            "converged": self.converged,
            "wall_time": self.wall_time,
            "message": self.message,
            "backtracks": self.backtracks,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            iterations=int(d["iterations"]),
            grad_norms=np.asarray(d["grad_norms"], dtype=np.float64),
            step_sizes=np.asarray(d["step_sizes"], dtype=np.float64),
            converged=bool(d["converged"]),
            wall_time=float(d["wall_time"]),
            message=d.get("message", ""),
            backtracks=int(d.get("backtracks", 0)),
        )


def _evaluate(grad_fn, beta, iteration):
    g = np.asarray(grad_fn(beta), dtype=np.float64)
    if g.shape != beta.shape:
        raise ParameterError(f"gradient has shape {g.shape}, expected {beta.shape}")
    if not np.all(np.isfinite(g)):
        raise OptimizationError("non-finite gradient", iteration)
    return g


def bb_minimize(grad_fn, config, fun=None):
    """Minimize a smooth convex function given its gradient.

    The first move is a plain unit-step gradient step. From then on the step
    is ``min(eta1, eta2, step_cap)`` with the two Barzilai-Borwein ratios
    ``eta1 = <d, d> / <d, y>`` and ``eta2 = <d, y> / <y, y>`` built from the
    last iterate difference ``d`` and gradient difference ``y``; when
    ``eta1`` is not positive (or a denominator underflows) the step is 1.
    Stops once ``||grad|| < tol_delta`` or after ``max_iter`` updates.

    Without ``fun`` the steps are taken as proposed. Raw Barzilai-Borwein
    steps are not globally convergent: on nearly piecewise-linear objectives
    (tiny smoothing) they can hit the step cap and cycle. Passing the
    objective ``fun`` enables an acceptance test: a proposed step is kept if
    ``fun`` drops by at least ``1e-4 * eta * ||g||^2`` and halved until it
    does otherwise. Steps that already pass are unchanged, so the safeguard
    is silent whenever plain Barzilai-Borwein makes progress.

    Returns ``(beta, trace)``.
    """
    t0 = time.perf_counter()
    beta = config.beta0.copy()
    g = _evaluate(grad_fn, beta, 0)
    norms, steps = [], []
    f = _value(fun, beta, 0) if fun is not None else None
    backtracks = 0

    def finish(converged, message):
        trace = OptimizeTrace(
            iterations=len(norms),
            grad_norms=np.asarray(norms),
            step_sizes=np.asarray(steps),
            converged=converged,
            wall_time=time.perf_counter() - t0,
            message=message,
            backtracks=backtracks,
        )
        return beta, trace

    if np.linalg.norm(g) < config.tol_delta:
        return finish(True, "initial point is stationary")

    eta = 1.0
    while True:
        if fun is not None:
            eta, f, nb = _sufficient_decrease_step(fun, beta, g, eta, f, len(norms) + 1)
            backtracks += nb
        beta_prev, g_prev = beta, g
        beta = beta - eta * g
        g = _evaluate(grad_fn, beta, len(norms) + 1)
        steps.append(eta)
        norms.append(float(np.linalg.norm(g)))

        if norms[-1] < config.tol_delta:
            return finish(True, "gradient norm below tolerance")
        if len(norms) >= config.max_iter:
            return finish(False, "max_iter reached")

        d = beta - beta_prev
        y = g - g_prev
        if not np.any(y):
            # gradient did not change along a nonzero move: no curvature left to exploit
            return finish(False, "gradient unchanged between iterates")
        dy = float(d @ y)
        yy = float(y @ y)
        if dy > _TINY and yy > _TINY:
            eta = min(float(d @ d) / dy, dy / yy, config.step_cap)
        else:
            eta = 1.0


# Sufficient-decrease constant and the most halvings tried before giving up.
_GAMMA = 1e-4
_MAX_HALVINGS = 60


def _value(fun, beta, iteration):
    f = float(fun(beta))
    if not np.isfinite(f):
        raise OptimizationError("non-finite objective", iteration)
    return f


def _sufficient_decrease_step(fun, beta, g, eta, f_ref, iteration):
    gg = float(g @ g)
    for halvings in range(_MAX_HALVINGS + 1):
        f_new = float(fun(beta - eta * g))
        if np.isfinite(f_new) and f_new <= f_ref - _GAMMA * eta * gg:
            return eta, f_new, halvings
        eta *= 0.5
    raise OptimizationError("no acceptable step along the negative gradient", iteration)


def gd_minimize(grad_fn, config, step):
    """Fixed-step gradient descent with the same stopping rule as :func:`bb_minimize`."""
    if not step >= 0:
        raise ParameterError(f"step must be >= 0, got {step}")
    t0 = time.perf_counter()
    beta = config.beta0.copy()
    g = _evaluate(grad_fn, beta, 0)
    norms = []
    converged = np.linalg.norm(g) < config.tol_delta
    message = "initial point is stationary" if converged else "max_iter reached"
    while not converged and len(norms) < config.max_iter:
        beta = beta - step * g
        g = _evaluate(grad_fn, beta, len(norms) + 1)
        norms.append(float(np.linalg.norm(g)))
        if norms[-1] < config.tol_delta:
            converged, message = True, "gradient norm below tolerance"
    trace = OptimizeTrace(
        iterations=len(norms),
        grad_norms=np.asarray(norms),
        step_sizes=np.full(len(norms), float(step)),
        converged=bool(converged),
        wall_time=time.perf_counter() - t0,
        message=message,
    )
    return beta, trace
