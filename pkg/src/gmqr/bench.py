"""Timing and Monte Carlo studies behind the command-line tools."""
import math
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import kernels
from .datagen import ErrorDist, Model, SimSpec, generate, parse_dist, parse_model
from .errors import ParameterError
from .loss import Family, LossSpec
from .model import conquer_bandwidth, default_c, fit
from .oracle import loglog_slope

DERIV_METHODS = ("gmq", "conquer_gaussian", "conquer_logistic")

REGRESSION_METHODS = (
    "gmq",
    "conquer-gaussian",
    "conquer-logistic",
    "smooth-expectile",
    "expectile-gd",
    "kth-power-smooth",
)


def median_time(func, reps, warmup=1):
    """Median wall time of ``func()`` over ``reps`` calls after discarded warm-up calls."""
    for _ in range(warmup):
        func()
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        func()
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def bench_derivatives(sizes, reps=5, seed=0, backends=None, methods=DERIV_METHODS,
                      tau=0.7, shape=0.1):
    """Median time of each vectorized first-derivative kernel on shared residuals.

    Returns rows ``(size, method, median_seconds, backend)``.
    """
    backends = backends or (kernels.default_backend(),)
    rows = []
    for size in sizes:
        size = int(size)
        u = np.random.Generator(np.random.Philox(seed)).standard_normal(size)
        for backend in backends:
            for method in methods:
                kernel = kernels.get_kernel(method, backend)
                t = median_time(lambda: kernel(u, tau, shape, 1.5), reps)
                rows.append((size, method, t, backend))
    return rows


@dataclass
class BenchRecord:
    method: str
    model: str
    n: int
    p: int
    tau: float
    shape: float
    error_l2: float
    wall_time: float
    iterations: int
    seed: int
    dist: str = ""
    rep: int = 0
    converged: bool = True

    def __post_init__(self):
        if not self.wall_time > 0:
            raise ParameterError("wall_time must be positive")
        if not self.error_l2 >= 0:
            raise ParameterError("error_l2 must be nonnegative")

    FIELDS = ("method", "model", "dist", "n", "p", "tau", "shape", "error_l2", "wall_time",
              "iterations", "converged", "seed", "rep")

    def row(self):
        d = asdict(self)
        return [d[f] for f in self.FIELDS]


def loss_for_method(method, tau, n, p, c=None, h=None, k=1.5):
    """LossSpec and optimizer name for a benchmark method; ``None`` shapes mean auto."""
    if method == "gmq":
        return LossSpec(Family.GMQ, tau, default_c(n, p) if c is None else c), "bb"
    if method in ("conquer-gaussian", "conquer-logistic"):
        family = Family.CONQUER_GAUSSIAN if method.endswith("gaussian") else Family.CONQUER_LOGISTIC
        return LossSpec(family, tau, conquer_bandwidth(n, p) if h is None else h), "bb"
    if method == "smooth-expectile":
        return LossSpec(Family.SMOOTH_EXPECTILE, tau, default_c(n, p) if c is None else c), "bb"
    if method == "expectile-gd":
        return LossSpec(Family.EXPECTILE, tau), "gd"
    if method == "expectile":
        return LossSpec(Family.EXPECTILE, tau), "bb"
    if method == "kth-power-smooth":
        return LossSpec(Family.SMOOTH_KTH_POWER, tau, default_c(n, p) if c is None else c, k), "bb"
    raise ParameterError(f"unknown method {method!r}")


def _grid_seed(seed, *keys):
    return int(np.random.SeedSequence([int(seed), *[int(k) for k in keys]]).generate_state(1, np.uint64)[0])


def bench_regression(models=("3.2",), n_list=(1000,), tau=0.5, dists=("normal0_4",),
                     methods=("gmq", "conquer-gaussian"), reps=1, seed=0, p_ratio=20, p=None,
                     k=1.5, backend=None):
    """One :class:`BenchRecord` per (model, n, dist, method, rep).

    Dimension is ``n // p_ratio`` unless ``p`` is given. Every method sees the
    same dataset for a given (model, n, dist, rep).
    """
    records = []
    for mi, model in enumerate(models):
        model = parse_model(model)
        for n in n_list:
            n = int(n)
            dim = int(p) if p is not None else max(1, n // p_ratio)
            for di, dist in enumerate(dists):
                dist = parse_dist(dist)
                sub_seed = _grid_seed(seed, list(Model).index(model), n, list(ErrorDist).index(dist))
                spec = SimSpec(model=model, n=n, p=dim, tau=tau, error_dist=dist, seed=sub_seed)
                for rep in range(reps):
                    data, truth = generate(spec, stream=rep)
                    for method in methods:
                        loss, how = loss_for_method(method, tau, n, dim, k=k)
                        res = fit(data, loss, method=how, backend=backend)
                        records.append(BenchRecord(
                            method=method, model=model.value, n=n, p=dim, tau=tau,
                            shape=loss.shape, error_l2=float(np.linalg.norm(res.beta_hat - truth)),
                            wall_time=max(res.wall_time, 1e-9), iterations=res.trace.iterations,
                            seed=sub_seed, dist=dist.value, rep=rep, converged=res.converged,
                        ))
    records.sort(key=lambda r: (r.model, r.n, r.dist, r.method, r.rep))
    return records


def rmse_scan(n_grid, p=5, tau=0.5, c="auto", reps=20, seed=0, model="3.2", dist="normal0_4",
              backend=None):
    """Mean and root-mean-square estimation error of GMQ fits as n grows.

    Returns ``(rows, slope_mean, slope_rmse)`` where rows are dicts with keys
    n, c, mean_error, sd_error, rmse and the slopes are log-log fits against n.
    """
    rows = []
    for n in n_grid:
        n = int(n)
        shape = default_c(n, p) if c == "auto" else float(c)
        spec = SimSpec(model=model, n=n, p=p, tau=tau, error_dist=dist, seed=_grid_seed(seed, n))
        errs = np.empty(reps)
        for r in range(reps):
            data, truth = generate(spec, stream=r)
            res = fit(data, LossSpec(Family.GMQ, tau, shape), backend=backend)
            errs[r] = np.linalg.norm(res.beta_hat - truth)
        rows.append({
            "n": n, "c": shape, "mean_error": float(errs.mean()),
            "sd_error": float(errs.std(ddof=1)) if reps > 1 else 0.0,
            "rmse": float(math.sqrt(np.mean(errs**2))),
        })
    ns = [r["n"] for r in rows]
    return (rows, loglog_slope(ns, [r["mean_error"] for r in rows]),
            loglog_slope(ns, [r["rmse"] for r in rows]))
