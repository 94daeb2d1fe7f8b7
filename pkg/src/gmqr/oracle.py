"""Independent references: brute-force quantile regression, finite-difference
gradient checks, and Monte Carlo smoothing-bias estimates."""
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .datagen import Model, generate
from .errors import DataError, GuardError, ParameterError
from .loss import Family, LossSpec, check_loss
from .model import empirical_risk, fit

MAX_N = 60
MAX_P = 4


@dataclass
class OracleResult:
    beta_exact: np.ndarray
    objective: float
    basis_indices: tuple


def _combination_array(n, p):
    m = math.comb(n, p)
    flat = np.fromiter((i for combo in combinations(range(n), p) for i in combo), dtype=np.intp, count=m * p)
    return flat.reshape(m, p)


def exact_qr(dataset, tau, chunk=20000):
    """Exact check-loss regression by enumerating interpolating bases.

    The quantile regression linear program always has an optimal vertex at
    which ``p`` observations are fitted exactly, so evaluating the check risk
    at every ``p``-subset interpolant and keeping the best one solves it.
    Ties (within 1e-12 relative) go to the lexicographically smallest subset.
    """
    D = dataset.design()
    y = dataset.y
    n, p = D.shape
    if n > MAX_N or p > MAX_P:
        raise GuardError(f"exact_qr is limited to n <= {MAX_N}, p <= {MAX_P}; got n={n}, p={p}")
    if n < p or np.linalg.matrix_rank(D) < p:
        raise DataError("design matrix does not have full column rank")

    combos = _combination_array(n, p)
    best_risk, best_beta, best_basis = np.inf, None, None
    for start in range(0, combos.shape[0], chunk):
        idx = combos[start:start + chunk]
        A = D[idx]
        b = y[idx]
        scale = np.prod(np.linalg.norm(A, axis=2), axis=1)
        ok = np.abs(np.linalg.det(A)) > 1e-12 * scale
        if not np.any(ok):
            continue
        betas = np.linalg.solve(A[ok], b[ok][..., None])[..., 0]
        resid = y[:, None] - D @ betas.T
        risks = check_loss(resid, tau).mean(axis=0)
        j = int(np.argmin(risks))
        if risks[j] < best_risk * (1.0 - 1e-12) - 1e-15:
            # first index within tolerance of the chunk minimum keeps lexicographic order
            tol = 1e-12 * abs(risks[j]) + 1e-15
            j = int(np.flatnonzero(risks <= risks[j] + tol)[0])
            best_risk = risks[j]
            best_beta = betas[j]
            best_basis = tuple(int(i) for i in idx[ok][j])
    if best_beta is None:
        raise DataError("every p-subset of observations is singular")
    spec = LossSpec(Family.CHECK, tau)
    return OracleResult(best_beta, empirical_risk(dataset, best_beta, spec), best_basis)


def fd_check(f, grad, points, rel_step=1e-6, floor=1e-4):
    """Worst relative error between ``grad`` and central differences of ``f``.

    Step is ``rel_step * max(1, ||x||)``. The error is scaled by
    ``max(|grad_j|, floor)`` so exact zeros of the gradient do not divide by zero.
    """
    worst = 0.0
    for x in points:
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        h = rel_step * max(1.0, float(np.linalg.norm(x)))
        g = np.atleast_1d(np.asarray(grad(x), dtype=np.float64))
        for j in range(x.shape[0]):
            e = np.zeros_like(x)
            e[j] = h
            fd = (float(f(x + e)) - float(f(x - e))) / (2.0 * h)
            err = abs(fd - g[j]) / max(abs(g[j]), floor)
            worst = max(worst, err)
    return worst


@dataclass
class BiasTable:
    rows: list
    slope_fit: float
    floor_error: float
    c_floor: float

    def csv_rows(self):
        header = ["c", "mean_error", "sd_error", "slope_fit", "excess_error"]
        body = [[r["c"], r["mean_error"], r["sd_error"], self.slope_fit, r["excess_error"]] for r in self.rows]
        return header, body


def loglog_slope(x, y):
    """Least-squares slope of log y against log x over strictly positive pairs."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    keep = (x > 0) & (y > 0) & np.isfinite(x) & np.isfinite(y)
    if keep.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(x[keep]), np.log(y[keep]), 1)[0])


def bias_estimate(sim_spec_template, c_grid, n_large, replications, *, c_floor=1e-3,
                  config=None, backend=None):
    """Mean estimation error of GMQ fits across shape parameters.

    Each replication draws one dataset (substream = replication index) and
    fits it at every ``c`` in ``c_grid`` plus ``c_floor``, so differences
    between shapes are not blurred by resampling. ``excess_error`` is the
    mean error minus that of the ``c_floor`` fit, the part attributable to
    smoothing; ``slope_fit`` regresses its log on ``log(c^2 |ln c|)``.
    """
    if sim_spec_template.model is not Model.HOMOSKEDASTIC:
        raise ParameterError("bias_estimate needs the homoskedastic model, where beta* is the true quantile")
    if replications < 1:
        raise ParameterError("replications must be >= 1")
    spec = sim_spec_template.replace(n=int(n_large))
    shapes = [float(c) for c in c_grid]
    all_c = shapes + [float(c_floor)]
    errors = np.empty((replications, len(all_c)))
    for r in range(replications):
        data, truth = generate(spec, stream=r)
        for j, c in enumerate(all_c):
            res = fit(data, LossSpec(Family.GMQ, spec.tau, c), config, backend=backend)
            errors[r, j] = np.linalg.norm(res.beta_hat - truth)
    means = errors.mean(axis=0)
    sds = errors.std(axis=0, ddof=1) if replications > 1 else np.zeros(len(all_c))
    floor = float(means[-1])
    rows = [
        {"c": c, "mean_error": float(means[j]), "sd_error": float(sds[j]),
         "excess_error": float(means[j] - floor)}
        for j, c in enumerate(shapes)
    ]
    rate = [c * c * abs(math.log(c)) if 0 < c < 1 else float("nan") for c in shapes]
    slope = loglog_slope(rate, [r["excess_error"] for r in rows])
    return BiasTable(rows, slope, floor, float(c_floor))
