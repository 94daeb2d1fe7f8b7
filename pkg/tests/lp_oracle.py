"""Linear-programming quantile regression (HiGHS via scipy), an oracle
independent of the package for sample sizes beyond brute-force enumeration."""
import numpy as np
from scipy import sparse
from scipy.optimize import linprog


def lp_quantile_regression(D, y, tau):
    n, p = D.shape
    # variables: beta (free), u+ >= 0, u- >= 0; D beta + u+ - u- = y
    cost = np.concatenate([np.zeros(p), np.full(n, tau), np.full(n, 1.0 - tau)]) / n
    eye = sparse.identity(n, format="csr")
    A = sparse.hstack([sparse.csr_matrix(D), eye, -eye], format="csr")
    bounds = [(None, None)] * p + [(0, None)] * (2 * n)
    res = linprog(cost, A_eq=A, b_eq=y, bounds=bounds, method="highs")
    assert res.status == 0, res.message
    return res.x[:p]
