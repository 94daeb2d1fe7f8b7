import os
import subprocess
import sys

import numpy as np
import pytest

from gmqr import kernels
from gmqr import loss as L

needs_numba = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba not installed")

REFERENCE = {
    "gmq": lambda u, tau, s, k: L.gmq_grad(u, tau, s),
    "conquer_gaussian": lambda u, tau, s, k: L.conquer_grad(u, tau, s, "gaussian"),
    "conquer_logistic": lambda u, tau, s, k: L.conquer_grad(u, tau, s, "logistic"),
    "expectile": lambda u, tau, s, k: 2 * np.where(u < 0, 1 - tau, tau) * u,
    "smooth_als": lambda u, tau, s, k: L.smooth_als_grad(u, tau, s),
    "smooth_kth_power": lambda u, tau, s, k: L.smooth_kth_power_grad(u, tau, s, k),
}


def _residuals():
    rng = np.random.default_rng(3)
    return np.concatenate([rng.standard_normal(500) * 3, [0.0, -0.0, 1e-12, -1e-12, 1e8, -1e8]])


@pytest.mark.parametrize("family", sorted(REFERENCE))
@pytest.mark.parametrize("backend", kernels.available_backends())
def test_kernel_matches_loss_module(family, backend):
    u = _residuals()
    kernel = kernels.get_kernel(family, backend)
    for tau in (0.1, 0.5, 0.9):
        got = kernel(u, tau, 0.2, 1.5)
        np.testing.assert_allclose(got, REFERENCE[family](u, tau, 0.2, 1.5), rtol=1e-12, atol=1e-15)


@needs_numba
@pytest.mark.parametrize("family", kernels.FAMILIES)
def test_numba_and_numpy_agree(family):
    u = _residuals()
    a = kernels.get_kernel(family, "numba")(u, 0.7, 0.3, 5 / 3)
    b = kernels.get_kernel(family, "numpy")(u, 0.7, 0.3, 5 / 3)
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-15)


def test_unknown_family_and_backend():
    with pytest.raises(KeyError):
        kernels.get_kernel("huber")
    with pytest.raises(ValueError):
        kernels.get_kernel("gmq", "fortran")


def test_default_backend_follows_flag():
    assert kernels.default_backend() == ("numba" if kernels.USE_NUMBA else "numpy")


@pytest.mark.parametrize("value, expected", [("1", "numpy"), ("true", "numpy"), ("0", None), ("", None)])
def test_env_flag_selects_numpy_path(value, expected):
    env = dict(os.environ, GMQR_DISABLE_JIT=value)
    out = subprocess.run(
        [sys.executable, "-c", "from gmqr import kernels; print(kernels.default_backend())"],
        env=env, capture_output=True, text=True, check=True,
    ).stdout.strip()
    if expected is None:
        expected = "numba" if kernels.HAVE_NUMBA else "numpy"
    assert out == expected
