"""Quantile, expectile and kth-power expectile regression with generalized
multiquadric smoothing, fitted by Barzilai-Borwein gradient descent."""
from .datagen import ErrorDist, Model, SimSpec, error_quantile, generate
from .errors import DataError, DomainError, GMQRError, GuardError, OptimizationError, ParameterError
from .loss import (
    Family,
    Kernel,
    LossSpec,
    check_loss,
    conquer_grad,
    conquer_hess,
    conquer_loss,
    expectile_loss,
    gmq_grad,
    gmq_hess,
    gmq_loss,
    kth_power_loss,
    smooth_als_loss,
    smooth_expectile_grad,
    smooth_expectile_loss,
    smooth_kth_power_loss,
    smoothing_gap_bound,
)
from .model import (
    Dataset,
    FitResult,
    Standardizer,
    conquer_bandwidth,
    default_c,
    default_start,
    empirical_grad,
    empirical_risk,
    fit,
)
from .optimize import OptimizerConfig, OptimizeTrace, bb_minimize, gd_minimize
from .oracle import OracleResult, bias_estimate, exact_qr, fd_check

__version__ = "0.1.0"
