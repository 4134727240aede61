"""Asymptotic variance, bias and BM/POT comparison metrics."""

from .coeffs import LimitCoeffs, Target, bm_limit_coeffs
from .compare import (
    AsympSummary,
    Method,
    bm_asymp,
    k0_ratio,
    k0_ratio_from,
    minmse_ratio,
    minmse_ratio_from,
    pot_asymp,
)
from .covariance import CovQ, cov_q, quad_tol
from .grid import GridRow, Metric, grid_axis, grid_eval, write_grid_csv
from .pot import DEFAULT_POT_PROVIDER, PotAsymptoticsProvider, PwmPotAsymptotics

__all__ = [
    "AsympSummary",
    "CovQ",
    "DEFAULT_POT_PROVIDER",
    "GridRow",
    "LimitCoeffs",
    "Method",
    "Metric",
    "PotAsymptoticsProvider",
    "PwmPotAsymptotics",
    "Target",
    "bm_asymp",
    "bm_limit_coeffs",
    "cov_q",
    "grid_axis",
    "grid_eval",
    "k0_ratio",
    "k0_ratio_from",
    "minmse_ratio",
    "minmse_ratio_from",
    "pot_asymp",
    "quad_tol",
    "write_grid_csv",
]
