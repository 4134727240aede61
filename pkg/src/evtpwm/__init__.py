"""Probability weighted moment estimators for block maxima and peaks over threshold."""

from .bm import (
    BlockMaximaSample,
    BlockSpec,
    BmFit,
    PartialPolicy,
    PwmBetas,
    block_maxima,
    block_maxima_series,
    bm_fit,
    bm_quantile,
    gamma_star,
    pwm_betas,
    solve_gamma,
)
from .errors import (
    DegenerateExcesses,
    DomainError,
    EvtError,
    ExcessiveFailures,
    ExtrapolationDomain,
    InputFormatError,
    ModelBoundary,
    NonIdentifiable,
    OutputError,
    QuadratureError,
)
from .evtmath import SecondOrderParams
from .pot import PotFit, PotSample, pot_fit, pot_pq, pot_quantile

__all__ = [
    "BlockMaximaSample",
    "BlockSpec",
    "BmFit",
    "DegenerateExcesses",
    "DomainError",
    "EvtError",
    "ExcessiveFailures",
    "ExtrapolationDomain",
    "InputFormatError",
    "ModelBoundary",
    "NonIdentifiable",
    "OutputError",
    "PartialPolicy",
    "PotFit",
    "PotSample",
    "PwmBetas",
    "QuadratureError",
    "SecondOrderParams",
    "block_maxima",
    "block_maxima_series",
    "bm_fit",
    "bm_quantile",
    "gamma_star",
    "pot_fit",
    "pot_pq",
    "pot_quantile",
    "pwm_betas",
    "solve_gamma",
]
