"""Block maxima and the probability weighted moment (PWM) GEV estimators.

The estimators follow Hosking, Wallis and Wood (1985): the extreme value
index solves ``(3^g - 1) / (2^g - 1) = (3β₂ - β₀) / (2β₁ - β₀)``, and scale
and location follow in closed form.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .errors import DomainError, ExtrapolationDomain, ModelBoundary, NonIdentifiable
from .evtmath import box_cox, one_minus_gamma_over

__all__ = [
    "PartialPolicy",
    "BlockSpec",
    "BlockMaximaSample",
    "PwmBetas",
    "BmFit",
    "block_maxima",
    "block_maxima_series",
    "pwm_weights",
    "pwm_betas",
    "gamma_ratio",
    "solve_gamma",
    "bm_fit",
    "gamma_star",
    "bm_quantile",
]

_LOG2 = math.log(2.0)
_LOG3 = math.log(3.0)
_LOG_RATIO0 = math.log(_LOG3 / _LOG2)


class PartialPolicy(enum.Enum):
    DISCARD = "discard"
    ERROR = "error"


@dataclass(frozen=True)
class BlockSpec:
    m: int
    partial_policy: PartialPolicy = PartialPolicy.DISCARD

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise DomainError(f"block size must be a positive integer, got {self.m}")


@dataclass(frozen=True, eq=False)
class BlockMaximaSample:
    """Ascending order statistics of ``k`` block maxima of block size ``m``."""

    values: np.ndarray
    k: int
    m: int

    @classmethod
    def from_values(cls, values, m: int = 1) -> BlockMaximaSample:
        arr = np.asarray(values, dtype=float).ravel()
        if arr.size == 0:
            raise DomainError("empty sample")
        if not np.all(np.isfinite(arr)):
            raise DomainError("sample contains non-finite values")
        arr = np.sort(arr, kind="stable")
        arr.setflags(write=False)
        return cls(arr, int(arr.size), int(m))


@dataclass(frozen=True)
class PwmBetas:
    beta: tuple[float, ...]
    k: int
    m: int

    @property
    def spread1(self) -> float:
        """``2β₁ - β₀``."""
        return 2.0 * self.beta[1] - self.beta[0]

    @property
    def spread2(self) -> float:
        """``3β₂ - β₀``."""
        return 3.0 * self.beta[2] - self.beta[0]


@dataclass(frozen=True)
class BmFit:
    gamma_hat: float
    a_hat: float
    b_hat: float
    k: int
    m: int


def block_maxima_series(series, spec: BlockSpec) -> np.ndarray:
    """Maxima of consecutive non-overlapping blocks of ``spec.m`` observations, in time order."""
    x = np.asarray(series, dtype=float).ravel()
    if x.size == 0:
        raise DomainError("empty series")
    m = spec.m
    if x.size < m:
        raise DomainError(f"series of length {x.size} is shorter than one block (m={m})")
    k, rest = divmod(x.size, m)
    if rest and spec.partial_policy is PartialPolicy.ERROR:
        raise DomainError(f"series length {x.size} is not a multiple of the block size {m}")
    if not np.all(np.isfinite(x[: k * m])):
        raise DomainError("series contains non-finite values")
    return x[: k * m].reshape(k, m).max(axis=1)


def block_maxima(series, spec: BlockSpec) -> BlockMaximaSample:
    """Sorted sample of block maxima; see :func:`block_maxima_series`."""
    return BlockMaximaSample.from_values(block_maxima_series(series, spec), spec.m)


def pwm_weights(k: int, n_orders: int = 4) -> np.ndarray:
    """Weights ``(i-1)...(i-r) / ((k-1)...(k-r))`` as an ``(n_orders, k)`` array."""
    if k <= n_orders - 1:
        raise DomainError(f"beta_{n_orders - 1} requires k > {n_orders - 1}, got k={k}")
    i = np.arange(1, k + 1, dtype=float)
    w = np.ones((n_orders, k))
    for r in range(1, n_orders):
        w[r] = w[r - 1] * (i - r) / (k - r)
    return w


def pwm_betas(sample: BlockMaximaSample, n_orders: int = 4) -> PwmBetas:
    """Unbiased PWM statistics β₀..β_{n_orders-1} of the sorted block maxima."""
    w = pwm_weights(sample.k, n_orders)
    beta = w @ sample.values / sample.k
    return PwmBetas(tuple(float(b) for b in beta), sample.k, sample.m)


def _log_phi(z: float) -> float:
    # log((e^z - 1) / z), smooth through z = 0 and free of overflow
    if abs(z) < 1e-3:
        z2 = z * z
        return z / 2.0 + z2 / 24.0 - z2 * z2 / 2880.0
    if z > 0:
        return z + math.log(-math.expm1(-z)) - math.log(z)
    return math.log(-math.expm1(z)) - math.log(-z)


def _log_gamma_ratio(g: float) -> float:
    # log((3^g - 1) / (2^g - 1))
    return _LOG_RATIO0 + _log_phi(g * _LOG3) - _log_phi(g * _LOG2)


def gamma_ratio(g: float) -> float:
    """Forward map ``g -> (3^g - 1) / (2^g - 1)``, strictly increasing from 1 to ∞."""
    return math.exp(_log_gamma_ratio(g))


def solve_gamma(ratio: float) -> float:
    """Invert :func:`gamma_ratio` with Brent's method on the log scale."""
    if not ratio > 1.0:
        raise NonIdentifiable(f"PWM spread ratio {ratio} must exceed 1")
    target = math.log(ratio)
    f = lambda g: _log_gamma_ratio(g) - target  # noqa: E731
    lo, hi = -8.0, 8.0
    while f(lo) > 0:
        lo *= 2.0
        if lo < -4096:
            raise NonIdentifiable(f"no root found for ratio {ratio}")
    while f(hi) < 0:
        hi *= 2.0
        if hi > 4096:
            raise NonIdentifiable(f"no root found for ratio {ratio}")
    return optimize.brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


def _scale_factor(g: float) -> float:
    # g / ((2^g - 1) Γ(1 - g))
    if g == 0.0:
        return 1.0 / _LOG2
    return g / math.expm1(g * _LOG2) / special.gamma(1.0 - g)


def bm_fit(betas: PwmBetas) -> BmFit:
    """PWM estimates of (γ, a_m, b_m) from β₀, β₁, β₂."""
    s1, s2 = betas.spread1, betas.spread2
    if not s1 > 0:
        raise NonIdentifiable(f"2*beta1 - beta0 = {s1} must be positive")
    g = solve_gamma(s2 / s1)
    if g >= 1.0:
        raise ModelBoundary(f"gamma_hat = {g} >= 1; Gamma(1 - gamma_hat) is not finite")
    a = _scale_factor(g) * s1
    b = betas.beta[0] + a * one_minus_gamma_over(g)
    return BmFit(float(g), float(a), float(b), betas.k, betas.m)


def gamma_star(betas: PwmBetas) -> float:
    """Explicit index estimator ``log2((4β₃ - β₀)/(2β₁ - β₀) - 1)``."""
    if len(betas.beta) < 4:
        raise DomainError("gamma_star needs beta_3")
    s1 = betas.spread1
    if not s1 > 0:
        raise NonIdentifiable(f"2*beta1 - beta0 = {s1} must be positive")
    arg = (4.0 * betas.beta[3] - betas.beta[0]) / s1 - 1.0
    if not arg > 0:
        raise NonIdentifiable(f"log argument {arg} must be positive")
    return math.log(arg) / _LOG2


def bm_quantile(fit: BmFit, p: float) -> float:
    """Estimate of ``F^{-1}(1 - p)`` for the original observations.

    Requires ``0 < m·p < 1``.
    """
    mp = fit.m * p
    if not 0.0 < mp < 1.0:
        raise ExtrapolationDomain(f"need 0 < m*p < 1, got m*p = {mp}")
    return fit.b_hat + fit.a_hat * box_cox(-math.log(mp), fit.gamma_hat)
