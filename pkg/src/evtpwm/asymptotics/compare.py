"""Asymptotic BM versus POT comparison metrics."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from ..errors import DomainError
from ..evtmath import BRANCH_TOL, SecondOrderParams, i_r
from .coeffs import Target, bm_limit_coeffs
from .covariance import cov_q
from .pot import DEFAULT_POT_PROVIDER, PotAsymptoticsProvider

__all__ = [
    "Method",
    "AsympSummary",
    "bm_asymp",
    "pot_asymp",
    "minmse_ratio",
    "minmse_ratio_from",
    "k0_ratio",
    "k0_ratio_from",
    "RHO_CAVEAT",
]

# at ρ = -1 the BM bias may pick up a competing term of the same order
RHO_CAVEAT = -1.0


class Method(enum.Enum):
    BM = "bm"
    POT = "pot"


@dataclass(frozen=True)
class AsympSummary:
    method: Method
    target: Target
    sigma2: float
    unit_bias: float

    def __post_init__(self):
        if not self.sigma2 >= 0:
            raise DomainError(f"negative asymptotic variance {self.sigma2}")


def bm_asymp(p: SecondOrderParams, target: Target) -> AsympSummary:
    """Asymptotic variance and unit bias of a BM-PWM estimator.

    Raises:
        DomainError: outside the comparison box, or at the quantile pole
            ``γ₋ + ρ = 0``.
    """
    p.check_comparison_range()
    target = Target(target)
    # for γ >= 0 the quantile limit is exactly Δ
    reduce = target is Target.QUANTILE and p.gamma >= 0
    co = bm_limit_coeffs(p.gamma, Target.GAMMA if reduce else target)
    k = co.k
    sigma = cov_q(p.gamma).matrix[:3, :3]
    sigma2 = co.c**2 * float(k @ sigma @ k)
    bias = co.c * sum(k[r] * i_r(r, p) for r in range(3))
    if target is Target.QUANTILE:
        gm = min(0.0, p.gamma)
        if abs(gm + p.rho) < BRANCH_TOL:
            raise DomainError("quantile bias has a pole at gamma_- + rho = 0")
        bias -= gm / (gm + p.rho)
    return AsympSummary(Method.BM, target, max(sigma2, 0.0), float(bias))


def pot_asymp(
    p: SecondOrderParams, target: Target, provider: PotAsymptoticsProvider | None = None
) -> AsympSummary:
    """Asymptotic variance and unit bias of a POT-PWM estimator (gamma or quantile target)."""
    p.check_comparison_range()
    target = Target(target)
    prov = DEFAULT_POT_PROVIDER if provider is None else provider
    return AsympSummary(Method.POT, target, prov.sigma2(p.gamma, target), prov.unit_bias(p, target))


def _check_rho(rho: float) -> None:
    if not rho < 0:
        raise DomainError(f"the MSE trade-off needs rho < 0, got {rho}")


def minmse_ratio_from(s1: float, b1sq: float, s2: float, b2sq: float, rho: float) -> float:
    """``(B₁²/B₂²)^{1/(1-2ρ)} (σ₁²/σ₂²)^{-2ρ/(1-2ρ)}``."""
    _check_rho(rho)
    if not (b2sq > 0 and s1 > 0 and s2 > 0):
        raise DomainError("MINMSE ratio needs positive variances and a nonzero POT bias")
    e = 1.0 - 2.0 * rho
    return (b1sq / b2sq) ** (1.0 / e) * (s1 / s2) ** (-2.0 * rho / e)


def k0_ratio_from(s1: float, b1sq: float, s2: float, b2sq: float, rho: float) -> float:
    """``((σ₁²/B₁²) / (σ₂²/B₂²))^{1/(1-2ρ)}``."""
    _check_rho(rho)
    if not (b1sq > 0 and b2sq > 0):
        raise DomainError("optimal-k ratio needs nonzero biases")
    return ((s1 / b1sq) / (s2 / b2sq)) ** (1.0 / (1.0 - 2.0 * rho))


def _pair(p: SecondOrderParams, target: Target, provider) -> tuple[AsympSummary, AsympSummary]:
    _check_rho(p.rho)
    return bm_asymp(p, target), pot_asymp(p, target, provider)


def minmse_ratio(
    p: SecondOrderParams, target: Target = Target.GAMMA, provider: PotAsymptoticsProvider | None = None
) -> float:
    """MINMSE(BM)/MINMSE(POT); a function of (γ, ρ) only."""
    bm, pot = _pair(p, target, provider)
    return minmse_ratio_from(bm.sigma2, bm.unit_bias**2, pot.sigma2, pot.unit_bias**2, p.rho)


def k0_ratio(
    p: SecondOrderParams, target: Target = Target.GAMMA, provider: PotAsymptoticsProvider | None = None
) -> float:
    """Ratio of the optimal numbers of blocks and of upper order statistics."""
    bm, pot = _pair(p, target, provider)
    return k0_ratio_from(bm.sigma2, bm.unit_bias**2, pot.sigma2, pot.unit_bias**2, p.rho)

