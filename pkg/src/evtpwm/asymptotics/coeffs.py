"""Linear representations of the BM-PWM limit laws in terms of Q_0, Q_1, Q_2.

For every target the limit is ``c · (k0 Q_0 + k1 Q_1 + k2 Q_2)``.  The
coefficients come from linearizing the estimator map

    (β₀, β₁, β₂) -> (γ̂, â, b̂, x̂)

at the exact GEV model.  All expressions are arranged so that the γ → 0
limits are reached without cancellation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from ..errors import DomainError
from ..evtmath import BRANCH_TOL, EULER, gamma_derivs_at, one_minus_gamma_over

__all__ = ["Target", "LimitCoeffs", "bm_limit_coeffs"]

_LOG2 = math.log(2.0)
_LOG3 = math.log(3.0)
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)
_GL_T = 0.5 * (_GL_NODES + 1.0)
_GL_W = 0.5 * _GL_WEIGHTS


class Target(enum.Enum):
    GAMMA = "gamma"
    SCALE = "scale"
    LOCATION = "location"
    QUANTILE = "quantile"


@dataclass(frozen=True)
class LimitCoeffs:
    target: Target
    c: float
    k0: float
    k1: float
    k2: float

    @property
    def k(self) -> np.ndarray:
        return np.array([self.k0, self.k1, self.k2])


def _recip_minus(z: float) -> float:
    # 1/z - 1/(1 - e^{-z}); the two poles cancel, so use the series near 0
    if abs(z) < 1e-2:
        z2 = z * z
        return -0.5 - z / 12.0 + z * z2 / 720.0 - z * z2 * z2 / 30240.0
    return 1.0 / z + 1.0 / math.expm1(-z)


def _z_over_expm1(z: float) -> float:
    if abs(z) < BRANCH_TOL:
        return 1.0 - 0.5 * z
    return z / math.expm1(z)


def _gamma_dd(x: np.ndarray) -> np.ndarray:
    psi = special.digamma(x)
    return special.gamma(x) * (psi * psi + special.polygamma(1, x))


def _gamma_parts(g: float) -> dict[str, float]:
    if abs(g) < BRANCH_TOL:
        _, g2 = gamma_derivs_at(1.0)
        ln32 = _LOG3 - _LOG2
        return dict(
            c_gamma=2.0 / ln32,
            k_gamma=(1.0 / _LOG2 - 1.0 / _LOG3, -1.0 / _LOG2, 1.0 / _LOG3),
            c_a=-0.5 * _LOG2 - EULER,
            c_b=-0.5 * g2,
            h=1.0 / _LOG2,
            u=-EULER,
        )
    gam = special.gamma(1.0 - g)
    spread = _LOG2 * _recip_minus(g * _LOG2) - _LOG3 * _recip_minus(g * _LOG3)
    k1 = -_z_over_expm1(g * _LOG2) / _LOG2
    k2 = _z_over_expm1(g * _LOG3) / _LOG3
    k0 = g * math.exp(g * _LOG2) * math.expm1(g * (_LOG3 - _LOG2)) / (math.expm1(g * _LOG3) * math.expm1(g * _LOG2))
    # (γΓ'(1-γ) - 1 + Γ(1-γ))/γ² = -∫_0^1 t Γ''(1 - tγ) dt
    c_b = -float(np.dot(_GL_W, _GL_T * _gamma_dd(1.0 - g * _GL_T)))
    return dict(
        c_gamma=1.0 / (gam * spread),
        k_gamma=(k0, k1, k2),
        c_a=_LOG2 * _recip_minus(g * _LOG2) + special.digamma(1.0 - g),
        c_b=c_b,
        h=-k1 / gam,
        u=one_minus_gamma_over(g),
    )


def bm_limit_coeffs(gamma: float, target: Target) -> LimitCoeffs:
    """Coefficients of the BM-PWM limit for ``target`` at extreme value index ``gamma``.

    Scale and location limits are ``Λ = h·(Q₁ - Q₀) + C_a·Δ`` and
    ``Ξ = Q₀ + C_b·Δ + u·Λ`` with ``Δ`` the γ̂ limit, ``h = γ/((2^γ-1)Γ(1-γ))``
    and ``u = (1 - Γ(1-γ))/γ``.  The quantile limit is
    ``Δ + γ₋²Ξ - γ₋Λ`` with ``γ₋ = min(0, γ)``.
    """
    if not gamma < 0.5:
        raise DomainError(f"bm_limit_coeffs requires gamma < 0.5, got {gamma}")
    target = Target(target)
    parts = _gamma_parts(gamma)
    cg = parts["c_gamma"]
    kg = np.array(parts["k_gamma"])
    if target is Target.GAMMA:
        return LimitCoeffs(target, cg, *map(float, kg))
    delta = cg * kg
    k_a = parts["c_a"] * delta + parts["h"] * np.array([-1.0, 1.0, 0.0])
    if target is Target.SCALE:
        return LimitCoeffs(target, 1.0, *map(float, k_a))
    k_b = np.array([1.0, 0.0, 0.0]) + parts["c_b"] * delta + parts["u"] * k_a
    if target is Target.LOCATION:
        return LimitCoeffs(target, 1.0, *map(float, k_b))
    gm = min(0.0, gamma)
    k_x = delta + gm * gm * k_b - gm * k_a
    return LimitCoeffs(target, 1.0, *map(float, k_x))
