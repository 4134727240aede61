"""Asymptotic variance and bias of the POT-PWM estimators.

The provider linearizes ``γ̂ = 1 - (P/(2Q) - 1)^{-1}`` and
``â = P (P/(2Q) - 1)^{-1}`` around the generalized Pareto limit.  With the
tail empirical process approximated by a Brownian motion ``W``, the
normalized statistics ``√k(P_n/a - 1/(1-γ))`` and
``√k(Q_n/a - 1/(2(2-γ)))`` converge to Gaussian functionals
``Z_P = ∫_0^1 s^{-γ-1} W(s) ds - W(1)`` and
``Z_Q = ∫_0^1 (1-s) s^{-γ-1} W(s) ds - W(1)/2``, while the threshold
contributes ``W(1)``.  Their covariances are closed form.  The resulting γ
variance is the Hosking and Wallis (1987) formula

    (1-γ)(2-γ)²(1-γ+2γ²) / ((1-2γ)(3-2γ)),

and the bias terms follow from the second-order expansion of the tail
quantile process, with the scale referenced to ``a0(t) = a(t)(1 - A(t)/ρ)``
by default.
"""

from __future__ import annotations

from typing import Protocol

import numpy as np

from ..errors import DomainError
from ..evtmath import BRANCH_TOL, SecondOrderParams
from .coeffs import Target

__all__ = ["PotAsymptoticsProvider", "PwmPotAsymptotics", "DEFAULT_POT_PROVIDER", "hosking_wallis_gamma_var"]


class PotAsymptoticsProvider(Protocol):
    """Source of the POT asymptotic variance and unit bias."""

    name: str

    def sigma2(self, gamma: float, target: Target) -> float: ...

    def unit_bias(self, p: SecondOrderParams, target: Target) -> float: ...


def _stat_cov(g: float) -> np.ndarray:
    """Covariance of ``(Z_P, Z_Q, W(1))``."""
    vp = 1.0 + 4.0 * g / ((1.0 - g) * (1.0 - 2.0 * g))
    vq = 2.0 / ((2.0 - g) * (3.0 - 2.0 * g)) - 1.0 / (2.0 - g) + 0.25
    cpq = (3.0 - 2.0 * g) / (2.0 * (1.0 - g) ** 2 * (2.0 - g)) - 1.0 / (2.0 * (1.0 - g)) - 1.0 / (2.0 - g) + 0.5
    cpw = g / (1.0 - g)
    cqw = g / (2.0 * (2.0 - g))
    return np.array([[vp, cpq, cpw], [cpq, vq, cqw], [cpw, cqw, 1.0]])


def _forms(g: float) -> dict[str, np.ndarray]:
    """Limits of γ̂, â/a and the threshold as linear forms in ``(Z_P, Z_Q, W(1))``."""
    delta = (1.0 - g) * (2.0 - g) * np.array([1.0 - g, -2.0 * (2.0 - g), 0.0])
    lam = np.array([1.0 - g, 0.0, 0.0]) - delta / (1.0 - g)
    xi = np.array([0.0, 0.0, 1.0])
    return {"delta": delta, "lam": lam, "xi": xi}


def _stat_bias(p: SecondOrderParams) -> np.ndarray:
    g, r = p.gamma, p.rho
    return np.array([1.0 / ((1.0 - g) * (1.0 - g - r)), 1.0 / (2.0 * (2.0 - g) * (2.0 - g - r)), 0.0])


def hosking_wallis_gamma_var(g: float) -> float:
    """Closed form asymptotic variance of the POT-PWM index estimator."""
    return (1 - g) * (2 - g) ** 2 * (1 - g + 2 * g * g) / ((1 - 2 * g) * (3 - 2 * g))


class PwmPotAsymptotics:
    """Hosking–Wallis variance with second-order bias terms.

    Args:
        scale_reference: ``"a0"`` (default) measures ``â`` against
            ``a0(t) = a(t)(1 - A(t)/ρ)``, the second-order scale for which the
            tail expansion of the excess quantile has no first-order term in
            ``A``; ``"a"`` uses ``a(t)`` itself.  The choice only affects the
            quantile bias when ``γ < 0``.
    """

    def __init__(self, scale_reference: str = "a0"):
        if scale_reference not in ("a0", "a"):
            raise ValueError(f"scale_reference must be 'a0' or 'a', got {scale_reference!r}")
        self.scale_reference = scale_reference
        self.name = f"pwm-pot/{scale_reference}"

    def _form(self, g: float, target: Target) -> np.ndarray:
        f = _forms(g)
        if target is Target.GAMMA:
            return f["delta"]
        if target is Target.QUANTILE:
            gm = min(0.0, g)
            return f["delta"] + gm * gm * f["xi"] - gm * f["lam"]
        raise DomainError(f"POT asymptotics cover the gamma and quantile targets, not {target.value}")

    def sigma2(self, gamma: float, target: Target) -> float:
        if not gamma < 0.5:
            raise DomainError(f"POT variance requires gamma < 0.5, got {gamma}")
        target = Target(target)
        if target is Target.GAMMA:
            return hosking_wallis_gamma_var(gamma)
        k = self._form(gamma, target)
        return float(k @ _stat_cov(gamma) @ k)

    def unit_bias(self, p: SecondOrderParams, target: Target) -> float:
        g, r = p.gamma, p.rho
        if not g < 0.5:
            raise DomainError(f"POT bias requires gamma < 0.5, got {g}")
        target = Target(target)
        b = _stat_bias(p)
        out = float(self._form(g, target) @ b)
        if target is Target.QUANTILE:
            gm = min(0.0, g)
            if abs(gm + r) < BRANCH_TOL:
                raise DomainError("quantile bias has a pole at gamma_- + rho = 0")
            if gm != 0.0 and self.scale_reference == "a0":
                if abs(r) < BRANCH_TOL:
                    raise DomainError("POT quantile bias has a pole at rho = 0 for gamma < 0")
                out -= gm / r
            out -= gm / (gm + r)
        return out


DEFAULT_POT_PROVIDER = PwmPotAsymptotics()

