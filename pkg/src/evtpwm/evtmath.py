"""Special functions and the analytic functionals of the block maxima theory.

Everything here is scalar and pure except :func:`gev_cdf` and
:func:`gev_quantile`, which broadcast over numpy arrays.  Expressions of the
form ``(x**c - 1) / c`` are evaluated through ``expm1`` and switch to their
continuity limits when ``|c|`` falls below :data:`BRANCH_TOL`.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError

__all__ = [
    "BRANCH_TOL",
    "EULER",
    "BranchKind",
    "EvalBranch",
    "SecondOrderParams",
    "select_branch",
    "box_cox",
    "gamma_fn",
    "gamma_derivs_at",
    "gamma1p_m1",
    "one_minus_gamma_over",
    "h_gamma_rho",
    "d_r",
    "d_r_prime",
    "i_r",
    "q_gamma",
    "gev_cdf",
    "gev_quantile",
]

BRANCH_TOL = 1e-8
EULER = float(np.euler_gamma)
_ZETA = [float(special.zeta(j)) for j in range(2, 14)]

# comparison box used by every asymptotic BM/POT comparison
GAMMA_RANGE = (-1.0, 0.5)
RHO_RANGE = (-1.0, 0.0)


class BranchKind(enum.Enum):
    GENERAL = "general"
    GAMMA_ZERO = "gamma_zero"
    RHO_ZERO = "rho_zero"
    BOTH_ZERO = "both_zero"


@dataclass(frozen=True)
class EvalBranch:
    kind: BranchKind
    threshold: float = BRANCH_TOL

    def __post_init__(self):
        if not 0.0 < self.threshold <= 1e-6:
            raise DomainError(f"branch threshold must lie in (0, 1e-6], got {self.threshold}")


def select_branch(gamma: float, rho: float, threshold: float = BRANCH_TOL) -> EvalBranch:
    """Pick the evaluation branch for a ``(gamma, rho)`` pair."""
    g0 = abs(gamma) < threshold
    r0 = abs(rho) < threshold
    if g0 and r0:
        kind = BranchKind.BOTH_ZERO
    elif g0:
        kind = BranchKind.GAMMA_ZERO
    elif r0:
        kind = BranchKind.RHO_ZERO
    else:
        kind = BranchKind.GENERAL
    return EvalBranch(kind, threshold)


@dataclass(frozen=True)
class SecondOrderParams:
    """Extreme value index, second-order index and bias scale.

    Attributes:
        gamma: extreme value index γ.
        rho: second-order index ρ ≤ 0.
        lam: λ, the limit of √k·A(m); only scales biases.
    """

    gamma: float
    rho: float
    lam: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and math.isfinite(self.rho)):
            raise DomainError("gamma and rho must be finite")
        if self.rho > 0:
            raise DomainError(f"rho must be <= 0, got {self.rho}")

    def check_comparison_range(self) -> None:
        """Raise unless ``gamma ∈ [-1, 0.5)`` and ``rho ∈ [-1, 0]``."""
        lo, hi = GAMMA_RANGE
        if not lo <= self.gamma < hi:
            raise DomainError(f"gamma={self.gamma} outside the comparison range [-1, 0.5)")
        if not RHO_RANGE[0] <= self.rho <= RHO_RANGE[1]:
            raise DomainError(f"rho={self.rho} outside the comparison range [-1, 0]")


def box_cox(log_x: float, c: float) -> float:
    """``(x**c - 1) / c`` given ``log x``; ``log x`` at ``c = 0``."""
    if abs(c) < BRANCH_TOL:
        return log_x
    return math.expm1(c * log_x) / c


def gamma_fn(x: float) -> float:
    if not x > 0:
        raise DomainError(f"gamma_fn requires x > 0, got {x}")
    return float(special.gamma(x))


def gamma_derivs_at(x: float) -> tuple[float, float]:
    """Return ``(Γ'(x), Γ''(x))`` through the digamma and trigamma functions."""
    if not x > 0:
        raise DomainError(f"gamma_derivs_at requires x > 0, got {x}")
    g = special.gamma(x)
    psi = special.digamma(x)
    psi1 = special.polygamma(1, x)
    return float(g * psi), float(g * (psi * psi + psi1))


def gamma1p_m1(a: float) -> float:
    """``Γ(1 + a) - 1`` without cancellation near ``a = 0``."""
    if abs(a) >= 1e-2:
        return math.expm1(special.gammaln(1.0 + a)) if a > -1 else float(special.gamma(1.0 + a)) - 1.0
    lg = -EULER * a
    ak = -a
    for j, z in enumerate(_ZETA, start=2):
        ak *= -a
        lg += z * ak / j
    return math.expm1(lg)


def one_minus_gamma_over(g: float) -> float:
    """``(1 - Γ(1 - g)) / g``, equal to ``-Γ'(1)`` at ``g = 0``."""
    if abs(g) < BRANCH_TOL:
        return -EULER
    return -gamma1p_m1(-g) / g


def h_gamma_rho(x: float, p: SecondOrderParams) -> float:
    """Second-order limit function ``∫_1^x s^{γ-1} ∫_1^s u^{ρ-1} du ds``."""
    if not x > 0:
        raise DomainError(f"h_gamma_rho requires x > 0, got {x}")
    lx = math.log(x)
    g, r = p.gamma, p.rho
    kind = select_branch(g, r).kind
    if kind is BranchKind.BOTH_ZERO:
        return 0.5 * lx * lx
    if kind is BranchKind.RHO_ZERO:
        return (math.exp(g * lx) * lx - box_cox(lx, g)) / g
    if kind is BranchKind.GAMMA_ZERO:
        return (box_cox(lx, r) - lx) / r
    # box_cox covers the interior γ + ρ = 0 degeneracy (ratio becomes log x)
    return (box_cox(lx, g + r) - box_cox(lx, g)) / r


_SERIES_XI = 0.05
_SERIES_TERMS = 24
_ZETA_LONG = [0.0, 0.0] + [float(special.zeta(j)) for j in range(2, _SERIES_TERMS + 3)]


@functools.lru_cache(maxsize=32)
def _exp_phi_coeffs(lr: float) -> tuple[float, ...]:
    # Maclaurin coefficients of (r+1)^ξ Γ(1-ξ) = exp(ξ(L + γ_E) + Σ ζ(j) ξ^j / j)
    n_terms = _SERIES_TERMS + 2
    phi = [0.0, lr + EULER] + [_ZETA_LONG[j] / j for j in range(2, n_terms + 1)]
    c = [1.0] + [0.0] * n_terms
    for n in range(1, n_terms + 1):
        c[n] = sum(j * phi[j] * c[n - j] for j in range(1, n + 1)) / n
    return tuple(c)


def d_r(r: int, xi: float) -> float:
    """``((r+1)^ξ Γ(1-ξ) - 1) / ξ``, with value ``log(r+1) - Γ'(1)`` at ξ = 0."""
    if r < 0:
        raise DomainError(f"r must be a non-negative integer, got {r}")
    if not xi < 1:
        raise DomainError(f"d_r requires xi < 1, got {xi}")
    lr = math.log(r + 1)
    if abs(xi) < BRANCH_TOL:
        return lr + EULER
    if abs(xi) < _SERIES_XI:
        c = _exp_phi_coeffs(lr)
        return sum(c[n + 1] * xi**n for n in range(_SERIES_TERMS, -1, -1))
    return math.expm1(xi * lr + special.gammaln(1.0 - xi)) / xi


def d_r_prime(r: int, xi: float) -> float:
    """Derivative of :func:`d_r` in ξ (closed form, no differencing).

    Near ξ = 0 the closed form cancels badly, so a power series is used there.
    """
    if not xi < 1:
        raise DomainError(f"d_r_prime requires xi < 1, got {xi}")
    lr = math.log(r + 1)
    if abs(xi) < _SERIES_XI:
        # at ξ = 0 this is ½(L² + Γ''(1) - 2LΓ'(1)) with L = log(r+1)
        c = _exp_phi_coeffs(lr)
        return sum(n * c[n + 1] * xi ** (n - 1) for n in range(_SERIES_TERMS, 0, -1))
    gam = special.gamma(1.0 - xi)
    dgam = gam * special.digamma(1.0 - xi)
    scale = math.exp(xi * lr)
    return scale / xi * (-dgam + lr * gam - d_r(r, xi) / scale)


def i_r(r: int, p: SecondOrderParams) -> float:
    """Bias functional ``(r+1) ∫_0^1 s^r H(1/(-log s)) ds`` of the r-th PWM."""
    g, rho = p.gamma, p.rho
    if not (g < 1 and g + rho < 1):
        raise DomainError(f"i_r requires gamma < 1 and gamma + rho < 1, got ({g}, {rho})")
    if abs(rho) < BRANCH_TOL:
        return d_r_prime(r, g)
    return (d_r(r, g + rho) - d_r(r, g)) / rho


def q_gamma(t: float, gamma: float) -> float:
    """``∫_1^t s^{γ-1} log s ds``."""
    if not t >= 1:
        raise DomainError(f"q_gamma requires t >= 1, got {t}")
    lt = math.log(t)
    z = gamma * lt
    if abs(z) < 0.5:
        # ∫_0^L v e^{γv} dv = Σ γ^n L^{n+2} / (n! (n+2))
        total, term, n = 0.0, lt * lt, 0
        while True:
            add = term / (n + 2)
            total += add
            if abs(add) <= 1e-17 * abs(total):
                return total
            n += 1
            term *= z / n
    return (math.exp(z) * (z - 1.0) + 1.0) / (gamma * gamma)


def gev_cdf(x, gamma: float):
    """``G_γ(x) = exp(-(1 + γx)^{-1/γ})``; raises outside the support."""
    x = np.asarray(x, dtype=float)
    if abs(gamma) < BRANCH_TOL:
        out = np.exp(-np.exp(-x))
    else:
        arg = gamma * x
        if np.any(arg <= -1.0):
            raise DomainError("gev_cdf evaluated outside the support 1 + gamma*x > 0")
        out = np.exp(-np.exp(-np.log1p(arg) / gamma))
    return out if out.ndim else float(out)


def gev_quantile(u, gamma: float):
    """Inverse of :func:`gev_cdf` on ``(0, 1)``."""
    u = np.asarray(u, dtype=float)
    if np.any((u <= 0.0) | (u >= 1.0)):
        raise DomainError("gev_quantile requires 0 < u < 1")
    t = np.log(-np.log(u))
    if abs(gamma) < BRANCH_TOL:
        out = -t
    else:
        out = np.expm1(-gamma * t) / gamma
    return out if out.ndim else float(out)
