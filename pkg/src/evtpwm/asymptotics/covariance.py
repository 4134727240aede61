"""Covariance of the Gaussian limits Q_r of the normalized PWM statistics.

With ``E`` a Brownian bridge,

    Cov(Q_r, Q_m) = (r+1)(m+1) ∫∫ s^{r-1} u^{m-1} (-log s)^{-1-γ} (-log u)^{-1-γ}
                    (min(s, u) - su) ds du.

Splitting the square on the diagonal leaves two iterated integrals.  After
``s = e^{-t}`` each inner integral is an upper incomplete gamma function
with shape ``-γ``,

    ∫_0^u s^r (-log s)^{-1-γ} ds = (r+1)^γ Γ(-γ, (r+1)(-log u)),

so only the outer integral is done by adaptive quadrature, on the
``x = -log u`` axis.
"""

from __future__ import annotations

import functools
import math
import os
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from ..errors import DomainError, QuadratureError
from ..evtmath import gamma1p_m1

__all__ = ["CovQ", "cov_q", "quad_tol", "upper_gamma"]

DEFAULT_QUAD_TOL = 1e-8
_SMALL_SHAPE = 1e-3


def quad_tol() -> float:
    """Quadrature tolerance, overridable through ``EVT_QUAD_TOL``."""
    raw = os.environ.get("EVT_QUAD_TOL")
    if not raw:
        return DEFAULT_QUAD_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise DomainError(f"EVT_QUAD_TOL={raw!r} is not a number") from None
    if not tol > 0:
        raise DomainError(f"EVT_QUAD_TOL must be positive, got {tol}")
    return tol


@dataclass(frozen=True, eq=False)
class CovQ:
    gamma: float
    matrix: np.ndarray
    tol: float


def _upper_gamma_small_shape(a: float, y: float) -> float:
    if y <= 1.0:
        # Γ(a) - γ(a, y) with the O(1/a) parts of both combined analytically
        head = (gamma1p_m1(a) - math.expm1(a * math.log(y))) / a
        tail, term, n = 0.0, 1.0, 0
        while True:
            n += 1
            term *= -y / n
            add = term * y**a / (a + n)
            tail += add
            if abs(add) < 1e-18:
                break
        return head - tail
    # Lentz continued fraction, converges fast for y > 1
    tiny = 1e-300
    b = y + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        d = tiny if abs(d) < tiny else d
        c = b + an / c
        c = tiny if abs(c) < tiny else c
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(-y + a * math.log(y)) * h


def upper_gamma(a: float, y: float) -> float:
    """Upper incomplete gamma ``Γ(a, y) = ∫_y^∞ t^{a-1} e^{-t} dt`` for ``a > -1``, ``y > 0``."""
    if a == 0.0:
        return float(special.exp1(y))
    if abs(a) < _SMALL_SHAPE:
        return _upper_gamma_small_shape(a, y)
    if a > 0:
        return float(special.gammaincc(a, y) * special.gamma(a))
    # Γ(a, y) = (Γ(a + 1, y) - y^a e^{-y}) / a
    return float((special.gammaincc(a + 1.0, y) * special.gamma(a + 1.0) - math.exp(a * math.log(y) - y)) / a)


def _outer(r: int, m: int, gamma: float, tol: float) -> tuple[float, float]:
    """∫_0^∞ e^{-mx} (1 - e^{-x}) x^{-1-γ} (r+1)^γ Γ(-γ, (r+1)x) dx and its error."""
    c = (r + 1) ** gamma

    def f(x):
        if x == 0.0:
            return 0.0
        return math.exp(-m * x) * -math.expm1(-x) * x ** (-1.0 - gamma) * c * upper_gamma(-gamma, (r + 1) * x)

    # x = w^p flattens the x^{-2γ} (or log) endpoint behaviour at 0
    p = max(1.0 / (1.0 - 2.0 * max(gamma, 0.0)), 2.0)

    def near(w):
        x = w**p
        if x < 1e-200:
            # f(x) ~ x^{-2γ}/γ; only matters when p > 2, i.e. γ > 1/4
            return p / gamma * w ** (p * (1.0 - 2.0 * gamma) - 1.0) if gamma > 0.25 else 0.0
        return f(x) * p * w ** (p - 1.0)

    opts = dict(epsabs=tol * 1e-2, epsrel=1e-12, limit=400)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        v1, e1 = integrate.quad(near, 0.0, 1.0, **opts)
        v2, e2 = integrate.quad(f, 1.0, np.inf, **opts)
    return v1 + v2, e1 + e2


@functools.lru_cache(maxsize=1024)
def _cov_q_cached(gamma: float, tol: float) -> CovQ:
    mat = np.empty((4, 4))
    worst = 0.0
    for r in range(4):
        for m in range(r, 4):
            a, ea = _outer(r, m, gamma, tol)
            b, eb = _outer(m, r, gamma, tol)
            w = (r + 1) * (m + 1)
            mat[r, m] = mat[m, r] = w * (a + b)
            worst = max(worst, w * (ea + eb))
    if not np.all(np.isfinite(mat)) or worst > tol:
        raise QuadratureError(f"cov_q({gamma}) reached only {worst:.3g} (tolerance {tol:.3g})")
    mat.setflags(write=False)
    return CovQ(gamma, mat, worst)


def cov_q(gamma: float, tol: float | None = None) -> CovQ:
    """Covariance matrix of ``(Q_0, ..., Q_3)`` without the bias part.

    Results are memoized per ``(gamma, tol)``.

    Raises:
        DomainError: if ``gamma >= 0.5`` (the variances diverge).
        QuadratureError: if the estimated error exceeds ``tol``.
    """
    if not gamma < 0.5:
        raise DomainError(f"cov_q requires gamma < 0.5, got {gamma}")
    if gamma < -5:
        raise DomainError(f"cov_q is only supported for gamma >= -5, got {gamma}")
    # subnormal shapes break the incomplete gamma series; the snap moves entries by < 1e-14
    g = 0.0 if abs(gamma) < 1e-15 else float(gamma)
    return _cov_q_cached(g, float(quad_tol() if tol is None else tol))
