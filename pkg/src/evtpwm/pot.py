"""Peaks-over-threshold PWM estimators (Hosking and Wallis, 1987).

The threshold is the order statistic ``X_{n-k,n}``; ``P_n`` and ``Q_n`` are
plain and linearly weighted means of the ``k`` excesses over it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateExcesses, DomainError, ExtrapolationDomain, NonIdentifiable
from .evtmath import box_cox

__all__ = ["PotSample", "PotFit", "pot_pq", "pot_fit", "pot_quantile"]


@dataclass(frozen=True, eq=False)
class PotSample:
    values: np.ndarray
    n: int
    k: int

    @classmethod
    def from_values(cls, values, k: int) -> PotSample:
        arr = np.asarray(values, dtype=float).ravel()
        if not np.all(np.isfinite(arr)):
            raise DomainError("sample contains non-finite values")
        n = arr.size
        if int(k) != k or not 1 <= k < n:
            raise DomainError(f"need 1 <= k < n, got k={k}, n={n}")
        arr = np.sort(arr, kind="stable")
        arr.setflags(write=False)
        return cls(arr, n, int(k))

    @property
    def threshold(self) -> float:
        return float(self.values[self.n - self.k - 1])

    def excesses(self) -> np.ndarray:
        """Excesses ``X_{n-i,n} - X_{n-k,n}`` for ``i = 0..k-1`` (largest first)."""
        top = self.values[self.n - self.k:][::-1]
        return top - self.threshold


@dataclass(frozen=True)
class PotFit:
    gamma_hat: float
    a_hat: float
    threshold: float
    k: int
    n: int


def pot_pq(sample: PotSample) -> tuple[float, float]:
    """Return ``(P_n, Q_n)``."""
    k = sample.k
    if k < 2:
        raise DomainError(f"pot_pq needs k >= 2, got {k}")
    e = sample.excesses()
    if not np.any(e > 0):
        raise DegenerateExcesses("all top-k observations equal the threshold")
    i = np.arange(k, dtype=float)
    return float(e.mean()), float(np.dot(i / k, e) / k)


def pot_fit(sample: PotSample) -> PotFit:
    p, q = pot_pq(sample)
    if not q > 0:
        raise NonIdentifiable("Q_n = 0: only the largest excess is positive")
    ratio = p / (2.0 * q)
    if not ratio > 1.0:
        raise NonIdentifiable(f"P/(2Q) = {ratio} must exceed 1")
    inv = 1.0 / (ratio - 1.0)
    return PotFit(1.0 - inv, p * inv, sample.threshold, sample.k, sample.n)


def pot_quantile(fit: PotFit, p: float) -> float:
    """Estimate of the ``1 - p`` quantile, valid for ``0 < p <= k/n``.

    At ``p = k/n`` the extrapolation term vanishes and the threshold is
    returned.
    """
    if not 0.0 < p <= fit.k / fit.n:
        raise ExtrapolationDomain(f"need 0 < p <= k/n = {fit.k / fit.n}, got {p}")
    if p == fit.k / fit.n:
        return fit.threshold
    log_t = math.log(fit.k) - math.log(fit.n * p)
    return fit.threshold + fit.a_hat * box_cox(log_t, fit.gamma_hat)
