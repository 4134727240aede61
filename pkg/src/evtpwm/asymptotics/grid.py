"""Plot-ready (γ, ρ) grids of the comparison metrics."""

from __future__ import annotations

import enum
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

from ..csvio import format_float
from ..errors import DomainError
from ..evtmath import GAMMA_RANGE, RHO_RANGE, SecondOrderParams
from .coeffs import Target
from .compare import RHO_CAVEAT, bm_asymp, k0_ratio, minmse_ratio, pot_asymp
from .pot import PotAsymptoticsProvider

__all__ = ["Metric", "GridRow", "grid_axis", "grid_eval", "write_grid_csv"]

DEFAULT_GAMMA_STEP = 0.01
DEFAULT_RHO_STEP = 0.02


class Metric(enum.Enum):
    VAR_BM = "var-bm"
    VAR_POT = "var-pot"
    VAR_RATIO = "var-ratio"
    BIAS_BM = "bias-bm"
    BIAS_POT = "bias-pot"
    BIAS_RATIO = "bias-ratio"
    MINMSE_RATIO = "minmse-ratio"
    K0_RATIO = "k0-ratio"


@dataclass(frozen=True)
class GridRow:
    gamma: float
    rho: float
    value: float
    flag: str = ""


def grid_axis(lo: float, hi: float, step: float) -> np.ndarray:
    """Points ``lo, lo + step, ...`` up to ``hi`` inclusive, snapped to 12 decimals."""
    if not step > 0:
        raise DomainError(f"step must be positive, got {step}")
    if not hi >= lo:
        raise DomainError(f"empty range [{lo}, {hi}]")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    pts = np.round(lo + step * np.arange(n), 12)
    return pts + 0.0  # drop negative zeros


def _value(metric: Metric, target: Target, p: SecondOrderParams, provider) -> float:
    if metric is Metric.VAR_BM:
        return bm_asymp(p, target).sigma2
    if metric is Metric.VAR_POT:
        return pot_asymp(p, target, provider).sigma2
    if metric is Metric.VAR_RATIO:
        return bm_asymp(p, target).sigma2 / pot_asymp(p, target, provider).sigma2
    if metric is Metric.BIAS_BM:
        return bm_asymp(p, target).unit_bias
    if metric is Metric.BIAS_POT:
        return pot_asymp(p, target, provider).unit_bias
    if metric is Metric.BIAS_RATIO:
        b2 = pot_asymp(p, target, provider).unit_bias
        if b2 == 0.0:
            raise DomainError("POT bias vanishes")
        return bm_asymp(p, target).unit_bias / b2
    if metric is Metric.MINMSE_RATIO:
        return minmse_ratio(p, target, provider)
    return k0_ratio(p, target, provider)


def _cell(metric, target, g, r, provider) -> GridRow:
    flags = []
    try:
        v = float(_value(metric, target, SecondOrderParams(float(g), float(r)), provider))
    except DomainError:
        v = math.nan
        flags.append("pole")
    if r == RHO_CAVEAT:
        flags.append("rho_caveat")
    return GridRow(float(g), float(r), v, ";".join(flags))


def grid_eval(
    metric: Metric,
    target: Target = Target.GAMMA,
    gamma_range: tuple[float, float] = (-1.0, 0.45),
    rho_range: tuple[float, float] = (-1.0, 0.0),
    gamma_step: float = DEFAULT_GAMMA_STEP,
    rho_step: float = DEFAULT_RHO_STEP,
    provider: PotAsymptoticsProvider | None = None,
    workers: int = 1,
) -> list[GridRow]:
    """Evaluate ``metric`` on a row-major grid (γ outer, ρ inner).

    Cells sitting on a pole of the metric hold NaN with flag ``pole``; cells
    at ``ρ = -1`` carry the flag ``rho_caveat``.  The output does not depend
    on ``workers``.
    """
    metric, target = Metric(metric), Target(target)
    g_lo, g_hi = gamma_range
    r_lo, r_hi = rho_range
    if not (GAMMA_RANGE[0] <= g_lo and g_hi < GAMMA_RANGE[1]):
        raise DomainError(f"gamma range {gamma_range} leaves the comparison box [-1, 0.5)")
    if not (RHO_RANGE[0] <= r_lo and r_hi <= RHO_RANGE[1]):
        raise DomainError(f"rho range {rho_range} leaves the comparison box [-1, 0]")
    gammas = grid_axis(g_lo, g_hi, gamma_step)
    rhos = grid_axis(r_lo, r_hi, rho_step)

    def column(g):
        return [_cell(metric, target, g, r, provider) for r in rhos]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            cols = list(ex.map(column, gammas))
    else:
        cols = [column(g) for g in gammas]
    return [row for col in cols for row in col]


def write_grid_csv(rows: Iterable[GridRow], fh: TextIO | None = None) -> str | None:
    """Write ``gamma,rho,value,flag`` rows; returns the text when ``fh`` is None."""
    out = io.StringIO() if fh is None else fh
    out.write("gamma,rho,value,flag\n")
    for r in rows:
        out.write(f"{format_float(r.gamma)},{format_float(r.rho)},{format_float(r.value)},{r.flag}\n")
    return out.getvalue() if fh is None else None
