"""Samplers with known (γ, ρ) and a deterministic Monte Carlo harness.

Every family is sampled by inversion on the scale ``s = -log F(x)``, which
keeps block maxima exact and cheap: the maximum of ``m`` iid draws has
``-log F = -log(U)/m`` for a single uniform ``U``.

Family table (``rho_bm`` governs block maxima, ``rho_pot`` excesses;
``None`` marks an exact model with ``A ≡ 0``):

============  ================  ==============  ==============
family        γ                 rho_bm          rho_pot
============  ================  ==============  ==============
gev(γ)        γ                 None            -1
gpd(γ)        γ                 -1              None
frechet(α)    1/α               None            -1
uniform       -1                -1              None
exponential   0                 -1              None
burr(β,τ,λ)   1/(λτ)            max(-1/λ, -1)   -1/λ
============  ================  ==============  ==============
"""

from __future__ import annotations

import enum
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bm import BlockMaximaSample, bm_fit, pwm_betas
from .csvio import format_float
from .errors import DegenerateExcesses, DomainError, ExcessiveFailures, ModelBoundary, NonIdentifiable
from .evtmath import BRANCH_TOL, d_r
from .pot import PotSample, pot_fit

__all__ = [
    "Family",
    "DistSpec",
    "Estimand",
    "McConfig",
    "McResult",
    "gev",
    "gpd",
    "frechet",
    "uniform",
    "exponential",
    "burr",
    "uniforms",
    "sample",
    "sample_block_maxima",
    "mc_bm_study",
    "mc_pot_study",
    "write_mc_csv",
    "family_factory",
]

MAX_FAILURE_RATE = 0.05
_FIT_FAILURES = (NonIdentifiable, ModelBoundary, DegenerateExcesses)


class Family(enum.Enum):
    GEV = "gev"
    GPD = "gpd"
    FRECHET = "frechet"
    UNIFORM = "uniform"
    EXPONENTIAL = "exponential"
    BURR = "burr"


@dataclass(frozen=True)
class DistSpec:
    family: Family
    params: tuple[tuple[str, float], ...] = field(default=())
    known_gamma: float = 0.0
    known_rho: float | None = None
    known_rho_pot: float | None = None

    def param(self, name: str) -> float:
        return dict(self.params)[name]

    def describe(self) -> str:
        return " ".join([f"dist={self.family.value}"] + [f"{k}={v!r}" for k, v in self.params])

    def quantile_from_neglog(self, s: np.ndarray) -> np.ndarray:
        """``F^{-1}(exp(-s))`` for ``s > 0``."""
        fam = self.family
        if fam is Family.GEV:
            g = self.known_gamma
            t = -np.log(s)
            return t if abs(g) < BRANCH_TOL else np.expm1(g * t) / g
        if fam is Family.FRECHET:
            return s ** (-1.0 / self.param("alpha"))
        if fam is Family.UNIFORM:
            return np.exp(-s)
        # remaining families are specified through the survival function 1 - F
        log_sf = np.log(-np.expm1(-s))
        if fam is Family.EXPONENTIAL:
            return -log_sf
        if fam is Family.GPD:
            g = self.known_gamma
            return -log_sf if abs(g) < BRANCH_TOL else np.expm1(-g * log_sf) / g
        beta, tau, lam = self.param("beta"), self.param("tau"), self.param("lam")
        return (beta * np.expm1(-log_sf / lam)) ** (1.0 / tau)


def _finite(**kw) -> None:
    for k, v in kw.items():
        if not math.isfinite(v):
            raise DomainError(f"{k} must be finite, got {v}")


def gev(gamma: float) -> DistSpec:
    _finite(gamma=gamma)
    return DistSpec(Family.GEV, (("gamma", float(gamma)),), float(gamma), None, -1.0)


def gpd(gamma: float) -> DistSpec:
    _finite(gamma=gamma)
    return DistSpec(Family.GPD, (("gamma", float(gamma)),), float(gamma), -1.0, None)


def frechet(alpha: float) -> DistSpec:
    _finite(alpha=alpha)
    if not alpha > 0:
        raise DomainError(f"Frechet alpha must be positive, got {alpha}")
    return DistSpec(Family.FRECHET, (("alpha", float(alpha)),), 1.0 / alpha, None, -1.0)


def uniform() -> DistSpec:
    return DistSpec(Family.UNIFORM, (), -1.0, -1.0, None)


def exponential() -> DistSpec:
    return DistSpec(Family.EXPONENTIAL, (), 0.0, -1.0, None)


def burr(beta: float = 1.0, tau: float = 1.0, lam: float = 1.0) -> DistSpec:
    """Burr XII with survival function ``(β / (β + x^τ))^λ``."""
    _finite(beta=beta, tau=tau, lam=lam)
    if not (beta > 0 and tau > 0 and lam > 0):
        raise DomainError("Burr parameters must be positive")
    params = (("beta", float(beta)), ("tau", float(tau)), ("lam", float(lam)))
    return DistSpec(Family.BURR, params, 1.0 / (lam * tau), max(-1.0 / lam, -1.0), -1.0 / lam)


_FACTORIES = {
    Family.GEV: gev,
    Family.GPD: gpd,
    Family.FRECHET: frechet,
    Family.UNIFORM: uniform,
    Family.EXPONENTIAL: exponential,
    Family.BURR: burr,
}


def _rng(seed: int, stream: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(ss))


def uniforms(rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` uniforms strictly inside (0, 1) on the 2^-53 lattice."""
    return (rng.integers(0, 2**53, size=n, dtype=np.uint64) + 0.5) * 2.0**-53


def _check_seed(seed: int) -> None:
    if int(seed) != seed or not 0 <= seed < 2**64:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")


def sample(dist: DistSpec, n: int, stream_seed: int, stream: int = 0) -> np.ndarray:
    """``n`` iid draws from ``dist``; a pure function of ``(stream_seed, stream)``."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    _check_seed(stream_seed)
    u = uniforms(_rng(stream_seed, stream), int(n))
    return dist.quantile_from_neglog(-np.log(u))


def sample_block_maxima(dist: DistSpec, k: int, m: int, stream_seed: int, stream: int = 0) -> np.ndarray:
    """``k`` maxima of blocks of ``m`` iid draws, sampled exactly from ``F^m``."""
    if int(m) != m or m < 1:
        raise DomainError(f"block size must be a positive integer, got {m}")
    if int(k) != k or k < 1:
        raise DomainError(f"k must be a positive integer, got {k}")
    _check_seed(stream_seed)
    u = uniforms(_rng(stream_seed, stream), int(k))
    return dist.quantile_from_neglog(-np.log(u) / m)


class Estimand(enum.Enum):
    GAMMA = "gamma"
    BETAS = "betas"


@dataclass(frozen=True)
class McConfig:
    dist: DistSpec
    k: int
    m: int
    reps: int
    seed: int
    estimand: Estimand = Estimand.GAMMA
    workers: int = 1

    def __post_init__(self):
        if self.reps < 100:
            raise DomainError(f"reps must be at least 100, got {self.reps}")
        if self.k < 10:
            raise DomainError(f"k must be at least 10, got {self.k}")
        if self.m < 1:
            raise DomainError(f"m must be positive, got {self.m}")
        if self.workers < 1:
            raise DomainError(f"workers must be positive, got {self.workers}")
        _check_seed(self.seed)

    def describe(self, method: str) -> str:
        return (
            f"method={method} {self.dist.describe()} k={self.k} m={self.m} reps={self.reps} "
            f"seed={self.seed} estimand={Estimand(self.estimand).value}"
        )


@dataclass(frozen=True, eq=False)
class McResult:
    """Per-replication normalized statistics and their moments.

    ``values`` holds one row per successful replication, in replication
    order; ``reps_ok`` lists the matching replication indices.
    """

    config: McConfig
    method: str
    values: np.ndarray
    reps_ok: np.ndarray
    rep_failures: int

    @property
    def empirical_mean(self):
        return self.values.mean(axis=0)

    @property
    def empirical_var(self):
        return self.values.var(axis=0, ddof=1)

    @property
    def standard_error(self):
        return np.sqrt(self.empirical_var / self.values.shape[0])

    def empirical_cov(self) -> np.ndarray:
        return np.atleast_2d(np.cov(self.values, rowvar=False))


def _run(cfg: McConfig, method: str, one) -> McResult:
    def task(rep):
        try:
            return one(rep)
        except _FIT_FAILURES:
            return None

    reps = range(cfg.reps)
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as ex:
            out = list(ex.map(task, reps, chunksize=max(1, cfg.reps // (8 * cfg.workers))))
    else:
        out = [task(r) for r in reps]
    ok = [i for i, v in enumerate(out) if v is not None]
    failures = cfg.reps - len(ok)
    if failures > MAX_FAILURE_RATE * cfg.reps:
        raise ExcessiveFailures(f"{failures} of {cfg.reps} replications failed to fit")
    vals = np.array([out[i] for i in ok], dtype=float)
    vals.setflags(write=False)
    return McResult(cfg, method, vals, np.array(ok, dtype=np.int64), failures)


def mc_bm_study(cfg: McConfig) -> McResult:
    """Replicate the BM-PWM estimator; replication ``i`` uses stream ``i`` of ``cfg.seed``.

    Estimands: ``GAMMA`` gives ``√k(γ̂ - γ)``; ``BETAS`` gives
    ``√k(((r+1)β_r - b_m)/a_m - D_r(γ))`` for ``r = 0, 1, 2`` and needs
    GEV data, whose normalizing constants are exact.
    """
    dist, k, m = cfg.dist, cfg.k, cfg.m
    g = dist.known_gamma
    root_k = math.sqrt(k)
    est = Estimand(cfg.estimand)
    if est is Estimand.BETAS:
        if dist.family is not Family.GEV:
            raise DomainError("the BETAS estimand needs GEV data")
        a_m = m**g
        b_m = math.log(m) if abs(g) < BRANCH_TOL else math.expm1(g * math.log(m)) / g
        centre = np.array([d_r(r, g) for r in range(3)])

    def one(rep):
        maxima = sample_block_maxima(dist, k, m, cfg.seed, rep)
        betas = pwm_betas(BlockMaximaSample.from_values(maxima, m), 3)
        if est is Estimand.BETAS:
            scaled = (np.arange(1, 4) * np.array(betas.beta) - b_m) / a_m
            return root_k * (scaled - centre)
        return root_k * (bm_fit(betas).gamma_hat - g)

    return _run(cfg, "bm", one)


def mc_pot_study(cfg: McConfig) -> McResult:
    """Replicate the POT-PWM index estimator on ``n = m·k`` observations."""
    if Estimand(cfg.estimand) is not Estimand.GAMMA:
        raise DomainError("POT studies support the gamma estimand only")
    dist, k = cfg.dist, cfg.k
    n = cfg.m * k
    if n <= k:
        raise DomainError(f"POT needs n = m*k > k, got m={cfg.m}")
    g = dist.known_gamma
    root_k = math.sqrt(k)

    def one(rep):
        x = sample(dist, n, cfg.seed, rep)
        top = np.partition(x, n - k - 1)[n - k - 1:]
        return root_k * (pot_fit(PotSample.from_values(top, k)).gamma_hat - g)

    return _run(cfg, "pot", one)


def write_mc_csv(res: McResult) -> str:
    """``#`` config line, ``rep,stat_value`` rows, then mean/var/failures rows."""
    if res.values.ndim != 1:
        raise DomainError("CSV output covers scalar estimands only")
    out = io.StringIO()
    out.write(f"# {res.config.describe(res.method)}\n")
    out.write("rep,stat_value\n")
    for i, v in zip(res.reps_ok, res.values):
        out.write(f"{i},{format_float(float(v))}\n")
    out.write(f"mean,{format_float(float(res.empirical_mean))}\n")
    out.write(f"var,{format_float(float(res.empirical_var))}\n")
    out.write(f"failures,{res.rep_failures}\n")
    return out.getvalue()


def family_factory(family: Family):
    return _FACTORIES[Family(family)]

