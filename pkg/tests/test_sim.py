from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import stats

from evtpwm import sim
from evtpwm.asymptotics import Target, bm_asymp, pot_asymp
from evtpwm.errors import DomainError, ExcessiveFailures, NonIdentifiable
from evtpwm.evtmath import SecondOrderParams
from evtpwm.pot import PotSample, pot_fit
from evtpwm.sim import (
    Estimand,
    Family,
    McConfig,
    burr,
    exponential,
    family_factory,
    frechet,
    gev,
    gpd,
    mc_bm_study,
    mc_pot_study,
    sample,
    sample_block_maxima,
    uniform,
    uniforms,
    write_mc_csv,
)


def _sigma2_bm(g):
    return bm_asymp(SecondOrderParams(g, -1.0), Target.GAMMA).sigma2


def _sigma2_pot(g):
    return pot_asymp(SecondOrderParams(g, -1.0), Target.GAMMA).sigma2


class TestFamilies:
    @pytest.mark.parametrize(
        "dist,g,rho_bm,rho_pot",
        [
            (gev(0.3), 0.3, None, -1.0),
            (gpd(-0.2), -0.2, -1.0, None),
            (frechet(4.0), 0.25, None, -1.0),
            (uniform(), -1.0, -1.0, None),
            (exponential(), 0.0, -1.0, None),
            (burr(1.0, 2.0, 0.5), 1.0, -1.0, -2.0),
            (burr(1.0, 2.0, 4.0), 0.125, -0.25, -0.25),
        ],
    )
    def test_table(self, dist, g, rho_bm, rho_pot):
        assert dist.known_gamma == pytest.approx(g, rel=1e-15)
        assert dist.known_rho == rho_bm
        assert dist.known_rho_pot == rho_pot

    @pytest.mark.parametrize("bad", [lambda: frechet(0.0), lambda: burr(1.0, -1.0, 1.0), lambda: gev(math.nan)])
    def test_invalid_params(self, bad):
        with pytest.raises(DomainError):
            bad()

    def test_factory(self):
        assert family_factory(Family.GPD)(0.1) == gpd(0.1)
        assert family_factory("uniform")() == uniform()

    @pytest.mark.parametrize(
        "dist,ref",
        [
            (gev(0.3), stats.genextreme(-0.3)),
            (gev(0.0), stats.gumbel_r()),
            (gpd(-0.4), stats.genpareto(-0.4)),
            (gpd(0.2), stats.genpareto(0.2)),
            (frechet(3.0), stats.invweibull(3.0)),
            (uniform(), stats.uniform()),
            (exponential(), stats.expon()),
            (burr(2.0, 1.5, 3.0), stats.burr12(1.5, 3.0, scale=2.0 ** (1 / 1.5))),
        ],
    )
    def test_inverse_cdf_matches_scipy(self, dist, ref):
        u = np.array([1e-9, 0.01, 0.3, 0.5, 0.9, 0.999, 1 - 1e-9])
        assert np.allclose(dist.quantile_from_neglog(-np.log(u)), ref.ppf(u), rtol=1e-9)


class TestSampling:
    def test_uniform_support(self):
        for seed in (0, 1, 2**64 - 1):
            x = sample(uniform(), 100_000, seed)
            assert x.min() > 0 and x.max() < 1

    def test_uniform_lattice_excludes_endpoints(self):
        u = uniforms(np.random.default_rng(0), 10)
        assert np.all((u > 0) & (u < 1))

    def test_deterministic_and_stream_separated(self):
        a = sample(gev(0.1), 50, 9, stream=3)
        assert np.array_equal(a, sample(gev(0.1), 50, 9, stream=3))
        assert not np.array_equal(a, sample(gev(0.1), 50, 9, stream=4))
        assert not np.array_equal(a, sample(gev(0.1), 50, 10, stream=3))

    @pytest.mark.parametrize("g", [-0.5, 0.0, 0.3])
    def test_gev_max_stability(self, g):
        # maxima of m raw draws, renormalized by a_m = m^γ and b_m = (m^γ - 1)/γ, are again G_γ
        m, n = 20, 10_000
        x = sample(gev(g), n * m, 5).reshape(n, m).max(axis=1)
        a_m = m**g
        b_m = math.log(m) if g == 0 else (a_m - 1) / g
        d = stats.kstest((x - b_m) / a_m, stats.genextreme(-g).cdf).statistic
        assert d < 0.02

    @pytest.mark.parametrize("dist", [gev(0.2), gpd(-0.3), burr(1.0, 2.0, 1.0)])
    def test_block_maxima_sampler_matches_raw_blocks(self, dist):
        m, n = 10, 5000
        raw = sample(dist, n * m, 1).reshape(n, m).max(axis=1)
        direct = sample_block_maxima(dist, n, m, 2)
        assert stats.ks_2samp(raw, direct).pvalue > 0.01

    def test_frechet_minimum_concentrates(self):
        k = 100_000
        vals = [math.log(k) * sample(frechet(1.0), k, 17, rep).min() for rep in range(200)]
        assert 0.8 < np.median(vals) < 1.25

    @pytest.mark.parametrize("n", [0, -1, 2.5])
    def test_bad_n(self, n):
        with pytest.raises(DomainError):
            sample(uniform(), n, 0)

    @pytest.mark.parametrize("seed", [-1, 2**64, 1.5])
    def test_bad_seed(self, seed):
        with pytest.raises(DomainError):
            sample(uniform(), 5, seed)


class TestMcConfig:
    @pytest.mark.parametrize("kw", [dict(reps=99), dict(k=9), dict(m=0), dict(workers=0), dict(seed=-1)])
    def test_invariants(self, kw):
        base = dict(dist=gev(0.1), k=10, m=1, reps=100, seed=0)
        with pytest.raises(DomainError):
            McConfig(**{**base, **kw})

    def test_betas_needs_gev(self):
        with pytest.raises(DomainError):
            mc_bm_study(McConfig(gpd(0.1), 50, 5, 100, 0, Estimand.BETAS))

    def test_pot_rejects_betas(self):
        with pytest.raises(DomainError):
            mc_pot_study(McConfig(gpd(0.1), 50, 5, 100, 0, Estimand.BETAS))

    def test_pot_needs_more_than_k(self):
        with pytest.raises(DomainError):
            mc_pot_study(McConfig(gpd(0.1), 50, 1, 100, 0))


class TestMcHarness:
    def test_thread_count_does_not_matter(self):
        cfg = dict(dist=gev(0.25), k=200, m=10, reps=300, seed=42)
        a = mc_bm_study(McConfig(**cfg))
        b = mc_bm_study(McConfig(**cfg, workers=4))
        assert np.array_equal(a.values, b.values) and np.array_equal(a.reps_ok, b.reps_ok)
        assert a.empirical_mean == b.empirical_mean and a.empirical_var == b.empirical_var

    def test_replication_is_a_pure_function_of_seed_and_index(self):
        cfg = McConfig(gpd(0.1), 50, 5, 100, 7)
        res = mc_pot_study(cfg)
        x = sample(gpd(0.1), 250, 7, 37)
        top = np.sort(x)[-51:]
        assert res.values[37] == math.sqrt(50) * (pot_fit(PotSample.from_values(top, 50)).gamma_hat - 0.1)

    def test_failures_counted_and_excluded(self, monkeypatch):
        real = sim.bm_fit
        calls = iter(range(10**6))

        def every_40th(betas):
            if next(calls) % 40 == 0:
                raise NonIdentifiable("forced")
            return real(betas)

        monkeypatch.setattr(sim, "bm_fit", every_40th)
        res = mc_bm_study(McConfig(gev(0.0), 20, 1, 200, 0))
        assert res.rep_failures == 5
        assert len(res.values) == 195 and 0 not in res.reps_ok

    def test_excessive_failures_abort(self, monkeypatch):
        def always(betas):
            raise NonIdentifiable("forced")

        monkeypatch.setattr(sim, "bm_fit", always)
        with pytest.raises(ExcessiveFailures):
            mc_bm_study(McConfig(gev(0.0), 20, 1, 100, 0))

    def test_moments(self):
        res = mc_bm_study(McConfig(gev(0.0), 30, 2, 150, 3))
        v = res.values
        assert res.empirical_mean == pytest.approx(v.mean(), rel=1e-15)
        assert res.empirical_var == pytest.approx(v.var(ddof=1), rel=1e-15)
        assert res.standard_error == pytest.approx(math.sqrt(v.var(ddof=1) / len(v)), rel=1e-15)


class TestBmStudy:
    def test_gamma_quarter_variance(self):
        res = mc_bm_study(McConfig(gev(0.25), 2000, 10, 2000, 42))
        assert res.empirical_var == pytest.approx(_sigma2_bm(0.25), rel=0.15)
        assert abs(res.empirical_mean) < 3 * res.standard_error
        assert res.rep_failures / 2000 < 0.01

    def test_block_size_does_not_matter_for_gev(self):
        a = mc_bm_study(McConfig(gev(0.1), 500, 10, 500, 1)).values
        b = mc_bm_study(McConfig(gev(0.1), 500, 1000, 500, 2)).values
        assert stats.ks_2samp(a, b).pvalue > 0.01

    def test_normality(self):
        res = mc_bm_study(McConfig(gev(0.25), 2000, 10, 2000, 42))
        ad = stats.anderson(res.values, "norm")
        crit_1pct = ad.critical_values[list(ad.significance_level).index(1.0)]
        assert ad.statistic < crit_1pct


class TestPotStudy:
    def test_gpd_zero_variance(self):
        res = mc_pot_study(McConfig(gpd(0.0), 2000, 10, 2000, 42))
        assert res.empirical_var == pytest.approx(_sigma2_pot(0.0), rel=0.15)

    def test_gpd_negative_variance(self):
        res = mc_pot_study(McConfig(gpd(-0.5), 2000, 10, 2000, 42))
        assert res.empirical_var == pytest.approx(_sigma2_pot(-0.5), rel=0.15)

    def test_exponential_unbiased(self):
        res = mc_pot_study(McConfig(exponential(), 2000, 10, 2000, 42))
        assert abs(res.empirical_mean) < 3 * res.standard_error

    def test_normality(self):
        res = mc_pot_study(McConfig(gpd(0.0), 2000, 10, 2000, 42))
        ad = stats.anderson(res.values, "norm")
        crit_1pct = ad.critical_values[list(ad.significance_level).index(1.0)]
        assert ad.statistic < crit_1pct

    def test_burr_bias_reported(self):
        # λ ≠ 0 here is only approximate, so the bias is reported rather than gated
        res = mc_pot_study(McConfig(burr(1.0, 1.0, 2.0), 500, 20, 200, 11))
        assert math.isfinite(res.empirical_mean) and res.rep_failures == 0


class TestCsv:
    def test_layout(self):
        res = mc_bm_study(McConfig(gev(0.0), 20, 3, 100, 5))
        lines = write_mc_csv(res).splitlines()
        assert lines[0] == "# method=bm dist=gev gamma=0.0 k=20 m=3 reps=100 seed=5 estimand=gamma"
        assert lines[1] == "rep,stat_value"
        assert len(lines) == 2 + 100 + 3
        assert lines[2].startswith("0,") and float(lines[2].split(",")[1]) == res.values[0]
        assert lines[-3] == f"mean,{res.empirical_mean:.17g}"
        assert lines[-1] == "failures,0"

    def test_vector_estimand_rejected(self):
        res = mc_bm_study(McConfig(gev(0.0), 20, 3, 100, 5, Estimand.BETAS))
        assert res.values.shape == (100, 3)
        with pytest.raises(DomainError):
            write_mc_csv(res)
