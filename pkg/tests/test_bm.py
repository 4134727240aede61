from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import optimize
from scipy.special import comb

from evtpwm.bm import (
    BlockMaximaSample,
    BlockSpec,
    PartialPolicy,
    PwmBetas,
    block_maxima,
    block_maxima_series,
    bm_fit,
    bm_quantile,
    gamma_ratio,
    gamma_star,
    pwm_betas,
    pwm_weights,
    solve_gamma,
)
from evtpwm.errors import DomainError, ExtrapolationDomain, ModelBoundary, NonIdentifiable
from evtpwm.evtmath import d_r


def population_betas(gamma, a=1.0, b=0.0, n=4):
    # (r+1)β_r is the mean of the maximum of r+1 GEV draws
    return PwmBetas(tuple((b + a * d_r(r, gamma)) / (r + 1) for r in range(n)), 100, 1)


class TestBlocks:
    def test_discard_partial(self):
        s = block_maxima(np.arange(10.0), BlockSpec(3))
        assert s.k == 3 and list(s.values) == [2.0, 5.0, 8.0]

    def test_error_partial(self):
        with pytest.raises(DomainError):
            block_maxima(np.arange(10.0), BlockSpec(3, PartialPolicy.ERROR))

    def test_series_keeps_time_order(self):
        x = np.array([5.0, 1, 2, 0, 0, 0, 9, 9, 1])
        assert list(block_maxima_series(x, BlockSpec(3))) == [5.0, 0.0, 9.0]

    @pytest.mark.parametrize("m", [0, -1, 2.5])
    def test_bad_block_size(self, m):
        with pytest.raises(DomainError):
            BlockSpec(m)

    def test_short_series(self):
        with pytest.raises(DomainError):
            block_maxima([1.0, 2.0], BlockSpec(3))

    def test_sample_is_sorted_and_frozen(self):
        s = BlockMaximaSample.from_values([3.0, 1.0, 2.0])
        assert list(s.values) == [1.0, 2.0, 3.0]
        with pytest.raises(ValueError):
            s.values[0] = 0.0

    def test_nonfinite_rejected(self):
        with pytest.raises(DomainError):
            BlockMaximaSample.from_values([1.0, math.nan])


class TestPwmBetas:
    @given(st.lists(st.floats(-1e3, 1e3), min_size=4, max_size=40))
    @settings(max_examples=60, deadline=None)
    def test_matches_combinatorial_definition(self, xs):
        s = BlockMaximaSample.from_values(xs)
        k = s.k
        ref = [sum(comb(i - 1, r) / comb(k - 1, r) * s.values[i - 1] for i in range(1, k + 1)) / k for r in range(4)]
        got = pwm_betas(s).beta
        scale = max(1.0, float(np.max(np.abs(s.values))))
        assert np.allclose(got, ref, rtol=1e-12, atol=1e-12 * scale)

    def test_weights_shape(self):
        w = pwm_weights(10, 3)
        assert w.shape == (3, 10)
        assert w[1, 0] == 0 and w[2, 1] == 0 and w[2, -1] == 1

    def test_k_too_small(self):
        with pytest.raises(DomainError):
            pwm_betas(BlockMaximaSample.from_values([1.0, 2.0, 3.0]))
        assert len(pwm_betas(BlockMaximaSample.from_values([1.0, 2.0, 3.0]), 3).beta) == 3

    def test_constant_sample(self):
        # the order-r weights sum to k/(r+1)
        b = pwm_betas(BlockMaximaSample.from_values([2.0] * 8)).beta
        assert np.allclose(b, [2.0 / (r + 1) for r in range(4)], rtol=1e-15)


class TestSolveGamma:
    @given(st.floats(-2.0, 0.99))
    @settings(max_examples=300)
    def test_round_trip(self, g):
        assert abs(solve_gamma(gamma_ratio(g)) - g) < 1e-10

    def test_against_independent_root(self):
        for g in (-0.7, 0.0, 0.3):
            ratio = gamma_ratio(g)
            ref = optimize.brentq(lambda x: (3**x - 1) / (2**x - 1) - ratio, -5, 5 + 1e-3, xtol=1e-14)
            assert solve_gamma(ratio) == pytest.approx(ref, abs=1e-9)

    def test_monotone(self):
        gs = np.linspace(-3, 3, 301)
        r = [gamma_ratio(g) for g in gs]
        assert np.all(np.diff(r) > 0)

    @pytest.mark.parametrize("ratio", [1.0, 0.5, -3.0])
    def test_not_identifiable(self, ratio):
        with pytest.raises(NonIdentifiable):
            solve_gamma(ratio)

    def test_continuity_at_zero(self):
        assert abs(gamma_ratio(1e-7) - gamma_ratio(0.0)) < 1e-4
        assert gamma_ratio(0.0) == pytest.approx(math.log(3) / math.log(2), rel=1e-15)


class TestBmFit:
    @pytest.mark.parametrize("g", [-1.0, -0.4, 0.0, 1e-7, 0.25, 0.45, 0.8])
    def test_recovers_population_parameters(self, g):
        f = bm_fit(population_betas(g, a=2.0, b=-1.5))
        assert f.gamma_hat == pytest.approx(g, abs=1e-9)
        assert f.a_hat == pytest.approx(2.0, rel=1e-9)
        assert f.b_hat == pytest.approx(-1.5, abs=1e-9)

    @given(st.floats(0.01, 100), st.floats(-100, 100), st.integers(0, 2**32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_affine_equivariance(self, c, d, seed):
        x = np.random.default_rng(seed).gumbel(size=60)
        f0 = bm_fit(pwm_betas(BlockMaximaSample.from_values(x)))
        f1 = bm_fit(pwm_betas(BlockMaximaSample.from_values(c * x + d)))
        assert f1.gamma_hat == pytest.approx(f0.gamma_hat, abs=1e-10)
        assert f1.a_hat == pytest.approx(c * f0.a_hat, rel=1e-10)
        assert f1.b_hat == pytest.approx(c * f0.b_hat + d, rel=1e-10, abs=1e-10 * (abs(d) + c))

    def test_constant_sample_not_identifiable(self):
        with pytest.raises(NonIdentifiable):
            bm_fit(pwm_betas(BlockMaximaSample.from_values([1.0] * 10)))

    def test_model_boundary(self):
        with pytest.raises(ModelBoundary):
            bm_fit(_betas_for_gamma(1.2))


def _betas_for_gamma(g):
    # β's whose spread ratio corresponds to γ = g; β₀ = 0 keeps it simple
    s1 = 1.0
    return PwmBetas((0.0, s1 / 2, gamma_ratio(g) * s1 / 3), 50, 1)


class TestGammaStar:
    @pytest.mark.parametrize("g", [-0.8, 0.0, 0.3])
    def test_population(self, g):
        assert gamma_star(population_betas(g, 3.0, 1.0)) == pytest.approx(g, abs=1e-9)

    def test_needs_beta3(self):
        with pytest.raises(DomainError):
            gamma_star(population_betas(0.1, n=3))


class TestBmQuantile:
    @pytest.mark.parametrize("g", [-0.3, 0.0, 0.2])
    def test_population_quantile(self, g):
        # b + a((mp)^{-γ} - 1)/γ with the population (a, b) = (2, 1)
        f = bm_fit(PwmBetas(population_betas(g, 2.0, 1.0).beta, 100, 10))
        mp = 10 * 1e-3
        ref = 1.0 + 2.0 * (math.log(1 / mp) if g == 0 else (mp**-g - 1) / g)
        assert bm_quantile(f, 1e-3) == pytest.approx(ref, rel=1e-9)

    def test_branch_continuity(self):
        from evtpwm.bm import BmFit

        a = bm_quantile(BmFit(0.0, 1.0, 0.0, 50, 10), 1e-4)
        b = bm_quantile(BmFit(1e-7, 1.0, 0.0, 50, 10), 1e-4)
        assert abs(a - b) < 1e-4

    @pytest.mark.parametrize("p", [0.0, 0.1, 1.0])
    def test_domain(self, p):
        from evtpwm.bm import BmFit

        with pytest.raises(ExtrapolationDomain):
            bm_quantile(BmFit(0.1, 1.0, 0.0, 50, 10), p)
