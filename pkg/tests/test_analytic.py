"""Accuracy and grid tests for the standard-normal analytics.

Derived expectations are computed by independent oracles inside this file:
adaptive quadrature of the density for CDF values, and scipy quadrature of
the quantile function for the per-cell averages.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from gaussdkw import analytic as an
from gaussdkw.errors import ConfigError, DomainError
from gaussdkw.rng import counter_uniforms

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def cdf_quadrature_oracle(t: float) -> float:
    """Adaptive quadrature of the density; independent of erfc."""
    val, err = integrate.quad(lambda x: _INV_SQRT_2PI * math.exp(-0.5 * x * x),
                              -40.0, t, limit=300)
    assert err < 1e-8
    return val


class TestCdf:
    def test_median(self):
        assert an.std_normal_cdf(0.0) == 0.5

    def test_reflection(self):
        assert abs(an.std_normal_cdf(1.7) - (1.0 - an.std_normal_cdf(-1.7))) <= 1e-12

    def test_quadrature_oracle(self):
        assert abs(an.std_normal_cdf(1.959964) - 0.975) <= 1e-6
        assert abs(an.std_normal_cdf(1.959964) - cdf_quadrature_oracle(1.959964)) <= 1e-8

    def test_non_finite_rejected(self):
        with pytest.raises(DomainError):
            an.std_normal_cdf(float("nan"))
        with pytest.raises(DomainError):
            an.std_normal_cdf(float("inf"))

    @given(st.floats(min_value=-8.0, max_value=8.0))
    @settings(max_examples=300, deadline=None)
    def test_monotone(self, t):
        assert an.std_normal_cdf(t) <= an.std_normal_cdf(t + 1e-3)

    def test_density_consistency(self):
        h = 1e-5
        for t in np.linspace(-6.0, 6.0, 121):
            fd = (an.std_normal_cdf(t + h) - an.std_normal_cdf(t - h)) / (2 * h)
            assert abs(fd - an.std_normal_density(t)) <= 1e-6


class TestQuantile:
    def test_median(self):
        assert an.std_normal_quantile(0.5) == 0.0

    def test_round_trip_single(self):
        assert abs(an.std_normal_cdf(an.std_normal_quantile(0.31)) - 0.31) <= 1e-10

    def test_round_trip_bulk(self):
        u = counter_uniforms(123, 10_000)
        u = 1e-8 + u * (1.0 - 2e-8)
        back = an._cdf_array(an._quantile_array(u))
        assert np.max(np.abs(back - u)) <= 1e-10

    def test_tail_asymptotic_bracket(self):
        # -sqrt(2 log(1/u) - log log(1/u) - O(1)) with O(1) slack taken as 5.
        u = 1e-6
        big_l = math.log(1.0 / u)
        lo = -math.sqrt(2.0 * big_l)
        hi = -math.sqrt(2.0 * big_l - math.log(big_l) - 5.0)
        q = an.std_normal_quantile(u)
        assert lo <= q <= hi
        assert abs(an.std_normal_cdf(q) - u) <= 1e-10

    def test_domain(self):
        for bad in (0.0, 1.0, -0.3, 1.7):
            with pytest.raises(DomainError):
                an.std_normal_quantile(bad)

    @given(st.floats(min_value=1e-7, max_value=1.0 - 1e-7),
           st.floats(min_value=1e-7, max_value=1e-2))
    @settings(max_examples=200, deadline=None)
    def test_strictly_increasing(self, u, step):
        v = min(u + step, 1.0 - 1e-8)
        if v > u:
            assert an.std_normal_quantile(v) > an.std_normal_quantile(u)


class TestSigma2:
    def test_peak(self):
        assert an.sigma2(0.0) == 0.25

    def test_tail_decay(self):
        assert an.sigma2(8.0) < 1e-14
        assert an.sigma2(-8.0) < 1e-14

    def test_value_at_2(self):
        c = cdf_quadrature_oracle(2.0)
        assert abs(an.sigma2(2.0) - c * (1.0 - c)) <= 1e-10
        assert abs(an.sigma2(2.0) - 0.022232563444519654) <= 1e-12

    def test_matches_cdf_product(self):
        for t in np.linspace(-5.0, 5.0, 41):
            c = an.std_normal_cdf(t)
            assert abs(an.sigma2(t) - c * (1.0 - c)) <= 1e-15

    @given(st.floats(min_value=-30.0, max_value=30.0))
    @settings(max_examples=200, deadline=None)
    def test_range(self, t):
        assert 0.0 <= an.sigma2(t) <= 0.25


class TestGaussianScalars:
    def test_fields_consistent(self):
        for t in (-2.5, -0.3, 0.0, 1.7):
            rec = an.gaussian_scalars(t)
            assert rec.sigma2 == pytest.approx(rec.cdf * (1.0 - rec.cdf), abs=1e-15)
            assert 0.0 <= rec.sigma2 <= 0.25
            assert rec.density == an.std_normal_density(t)
        assert an.gaussian_scalars(-1.1).cdf == pytest.approx(
            1.0 - an.gaussian_scalars(1.1).cdf, abs=1e-12)
        assert an.gaussian_scalars(0.4).cdf > an.gaussian_scalars(0.3).cdf


class TestProbabilityGrid:
    def test_quarter(self):
        g = an.build_probability_grid(0.25)
        assert np.allclose(g.u_values, [0.25, 0.5, 0.75])
        assert g.t_values[1] == 0.0

    def test_half_rejected(self):
        with pytest.raises(ConfigError):
            an.build_probability_grid(0.5)
        with pytest.raises(ConfigError):
            an.build_probability_grid(0.0)

    def test_tenth(self):
        g = an.build_probability_grid(0.1)
        assert len(g.u_values) == 9
        assert np.allclose(g.t_values, -g.t_values[::-1], atol=1e-12)

    def test_size_formula(self):
        for delta in (0.25, 0.2, 0.1, 0.05, 0.02, 0.01):
            g = an.build_probability_grid(delta)
            assert len(g.u_values) == math.floor((1.0 - delta) / delta + 1e-9)
            assert g.u_values[0] >= delta - 1e-12
            assert g.u_values[-1] <= 1.0 - delta + 1e-12


class TestQuantileGrid:
    def test_m2_lambdas(self):
        q = an.build_quantile_grid(2)
        assert np.allclose(q.lambdas, [0.0, 0.0])

    def test_m2_etas_closed_form(self):
        q = an.build_quantile_grid(2)
        assert abs(q.etas[0] + math.sqrt(2.0 / math.pi)) <= 1e-12
        assert abs(q.etas[1] - math.sqrt(2.0 / math.pi)) <= 1e-12

    def test_m_below_2_rejected(self):
        with pytest.raises(ConfigError):
            an.build_quantile_grid(1)

    @pytest.mark.parametrize("m", [2, 3, 10, 137, 1000])
    def test_eta_sum_and_monotonicity(self, m):
        q = an.build_quantile_grid(m)
        assert abs(float(np.sum(q.etas))) <= 1e-8
        assert np.all(np.diff(q.lambdas) >= 0.0)
        assert np.all(np.diff(q.etas) >= 0.0)

    def test_eta_against_quadrature_oracle(self):
        # Independent route: numerical quadrature of the quantile in u.
        m = 16
        q = an.build_quantile_grid(m)
        for i in range(1, m + 1):
            lo, hi = (i - 1) / m, i / m
            # Clip the singular tail ends; the remainder is checked loosely.
            eps = 1e-12 if 1 < i < m else 1e-9
            val, _ = integrate.quad(an.std_normal_quantile, lo + eps, hi - eps,
                                    limit=300)
            tol = 1e-8 if 1 < i < m else 5e-4
            assert abs(m * val - q.etas[i - 1]) <= tol

    def test_lambda_eta_proximity(self):
        m = 1024
        q = an.build_quantile_grid(m)
        i = np.arange(2, m // 2 + 1)
        vals = (q.lambdas[i - 1] - q.etas[i - 1]) * i * np.sqrt(np.log(m / i))
        # Recorded constant from the calibration run: max ~0.522.
        assert np.all(vals > 0.0)
        assert float(np.max(vals)) <= 1.0


class TestRatioChecks:
    def test_density_bound_center(self):
        expected = _INV_SQRT_2PI / (0.5 * math.sqrt(math.log(2.0)))
        assert abs(an.check_density_bound(0.5) - expected) <= 1e-12

    def test_density_bound_symmetry(self):
        for u in (0.1, 0.25, 0.4):
            assert abs(an.check_density_bound(u) - an.check_density_bound(1 - u)) <= 1e-9

    def test_density_bound_sweep(self):
        us = np.exp(np.linspace(math.log(1e-8), math.log(0.5), 300))
        ratios = np.array([an.check_density_bound(float(u)) for u in us])
        assert ratios.max() <= 3.0
        assert ratios.min() >= 1.0 / 3.0

    def test_density_bound_domain(self):
        with pytest.raises(DomainError):
            an.check_density_bound(0.0)
        with pytest.raises(DomainError):
            an.check_density_bound(1.0)

    def test_sigma_equivalence_at_1(self):
        s2 = cdf_quadrature_oracle(1.0) * (1 - cdf_quadrature_oracle(1.0))
        assert abs(an.check_sigma_equivalence(1.0) - s2 * math.exp(0.5)) <= 5e-8
        assert abs(an.check_sigma_equivalence(1.0) - 0.22007752154630544) <= 1e-12

    def test_sigma_equivalence_positive_at_8(self):
        v = an.check_sigma_equivalence(8.0)
        assert math.isfinite(v) and v > 0.0

    def test_sigma_equivalence_band(self):
        vals = np.array([an.check_sigma_equivalence(float(t))
                         for t in np.linspace(1.0, 8.0, 351)])
        assert vals.max() / vals.min() <= 3.0

    def test_sigma_equivalence_domain(self):
        with pytest.raises(DomainError):
            an.check_sigma_equivalence(0.5)

    def test_sigma_ratio_lemma(self):
        # sigma2(t + eta t) / sigma2(t) stays in a fixed band for eta <= 1/t^2.
        lo, hi = math.inf, 0.0
        for t in np.linspace(1.0, 6.0, 51):
            for eta in np.linspace(1e-3, 1.0 / t**2, 20):
                r = an.sigma2(t + eta * t) / an.sigma2(t)
                lo, hi = min(lo, r), max(hi, r)
        assert 0.05 <= lo
        assert hi <= 1.0 + 1e-12

    def test_regularity_lemma(self):
        # |F(t +- xi) - F(t)| <= C xi sigma2(t) sqrt(log(1/sigma2(t))).
        worst = 0.0
        for t in np.linspace(0.0, 5.0, 101):
            s2 = an.sigma2(float(t))
            root = math.sqrt(math.log(1.0 / s2))
            xi = 0.1 / root
            for sign in (1.0, -1.0):
                gap = abs(an.std_normal_cdf(t + sign * xi) - an.std_normal_cdf(t))
                worst = max(worst, gap / (xi * s2 * root))
        assert worst <= 10.0
