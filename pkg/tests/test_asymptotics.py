"""
Test cases for the extrapolated t -> 0 limits.
"""

import math

import pytest

from divaudit import (
    DEFAULT_GRID,
    DomainError,
    LimitEstimate,
    cauchy_h2_limit,
    cauchy_h_ratio_sweep,
    cauchy_tv_ratio_sweep,
    default_grid,
    eq1_margin,
    extrapolate,
    generator_js,
    generator_kl,
    generator_tv,
    h,
    jsd_fg_sweep,
)
from divaudit.asymptotics import jsd_derivative_ratio, jsd_f, jsd_f_prime, jsd_g, jsd_g_prime


class TestExtrapolate:
    """test the linear fit through the smallest t"""

    def test_linear_data(self):
        samples = [(t, 2.0 + 3.0 * t) for t in DEFAULT_GRID]
        est = extrapolate("line", samples, expected=2.0)
        assert est.estimate == pytest.approx(2.0, abs=1e-12)
        assert est.error_bar == pytest.approx(3.0 * 1e-2, rel=1e-9)
        assert est.passed

    def test_samples_sorted_by_decreasing_t(self):
        est = extrapolate("x", [(0.01, 1.0), (0.1, 1.1), (0.001, 0.99)])
        assert [t for t, _ in est.samples] == [0.1, 0.01, 0.001]

    def test_single_sample(self):
        est = extrapolate("x", [(0.1, 5.0)])
        assert est.estimate == 5.0 and est.error_bar == 0.0

    def test_empty(self):
        with pytest.raises(DomainError):
            extrapolate("x", [])

    def test_fail_and_json(self):
        est = LimitEstimate("x", ((0.1, 1.0),), estimate=1.0, error_bar=0.0, expected=2.0)
        assert not est.passed
        data = est.to_json()
        assert data["passed"] is False
        assert data["expected"] == 2.0
        assert data["samples"] == [[0.1, 1.0]]

    def test_default_grid(self):
        assert default_grid() == pytest.approx(list(DEFAULT_GRID))
        assert default_grid(1e-4) == pytest.approx([1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4])
        with pytest.raises(DomainError):
            default_grid(0.0)


class TestJSDLimits:
    """test g/f -> 1/4 and 2g'/f' -> 1/2 on the binary family"""

    def test_sweep(self):
        gf, dd = jsd_fg_sweep()
        assert gf.expected == 0.25 and dd.expected == 0.5
        assert gf.passed and dd.passed
        for est in (gf, dd):
            assert abs(est.estimate - est.expected) <= est.error_bar

    def test_smallest_sample(self):
        gf, dd = jsd_fg_sweep([1e-3])
        assert abs(gf.samples[-1][1] - 0.25) < 1e-4
        assert abs(dd.samples[-1][1] - 0.5) < 1e-4

    def test_error_bar_shrinks(self):
        coarse, _ = jsd_fg_sweep(default_grid(1e-3))
        fine, _ = jsd_fg_sweep(default_grid(1e-4))
        assert fine.error_bar < coarse.error_bar

    def test_base_independent(self):
        bits, _ = jsd_fg_sweep(base=2.0)
        nats, _ = jsd_fg_sweep(base=math.e)
        for (_, a), (_, b) in zip(bits.samples, nats.samples):
            assert abs(a - b) <= 1e-12

    @pytest.mark.parametrize("t", [0.01, 0.1, 0.3])
    def test_closed_form_derivatives(self, t):
        d = 1e-6
        fd_f = (jsd_f(t + d) - jsd_f(t - d)) / (2 * d)
        fd_g = (jsd_g(t + d) - jsd_g(t - d)) / (2 * d)
        assert jsd_f_prime(t) / fd_f == pytest.approx(1.0, abs=1e-6)
        assert jsd_g_prime(t) / fd_g == pytest.approx(1.0, abs=1e-6)
        assert 2 * jsd_g_prime(t) / jsd_f_prime(t) == pytest.approx(jsd_derivative_ratio(t), rel=1e-12)

    @pytest.mark.parametrize("bad", [[], [0.5], [0.0], [-0.1, 0.1]])
    def test_rejects(self, bad):
        with pytest.raises(DomainError):
            jsd_fg_sweep(bad)


class TestEq1Margin:
    """test (g/f)^(1-alpha) - 2g'/f'"""

    def test_limit_value(self):
        assert eq1_margin(0.75, 1e-3) == pytest.approx(4**-0.25 - 0.5, abs=1e-3)

    def test_boundary_exponent(self):
        assert abs(eq1_margin(0.5, 1e-3)) < 1e-5

    def test_negative_below_half(self):
        assert eq1_margin(0.3, 1e-3) < 0

    def test_domain(self):
        with pytest.raises(DomainError):
            eq1_margin(0.6, 0.5)


class TestCauchyLimits:
    """test the limits along the Cauchy scale family"""

    @pytest.mark.parametrize("factory", [generator_js, generator_kl])
    def test_h_ratios(self, factory):
        estimates = cauchy_h_ratio_sweep(factory())
        assert len(estimates) == 3
        for est in estimates:
            assert est.expected == 4.0
            assert est.passed
        for i in range(3):
            for j in range(i + 1, 3):
                a, b = estimates[i], estimates[j]
                assert abs(a.estimate - b.estimate) <= 2 * (a.error_bar + b.error_bar) + 1e-9

    def test_h_ratio_within_error_bar_kl(self):
        for est in cauchy_h_ratio_sweep(generator_kl()):
            assert abs(est.estimate - 4.0) <= est.error_bar

    def test_smallest_sample(self):
        for factory in (generator_js, generator_kl):
            ratio, _, _ = cauchy_h_ratio_sweep(factory(), [1e-3])
            assert abs(ratio.samples[0][1] - 4.0) < 1e-3

    def test_kl_closed_form(self):
        t, gen = 0.01, generator_kl()
        closed = math.log(math.cosh(t)) / math.log(math.cosh(t / 2))
        assert abs(h(gen, 2 * t) / h(gen, t) - closed) < 1e-8

    @pytest.mark.parametrize("factory, limit", [(generator_js, 0.125), (generator_kl, 0.5)])
    def test_curvature_limit(self, factory, limit):
        est = cauchy_h2_limit(factory())
        assert est.expected == pytest.approx(limit)
        assert abs(est.estimate - limit) < 1e-4
        assert est.estimate > 0
        assert est.passed

    def test_needs_smooth_generator(self):
        with pytest.raises(DomainError):
            cauchy_h_ratio_sweep(generator_tv())
        with pytest.raises(DomainError):
            cauchy_h2_limit(generator_tv())


class TestTVLimits:
    """test h(2t)/h(t) -> 2 and h'(t) -> 1/pi for total variation"""

    def test_sweep(self):
        ratio, slope = cauchy_tv_ratio_sweep()
        assert ratio.expected == 2.0
        assert slope.expected == pytest.approx(1 / math.pi)
        assert ratio.passed and slope.passed
        assert abs(ratio.estimate - 2.0) < 1e-3
        assert abs(slope.estimate - 1 / math.pi) < 1e-3

    def test_smallest_sample(self):
        ratio, slope = cauchy_tv_ratio_sweep([1e-3])
        assert abs(ratio.samples[0][1] - 2.0) < 1e-3
        assert abs(slope.samples[0][1] - 1 / math.pi) < 1e-3

    def test_positive(self):
        gen = generator_tv()
        for t in DEFAULT_GRID:
            assert h(gen, t) > 0
