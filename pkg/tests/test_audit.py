"""
Test cases for triangle-inequality certificates, violation searches and random audits.
"""

import json
import logging
import math

import numpy as np
import pytest

from divaudit import (
    CauchyParams,
    DomainError,
    SearchConfig,
    SearchFailure,
    TriangleCertificate,
    F_multinomial,
    F_multinomial_grid,
    amplify_certificate,
    find_cauchy_violation,
    find_jsd_violation,
    generator_js,
    generator_kl,
    generator_tv,
    jsd,
    random_audit,
    tvd,
)

VIOLATING_ALPHAS = [0.51, 0.6, 0.75, 1.0]
METRIC_ALPHAS = [0.3, 0.5]


class TestTriangleFunction:
    """test F(t) = f(t)^alpha - 2 g(t)^alpha on the binary family"""

    def test_positive_above_half(self):
        assert F_multinomial(0.75, 0.1) > 0.01

    @pytest.mark.parametrize("alpha", VIOLATING_ALPHAS + METRIC_ALPHAS)
    def test_vanishes_at_zero(self, alpha):
        assert abs(F_multinomial(alpha, 1e-7)) < 1e-3

    @pytest.mark.parametrize("t", [0.0, 0.5, -0.1, 0.7])
    def test_domain(self, t):
        with pytest.raises(DomainError):
            F_multinomial(0.6, t)

    def test_grid_matches_scalar(self):
        ts = np.array([1e-4, 1e-2, 0.1, 0.3, 0.49])
        expected = [F_multinomial(0.6, t) for t in ts]
        np.testing.assert_allclose(F_multinomial_grid(0.6, ts), expected, rtol=1e-10, atol=1e-15)

    @pytest.mark.parametrize("alpha", METRIC_ALPHAS)
    def test_metric_regime(self, alpha):
        ts = np.geomspace(1e-6, 0.49, 10_000)
        assert F_multinomial_grid(alpha, ts).max() <= 1e-12

    @pytest.mark.parametrize("alpha", VIOLATING_ALPHAS)
    def test_violating_regime(self, alpha):
        ts = np.geomspace(1e-6, 0.49, 10_000)
        assert F_multinomial_grid(alpha, ts).max() > 0


class TestSearchConfig:
    """test search configuration validation"""

    def test_defaults(self):
        assert SearchConfig.multinomial().t_max == 0.49
        assert SearchConfig.cauchy().t_max == 5.0
        assert SearchConfig.multinomial(grid_size=32).grid_size == 32

    @pytest.mark.parametrize(
        "kwargs",
        [{"t_min": 0.0}, {"t_min": 0.3, "t_max": 0.2}, {"grid_size": 7}, {"refine_tol": 0.0}, {"margin_floor": -1.0}],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(DomainError):
            SearchConfig(**kwargs)

    def test_multinomial_interval(self):
        with pytest.raises(DomainError):
            find_jsd_violation(0.6, SearchConfig(t_max=0.5))


class TestFindJSDViolation:
    """test certified violations of JSD^alpha"""

    @pytest.mark.parametrize("alpha", VIOLATING_ALPHAS)
    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_sound_certificate(self, alpha, n):
        cert = find_jsd_violation(alpha, n=n)
        assert cert.family == "multinomial"
        assert cert.margin > 1e-10
        assert cert.margin == cert.d13 - cert.d12 - cert.d23
        assert cert.verify()
        assert all(P.n == n for P in cert.points)
        if n > 2:
            assert all(P.interior for P in cert.points)
            assert cert.search_meta["eps"] > 0

    def test_symmetric_legs(self):
        cert = find_jsd_violation(0.6)
        assert abs(cert.d12 - cert.d23) <= 1e-12
        t = cert.search_meta["t"]
        assert cert.points[1].weights == (0.5, 0.5)
        assert cert.points[0].weights == pytest.approx((0.5 - t, 0.5 + t))

    @pytest.mark.parametrize("alpha", METRIC_ALPHAS)
    def test_metric_regime_fails(self, alpha):
        with pytest.raises(SearchFailure) as excinfo:
            find_jsd_violation(alpha)
        assert excinfo.value.max_margin <= 1e-12
        assert 0 < excinfo.value.t_at_max < 0.5

    def test_alpha_domain(self):
        with pytest.raises(DomainError):
            find_jsd_violation(0.0)
        with pytest.raises(DomainError):
            find_jsd_violation(0.6, n=1)


class TestFindCauchyViolation:
    """test certified violations on the Cauchy scale triple"""

    @pytest.mark.parametrize("factory", [generator_js, generator_kl])
    @pytest.mark.parametrize("alpha", [0.6, 0.75])
    def test_sound_certificate(self, factory, alpha):
        gen = factory()
        cert = find_cauchy_violation(gen, alpha)
        assert cert.family == "cauchy"
        assert cert.generator == gen.name
        assert cert.margin > 1e-10
        assert cert.verify()
        t = cert.search_meta["t"]
        lo, mid, hi = cert.points
        assert mid == CauchyParams(0.0, 1.0)
        assert lo.sigma == pytest.approx(math.exp(-t)) and hi.sigma == pytest.approx(math.exp(t))

    def test_whole_interval_evaluated(self, caplog):
        with caplog.at_level(logging.WARNING, logger="divaudit.audit"):
            find_cauchy_violation(generator_kl(), 0.75)
        assert not [r for r in caplog.records if "skipping" in r.getMessage()]

    def test_tv_is_rejected(self):
        with pytest.raises(DomainError):
            find_cauchy_violation(generator_tv(), 0.6)

    def test_metric_regime_fails(self):
        with pytest.raises(SearchFailure):
            find_cauchy_violation(generator_js(), 0.5, SearchConfig.cauchy(t_max=2.0))


class TestAmplify:
    """test raising a certificate to a larger exponent"""

    @pytest.fixture(scope="class")
    @classmethod
    def cert(cls):
        return find_jsd_violation(0.6)

    def test_identity(self, cert):
        assert amplify_certificate(cert, 1.0) == cert

    @pytest.mark.parametrize("beta", [1.5, 2.0, 4.0])
    def test_sound(self, cert, beta):
        amplified = amplify_certificate(cert, beta)
        assert amplified.alpha == pytest.approx(0.6 * beta)
        assert amplified.margin > 0
        assert amplified.verify()
        assert amplified.points == cert.points

    def test_jsd_itself_is_not_a_metric(self, cert):
        amplified = amplify_certificate(cert, 5 / 3)
        assert amplified.alpha == pytest.approx(1.0)
        assert amplified.verify()

    @pytest.mark.parametrize("alpha", VIOLATING_ALPHAS)
    @pytest.mark.parametrize("beta", [1.5, 2.0, 4.0])
    def test_sound_from_every_exponent(self, alpha, beta):
        assert amplify_certificate(find_jsd_violation(alpha, n=3), beta).verify()

    def test_beta_below_one(self, cert):
        with pytest.raises(DomainError):
            amplify_certificate(cert, 0.9)


class TestCertificate:
    """test certificate invariants and serialization"""

    def test_json_round_trip(self):
        cert = find_jsd_violation(0.75, n=3)
        restored = TriangleCertificate.from_json(json.loads(json.dumps(cert.to_json())))
        assert restored.alpha == cert.alpha
        assert restored.margin == cert.margin
        assert restored.verify()

    def test_cauchy_round_trip(self):
        cert = find_cauchy_violation(generator_kl(), 0.75)
        restored = TriangleCertificate.from_json(json.loads(json.dumps(cert.to_json())))
        assert restored.points == cert.points
        assert restored.verify()

    def test_tampered_certificate_fails(self):
        cert = find_jsd_violation(0.6)
        data = cert.to_json()
        data["d13"] *= 1.01
        data["margin"] = data["d13"] - data["d12"] - data["d23"]
        assert not TriangleCertificate.from_json(data).verify()

    def test_points_must_differ(self):
        cert = find_jsd_violation(0.6)
        P = cert.points[0]
        with pytest.raises(DomainError):
            TriangleCertificate("multinomial", (P, P, cert.points[2]), 0.6, 0.0, 0.0, 0.0, 0.0)

    def test_malformed(self):
        with pytest.raises(DomainError):
            TriangleCertificate.from_json({"family": "multinomial"})
        with pytest.raises(DomainError):
            TriangleCertificate.from_json({"family": "normal", "points": []})


class TestRandomAudit:
    """test seeded random triangle audits"""

    def test_sqrt_jsd_is_a_metric(self):
        report = random_audit(jsd, 0.5, 10_000, seed=1)
        assert report.num_triples == 10_000
        assert report.violations == 0
        assert report.worst_margin <= 1e-12

    def test_jsd_is_not(self):
        report = random_audit(jsd, 1.0, 10_000, seed=1)
        assert report.violations >= 1
        assert report.worst_margin > 0
        assert all(P.interior and P.n == 3 for P in report.worst_triple)

    def test_deterministic(self):
        a = random_audit(jsd, 1.0, 5_000, seed=42)
        b = random_audit(jsd, 1.0, 5_000, seed=42)
        assert a == b
        assert a.to_json() == b.to_json()

    def test_independent_of_workers(self):
        a = random_audit(jsd, 1.0, 10_000, seed=7, workers=1)
        b = random_audit(jsd, 1.0, 10_000, seed=7, workers=3)
        assert a == b

    def test_unregistered_measure(self):
        report = random_audit(lambda P, Q: tvd(P, Q).value, 1.0, 50, seed=3, n=4)
        assert report.violations == 0

    @pytest.mark.parametrize("num_triples", [0, -5])
    def test_rejects_empty(self, num_triples):
        with pytest.raises(DomainError):
            random_audit(jsd, 0.5, num_triples, seed=0)

    def test_rejects_non_callable(self):
        with pytest.raises(DomainError, match="callable"):
            random_audit("jsd", 0.5, 10, seed=0)

    @pytest.mark.optional
    def test_sqrt_jsd_large(self):
        assert random_audit(jsd, 0.5, 100_000, seed=2024).violations == 0

    @pytest.mark.optional
    def test_jsd_large(self):
        assert random_audit(jsd, 1.0, 100_000, seed=2024).violations >= 1
