import math

import numpy as np
import pytest

from spikelab.analytic import (
    DeformationSpec, EntryLaw, E_sigma, L_sigma, fluctuation_target, g_sc, g_sc_derivative,
    predict_limits, resolvent_second_moment, rho, semicircle_cdf, semicircle_expect, semicircle_pdf,
    separation_plan, sigma_theta, support_set, v_theta, z_sigma,
)
from spikelab.errors import DomainError, IntervalInsideSupport, InvalidSplit, OutsideOutlierRegime

# frozen values from tests/_oracles.py (mpmath quadrature and quadratic roots)
CDF_1 = 0.804498890522114679
G_PRIME_3 = -0.170820393249990575
G_PRIME_100 = -0.000100030010003501270
M2_3 = 0.170820393249936909
L_COMPLEX_SPIKE2 = complex(-0.428903156155685387, 0.210500077984779456)
L_REAL_GAUSS = complex(-0.104321724187910045, 0.0801105163149815089)
L_REAL_RADEMACHER = complex(-0.205266566396565723, 0.0288160380616161883)
A_PRIME_22 = 1.55825756949558430
B_PRIME_30 = 2.61803398874989485
RAD_MODE = 1.0606601701726475

THREE = DeformationSpec.diagonal([(3, 2), (0.5, 1), (-2.5, 1)])
LAWS = [EntryLaw.gaussian(), EntryLaw.rademacher(), EntryLaw.uniform(),
        EntryLaw.discrete([(1.0, 0.3), (2.0, 0.7)]), EntryLaw.gaussian(0.5), EntryLaw.uniform(2.0)]


class TestEntryLaw:
    @pytest.mark.parametrize("law", LAWS, ids=lambda l: f"{l.kind}-{l.sigma}")
    def test_moments(self, law):
        assert law.m4 >= law.sigma**4 - 1e-15
        assert law.kappa4 == pytest.approx(law.m4 - 3 * law.sigma**4)

    def test_closed_form_m4(self):
        assert EntryLaw.gaussian(2).m4 == 48
        assert EntryLaw.rademacher(2).m4 == 16
        assert EntryLaw.uniform(1).m4 == pytest.approx(1.8)

    def test_discrete_normalised(self):
        law = EntryLaw.discrete([(1.0, 1.0), (3.0, 1.0)], sigma=2.0)
        vals, probs = law.point_masses()
        assert probs.sum() == pytest.approx(1.0)
        assert np.dot(probs, vals) == pytest.approx(0.0, abs=1e-15)
        assert np.dot(probs, vals**2) == pytest.approx(4.0)

    @pytest.mark.parametrize("law", LAWS[:4], ids=lambda l: l.kind)
    def test_sample_moments(self, law):
        x = law.sample(np.random.default_rng(5), 10**6)
        n = x.size
        for k, target in ((1, 0.0), (2, law.sigma**2), (4, law.m4)):
            se = np.std(x**k) / math.sqrt(n)
            assert abs(np.mean(x**k) - target) <= 5 * se + 1e-15

    def test_cdf_symmetric(self):
        for law in LAWS:
            x = np.linspace(-3, 3, 13) + 0.01
            assert np.allclose(law.cdf(x) + law.cdf(-x), 1.0)

    def test_bad_kind(self):
        with pytest.raises(ValueError):
            EntryLaw("cauchy")
        with pytest.raises(DomainError):
            EntryLaw.gaussian(0.0)

    def test_roundtrip(self):
        for law in LAWS:
            assert EntryLaw.from_dict(law.to_dict()) == law


class TestDeformationSpec:
    def test_order_of_diagonal(self):
        d = THREE.diagonal_entries(6)
        assert d.tolist() == [3, 3, 0.5, 0, 0, -2.5]
        assert THREE.rank == 4

    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            DeformationSpec.diagonal([(1, 1), (2, 1)])
        with pytest.raises(ValueError):
            DeformationSpec.diagonal([(0.0, 1)])

    def test_full(self):
        spec = DeformationSpec.full(3.0)
        assert spec.spikes == ((3.0, 1),) and spec.rank == 1

    def test_rank_overflow(self):
        with pytest.raises(ValueError):
            THREE.diagonal_entries(3)

    def test_roundtrip(self):
        for spec in (THREE, DeformationSpec.full(2), DeformationSpec.rotated([(2, 1)], 9)):
            assert DeformationSpec.from_dict(spec.to_dict()) == spec


class TestSemicircle:
    def test_pdf_examples(self):
        assert semicircle_pdf(0, 1) == pytest.approx(1 / math.pi, abs=1e-15)
        assert semicircle_pdf(2, 1) == 0
        assert semicircle_pdf(1, 1) == pytest.approx(math.sqrt(3) / (2 * math.pi), abs=1e-15)

    def test_pdf_integrates_to_one(self):
        assert semicircle_expect(lambda s: np.ones_like(s), 1.7) == pytest.approx(1.0, abs=1e-12)

    def test_cdf_examples(self):
        assert semicircle_cdf(0, 1) == 0.5
        assert semicircle_cdf(-2, 1) == 0
        assert semicircle_cdf(1, 1) == pytest.approx(CDF_1, abs=1e-12)

    def test_cdf_matches_quadrature(self):
        from scipy.integrate import quad
        for x in (-1.9, -0.3, 0.7, 1.99):
            val, _ = quad(lambda t: semicircle_pdf(t, 1.0), -2, x, epsabs=1e-13)
            assert semicircle_cdf(x, 1.0) == pytest.approx(val, abs=1e-10)

    def test_domain(self):
        with pytest.raises(DomainError):
            semicircle_pdf(0, 0)
        with pytest.raises(DomainError):
            semicircle_cdf(0, -1)


class TestStieltjes:
    def test_examples(self):
        assert g_sc(2.5, 1) == pytest.approx(0.5, abs=1e-15)
        assert g_sc(-2.5, 1) == pytest.approx(-0.5, abs=1e-15)
        assert g_sc(1j, 1) == pytest.approx(-0.618033988749894848j, abs=1e-15)

    def test_inside_support_raises(self):
        with pytest.raises(DomainError):
            g_sc(1.0, 1)
        with pytest.raises(DomainError):
            g_sc(complex(2.0, 0.0), 1)

    @pytest.mark.parametrize("sigma", [0.5, 1.0, 2.0])
    def test_residual_branch_and_bounds(self, sigma):
        rng = np.random.default_rng(int(sigma * 10))
        z = rng.uniform(-6, 6, 1000) * sigma + 1j * rng.uniform(-3, 3, 1000) * sigma
        z = z[z.imag != 0]
        g = g_sc(z, sigma)
        assert np.max(np.abs(sigma**2 * g**2 - z * g + 1)) <= 1e-12
        assert np.all(g.imag * z.imag < 0)
        assert np.all(np.abs(g) <= 1 / np.abs(z.imag) + 1e-15)
        far = np.abs(z) > 2 * sigma
        assert np.all(np.abs(g[far]) <= 1 / (np.abs(z[far]) - 2 * sigma) + 1e-12)

    def test_derivative_examples(self):
        assert g_sc_derivative(3.0, 1) == pytest.approx(G_PRIME_3, abs=1e-12)
        assert g_sc_derivative(100.0, 1) == pytest.approx(G_PRIME_100, rel=1e-9)
        assert abs(g_sc_derivative(1j, 1)) <= 1.0

    def test_derivative_finite_difference(self):
        rng = np.random.default_rng(3)
        for z in rng.uniform(-4, 4, 50) + 1j * rng.uniform(0.2, 3, 50):
            h = 1e-6
            fd = (g_sc(z + h) - g_sc(z - h)) / (2 * h)
            assert g_sc_derivative(z) == pytest.approx(fd, rel=1e-6)
            assert abs(g_sc_derivative(z)) <= abs(z.imag) ** -2

    def test_derivative_is_minus_second_moment(self):
        z = 0.4 + 0.8j
        assert g_sc_derivative(z) == pytest.approx(-resolvent_second_moment(z), abs=1e-10)

    def test_z_sigma_examples(self):
        assert z_sigma(0.5, 1) == 2.5
        assert z_sigma(1, 1) == 2
        assert z_sigma(g_sc(3.0, 1), 1) == pytest.approx(3.0, abs=1e-12)
        with pytest.raises(DomainError):
            z_sigma(0, 1)

    @pytest.mark.parametrize("sigma", [0.5, 1.0, 2.0])
    def test_round_trip(self, sigma):
        rng = np.random.default_rng(11)
        x = rng.uniform(2.0001, 10, 500) * sigma * rng.choice([-1, 1], 500)
        assert np.max(np.abs(z_sigma(g_sc(x, sigma), sigma) - x)) <= 1e-10

    def test_rho_identity(self):
        rng = np.random.default_rng(12)
        for theta in rng.uniform(1.001, 20, 100) * rng.choice([-1, 1], 100):
            assert 1 / g_sc(rho(theta, 1.0), 1.0) == pytest.approx(theta, abs=1e-10)


class TestSpikeMaps:
    def test_rho(self):
        assert rho(2, 1) == 2.5
        assert rho(3, 1) == pytest.approx(10 / 3)
        assert rho(-2.5, 1) == pytest.approx(-2.9)
        with pytest.raises(OutsideOutlierRegime):
            rho(1.0, 1.0)

    def test_rho_monotone(self):
        t = np.linspace(1.01, 10, 200)
        r = [rho(x, 1) for x in t]
        assert np.all(np.diff(r) > 0) and min(r) > 2

    def test_sigma_theta(self):
        assert sigma_theta(2, 1) == pytest.approx(math.sqrt(0.75))
        assert sigma_theta(1e9, 1) == pytest.approx(1.0)
        assert sigma_theta(1.25, 1) == pytest.approx(0.6)
        with pytest.raises(DomainError):
            sigma_theta(0.5, 1)

    def test_v_theta_examples(self):
        assert v_theta(EntryLaw.gaussian(), 2, "real") == pytest.approx(2 / 3)
        assert v_theta(EntryLaw.gaussian(), 2, "complex") == pytest.approx(1 / 3)
        assert v_theta(EntryLaw.rademacher(), 2, "real") == pytest.approx(1 / 6)
        with pytest.raises(DomainError):
            v_theta(EntryLaw.gaussian(), 1.0, "real")

    @pytest.mark.parametrize("field", ["real", "complex"])
    def test_v_theta_positive(self, field):
        for law in LAWS:
            for theta in np.linspace(1.001, 8, 40) * law.sigma:
                assert v_theta(law, theta, field) > 0
                assert v_theta(law, -theta, field) > 0


class TestSupport:
    def test_examples(self):
        ss = support_set(DeformationSpec.diagonal([(3, 1), (-2.5, 1)]), 1, 0)
        assert ss.bottom_outliers == (pytest.approx(-2.9),)
        assert ss.top_outliers == (pytest.approx(10 / 3),)
        assert ss.bulk == (-2, 2)
        assert support_set(DeformationSpec.none(), 1).components() == [(-2, 2)]
        ss = support_set(DeformationSpec.diagonal([(0.5, 1)]), 1, 0.1)
        assert ss.components() == [(-2.1, 2.1)]

    def test_forbidden_gaps(self):
        ss = support_set(DeformationSpec.diagonal([(2, 1)]), 1, 0.1)
        gaps = ss.forbidden_gaps()
        assert gaps[0] == (-math.inf, -2.1)
        assert gaps[1] == pytest.approx((2.1, 2.4))
        assert gaps[2] == (pytest.approx(2.6), math.inf)
        assert ss.forbidden_gaps(truncate=8)[-1][1] == 8
        assert ss.is_separated
        assert not support_set(DeformationSpec.diagonal([(2, 1)]), 1, 10).is_separated

    def test_widening(self):
        a = support_set(THREE, 1, 0).components()
        b = support_set(THREE, 1, 0.2).components()
        for (l0, h0), (l1, h1) in zip(a, b):
            assert l1 == pytest.approx(l0 - 0.2) and h1 == pytest.approx(h0 + 0.2)


class TestPredictLimits:
    def test_three_spikes(self):
        d = predict_limits(THREE, 1, 500).as_dict()
        assert d == {1: pytest.approx(10 / 3), 2: pytest.approx(10 / 3), 3: 2.0, 499: -2.0, 500: pytest.approx(-2.9)}

    def test_undeformed(self):
        assert predict_limits(DeformationSpec.none(), 1, 100).as_dict() == {1: 2.0, 100: -2.0}

    def test_threshold_is_not_outlier(self):
        pred = predict_limits(DeformationSpec.diagonal([(1, 1)]), 1, 10)
        assert pred.limit_of(1) == 2.0
        assert all(e.kind != "top-outlier" for e in pred.entries)

    def test_ranges_disjoint_and_complete(self):
        spec = DeformationSpec.diagonal([(4, 3), (2, 2), (-1.5, 2), (-3, 1)])
        pred = predict_limits(spec, 1, 50)
        idx = [i for e in pred.entries for i in range(e.first, e.last + 1)]
        assert len(idx) == len(set(idx))
        assert sum(e.last - e.first + 1 for e in pred.entries if e.kind.endswith("outlier")) == 8

    def test_rank_overflow(self):
        with pytest.raises(ValueError):
            predict_limits(THREE, 1, 3)


class TestSeparationPlan:
    def test_top_gap(self):
        plan = separation_plan(2.2, 3.0, THREE, 1, 500)
        assert plan.i_N == 2
        assert plan.a_prime == pytest.approx(A_PRIME_22, abs=1e-12)
        assert plan.b_prime == pytest.approx(B_PRIME_30, abs=1e-12)
        # the rounded value quoted with this example
        assert abs(plan.a_prime - 1.558312) < 1e-4

    def test_bottom_gap_is_valid_split(self):
        # [a', b'] = [-2.2569, -1.5583] does not contain -2.5, so this is a valid split
        spec = DeformationSpec.diagonal([(3, 1), (-2.5, 1)])
        plan = separation_plan(-2.7, -2.2, spec, 1, 500)
        assert plan.a_prime == pytest.approx(-2.25691785736085294, abs=1e-12)
        assert plan.b_prime == pytest.approx(-1.55825756949558430, abs=1e-12)
        assert plan.i_N == 499

    def test_gap_next_to_bulk_is_valid(self):
        # [-2.2, -2.1] lies in the gap between -2.9 and the bulk
        plan = separation_plan(-2.2, -2.1, THREE, 1, 500)
        assert plan.i_N == 499

    def test_above_everything(self):
        assert separation_plan(3.5, 4.0, THREE, 1, 500).i_N == 0

    def test_inside_support(self):
        with pytest.raises(IntervalInsideSupport):
            separation_plan(-2.2, -1.9, THREE, 1, 500)
        with pytest.raises(IntervalInsideSupport):
            separation_plan(3.0, 3.5, THREE, 1, 500)

    def test_monotone_split_property(self):
        rng = np.random.default_rng(4)
        spec = DeformationSpec.diagonal([(4, 1), (2.5, 2), (1.5, 1), (0.3, 1), (-2, 1), (-5, 2)])
        ss = support_set(spec, 1)
        for lo, hi in ss.forbidden_gaps(truncate=9):
            for _ in range(20):
                a, b = np.sort(rng.uniform(lo, hi, 2))
                plan = separation_plan(a, b, spec, 1, 40)
                assert plan.a_prime < plan.b_prime
                eig = spec.eigenvalues(40)
                assert not np.any((eig >= plan.a_prime) & (eig <= plan.b_prime))

    def test_invalid_split_guard_exists(self):
        assert issubclass(InvalidSplit, ValueError)


class TestCorrection:
    def test_zero_without_spikes(self):
        law = EntryLaw.gaussian()
        assert E_sigma(1 + 1j, DeformationSpec.none(), law, field="complex") == 0
        assert L_sigma(1 + 1j, DeformationSpec.none(), law, field="complex") == 0

    def test_spike_term(self):
        val = E_sigma(3.0, DeformationSpec.diagonal([(2, 1)]), EntryLaw.gaussian(), field="complex")
        assert val == pytest.approx(3.2360679774997897, abs=1e-12)

    def test_real_extra_term(self):
        val = E_sigma(3.0, DeformationSpec.none(), EntryLaw.gaussian(), field="real")
        assert val == pytest.approx(M2_3, abs=1e-10)

    def test_golden_values(self):
        spike = DeformationSpec.diagonal([(2, 1)])
        assert L_sigma(1 + 1j, spike, EntryLaw.gaussian(), field="complex") == pytest.approx(L_COMPLEX_SPIKE2, abs=1e-10)
        assert L_sigma(1 + 1j, DeformationSpec.none(), EntryLaw.gaussian(), field="real") == pytest.approx(L_REAL_GAUSS, abs=1e-10)
        assert L_sigma(1 + 1j, DeformationSpec.none(), EntryLaw.rademacher(), field="real") == pytest.approx(L_REAL_RADEMACHER, abs=1e-10)

    def test_schwarz_reflection(self):
        spike = DeformationSpec.diagonal([(2, 1), (-1.5, 1)])
        for law in (EntryLaw.gaussian(), EntryLaw.rademacher()):
            for field in ("real", "complex"):
                for z in (1 + 1j, -0.3 + 0.6j, 2.5 + 0.1j):
                    a = L_sigma(z.conjugate(), spike, law, field=field)
                    assert a == pytest.approx(L_sigma(z, spike, law, field=field).conjugate(), abs=1e-12)
                    # symmetric law and the reflected spike set give L(-conj z) = -conj L(z)
                    mirrored = DeformationSpec.diagonal([(1.5, 1), (-2, 1)])
                    b = L_sigma(-z.conjugate(), mirrored, law, field=field)
                    assert b == pytest.approx(-L_sigma(z, spike, law, field=field).conjugate(), abs=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            E_sigma(1.0, DeformationSpec.none(), EntryLaw.gaussian())
        with pytest.raises(DomainError):
            L_sigma(0.0, DeformationSpec.none(), EntryLaw.gaussian())
        with pytest.raises(DomainError):
            E_sigma(2.5, DeformationSpec.diagonal([(2, 1)]), EntryLaw.gaussian())


class TestFluctuationTarget:
    def test_gaussian_real(self):
        t = fluctuation_target(EntryLaw.gaussian(), 2, field="real")
        assert t.variance == pytest.approx(1.5, abs=1e-12)
        assert t.scale_c == 0.75
        x = np.linspace(-4, 4, 9)
        from scipy.stats import norm
        assert np.allclose(t.cdf(x), norm.cdf(x, scale=math.sqrt(1.5)), atol=1e-12)

    def test_gaussian_complex(self):
        t = fluctuation_target(EntryLaw.gaussian(), 2, field="complex")
        assert t.variance == pytest.approx(0.75, abs=1e-12)

    @pytest.mark.parametrize("sigma", [0.5, 1.0, 3.0])
    @pytest.mark.parametrize("theta_ratio", [1.1, 2.0, 5.0])
    def test_gaussian_consistency(self, sigma, theta_ratio):
        theta = sigma * theta_ratio
        st2 = sigma_theta(theta, sigma) ** 2
        law = EntryLaw.gaussian(sigma)
        assert fluctuation_target(law, theta, field="complex").variance == pytest.approx(st2, abs=1e-12 * max(1, st2))
        assert fluctuation_target(law, theta, field="real").variance == pytest.approx(2 * st2, abs=1e-12 * max(1, st2))

    def test_rademacher_real(self):
        t = fluctuation_target(EntryLaw.rademacher(), 2, field="real")
        assert t.cdf(0.0) == pytest.approx(0.5, abs=1e-15)
        assert t.base_law.sigma == pytest.approx(math.sqrt(2))
        assert t.gaussian_variance == pytest.approx(1 / 6)
        x = np.linspace(0, 2, 200001)
        assert x[np.argmax(t.pdf(x))] == pytest.approx(RAD_MODE, abs=1e-4)

    @pytest.mark.parametrize("law", LAWS, ids=lambda l: f"{l.kind}-{l.sigma}")
    @pytest.mark.parametrize("field", ["real", "complex"])
    def test_valid_cdf(self, law, field):
        t = fluctuation_target(law, 2.5 * law.sigma, field=field)
        x = np.linspace(-12, 12, 10**4) * law.sigma
        f = t.cdf(x)
        assert np.all(np.diff(f) >= -1e-15)
        assert f[0] < 1e-9 and f[-1] > 1 - 1e-9
        assert np.max(np.abs(t.cdf(-x) - (1 - f))) <= 1e-9

    def test_uniform_cdf_against_closed_form(self):
        # U uniform on [-a, a] plus N(0, s^2): closed form via u Phi(u) + phi(u)
        from scipy.stats import norm
        law = EntryLaw.uniform(1.0)
        t = fluctuation_target(law, 2.0, field="complex")
        a, s = math.sqrt(3), math.sqrt(t.gaussian_variance)
        psi = lambda u: u * norm.cdf(u) + norm.pdf(u)  # noqa: E731
        y = np.linspace(-4, 4, 41)
        exact = s / (2 * a) * (psi((y + a) / s) - psi((y - a) / s))
        assert np.allclose(t.cdf(t.scale_c * y), exact, atol=1e-9)

    def test_domain(self):
        with pytest.raises(DomainError):
            fluctuation_target(EntryLaw.gaussian(), 0.9)
