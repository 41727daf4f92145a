import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from brownsym.distributions import (
    Arcsine,
    Empirical,
    KappaDisc,
    Rademacher,
    UniformSym,
    empirical_from_samples,
    ks_distance,
    parse_distribution,
)

ANALYTIC = {
    "arcsine": Arcsine(),
    "kappa-0.5": KappaDisc(0.5),
    "kappa-0.9": KappaDisc(0.9),
    "rademacher": Rademacher(),
    "uniform": UniformSym(1.0),
}
_rng = np.random.default_rng(11)
ALL = dict(ANALYTIC, empirical=empirical_from_samples(_rng.normal(size=257)),
           ties=empirical_from_samples([0, 0, 1, 1, 1, 2.5]))

probability = st.floats(min_value=1e-12, max_value=1 - 1e-12, exclude_min=True, exclude_max=True)


def kappa_cdf_oracle(x, k):
    eta = (1 + k * k) / (1 - k * k)
    return math.atan(eta * x / math.sqrt(1 - x * x)) / math.pi + 0.5


class TestCdf:
    @pytest.mark.parametrize("dist", [Arcsine(), KappaDisc(0.0), KappaDisc(0.5), KappaDisc(0.99), Rademacher()])
    def test_median_value(self, dist):
        assert dist.cdf(0.0) == 0.5

    @pytest.mark.parametrize("name", sorted(ALL))
    def test_limits_and_monotone(self, name):
        d = ALL[name]
        xs = np.linspace(-3, 3, 2001)
        F = np.asarray(d.cdf(xs))
        assert F[0] == 0 and F[-1] == 1
        assert np.all(np.diff(F) >= 0)

    def test_right_continuity_at_atom(self):
        r = Rademacher()
        assert r.cdf(-1.0) == 0.5
        assert r.cdf(np.nextafter(-1.0, -2)) == 0.0
        assert r.cdf(1.0) == 1.0

    @pytest.mark.parametrize("k", [0.1, 0.5, 0.9])
    def test_kappa_against_formula(self, k):
        d = KappaDisc(k)
        for x in np.linspace(-0.99, 0.99, 41):
            assert d.cdf(x) == pytest.approx(kappa_cdf_oracle(x, k), abs=1e-14)


class TestQuantile:
    def test_examples(self):
        assert Arcsine().quantile(0.5) == 0
        assert Arcsine().quantile(0.25) == pytest.approx(-math.sqrt(2) / 2, abs=1e-15)
        assert Rademacher().quantile(0.5) == -1
        assert Rademacher().quantile(0.5000001) == 1
        assert UniformSym(1.0).quantile(0.75) == pytest.approx(0.5, abs=1e-15)

    @pytest.mark.parametrize("u", [0.0, 1.0, -0.1, 1.5])
    def test_outside_open_interval(self, u):
        with pytest.raises(ValueError):
            Arcsine().quantile(u)

    @pytest.mark.parametrize("name", sorted(ALL))
    @settings(max_examples=150, deadline=None)
    @given(u1=probability, u2=probability)
    def test_monotone(self, name, u1, u2):
        lo, hi = sorted((u1, u2))
        d = ALL[name]
        assert d.quantile(lo) <= d.quantile(hi)

    @pytest.mark.parametrize("name", sorted(ALL))
    @settings(max_examples=300, deadline=None)
    @given(u=probability)
    def test_galois(self, name, u):
        d = ALL[name]
        assert d.cdf(d.quantile(u)) >= u

    def test_galois_on_dense_grid(self):
        u = np.linspace(0, 1, 100_003)[1:-1]
        for d in ALL.values():
            assert np.all(np.asarray(d.cdf(d.quantile(u))) >= u)

    @pytest.mark.parametrize("name", sorted(ANALYTIC))
    def test_sampling_consistency(self, name):
        d = ANALYTIC[name]
        xs = d.quantile(np.random.default_rng(5).uniform(size=100_000))
        assert ks_distance(xs, d) < 0.02

    @pytest.mark.parametrize("k", [0.2, 0.5, 0.8])
    def test_kappa_matches_numerical_inversion(self, k):
        d = KappaDisc(k)
        for u in np.linspace(0.01, 0.99, 37):
            ref = brentq(lambda x: kappa_cdf_oracle(x, k) - u, -1 + 1e-15, 1 - 1e-15, xtol=1e-15)
            assert d.quantile(u) == pytest.approx(ref, abs=1e-12)


class TestKsDistance:
    def test_matches_scipy_for_continuous_law(self):
        from scipy import stats

        xs = np.random.default_rng(2).uniform(-1, 1, 5000)
        d = UniformSym(1.0)
        assert ks_distance(xs, d) == pytest.approx(stats.kstest(xs, d.cdf).statistic, abs=1e-15)

    def test_atoms(self):
        r = Rademacher()
        assert ks_distance([-1.0, 1.0], r) == 0.0
        assert ks_distance([-1.0, -1.0, 1.0, 1.0], r) == 0.0
        assert ks_distance([-1.0, -1.0, -1.0, 1.0], r) == pytest.approx(0.25)


class TestEmpirical:
    def test_two_point(self):
        e = empirical_from_samples([-1, 1])
        assert e.quantile(0.5) == -1
        assert e.quantile(0.51) == 1

    def test_centering(self):
        e = empirical_from_samples([0, 2, 4])
        np.testing.assert_array_equal(e.sorted_samples, [-2, 0, 2])

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=60))
    def test_sorted_and_centred(self, xs):
        e = empirical_from_samples(xs)
        s = e.sorted_samples
        assert np.all(np.diff(s) >= 0)
        scale = max(1.0, float(np.max(np.abs(xs))))
        assert abs(math.fsum(s)) / len(s) <= 1e-13 * scale

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.integers(-5, 5), min_size=1, max_size=40), probability)
    def test_order_statistic(self, xs, u):
        e = empirical_from_samples(xs)
        s = e.sorted_samples
        n = len(s)
        # brute force: smallest sample whose empirical cdf reaches u
        ref = min(v for v in s if np.sum(s <= v) / n >= u)
        assert e.quantile(u) == ref

    def test_quantile_at_multiples_of_one_over_n(self):
        e = Empirical(np.arange(10.0))
        for k in range(1, 10):
            assert e.quantile(k / 10) == k - 1

    @pytest.mark.parametrize("bad", [[], [0.0, math.nan], [math.inf]])
    def test_errors(self, bad):
        with pytest.raises(ValueError):
            empirical_from_samples(bad)

    def test_unsorted_constructor(self):
        with pytest.raises(ValueError):
            Empirical(np.array([1.0, 0.0]))


class TestPhi:
    def test_examples(self):
        assert Arcsine().phi(math.pi / 2) == pytest.approx(0, abs=1e-15)
        assert KappaDisc(0.5).phi(math.pi / 2) == pytest.approx(0, abs=1e-15)
        assert KappaDisc(0.5).phi(math.pi / 4) == pytest.approx(-math.sqrt(9 / 34), abs=1e-14)

    def test_even(self):
        th = np.linspace(0.01, 3.1, 50)
        for d in ALL.values():
            np.testing.assert_array_equal(d.phi(th), d.phi(-th))

    @pytest.mark.parametrize("theta", [0.0, math.pi, -math.pi, 4.0])
    def test_domain(self, theta):
        with pytest.raises(ValueError):
            Arcsine().phi(theta)

    @pytest.mark.parametrize("k", [0.1, 0.5, 0.9])
    def test_kappa_closed_form(self, k):
        d = KappaDisc(k)
        th = np.random.default_rng(1).uniform(1e-3, math.pi - 1e-3, 1000)
        np.testing.assert_allclose(d.phi(th), d.phi_closed_form(th), rtol=0, atol=1e-12)


class TestDensity:
    def test_examples(self):
        assert Arcsine().density(0.0) == pytest.approx(1 / math.pi, rel=1e-15)
        assert KappaDisc(0.5).density(0.0) == pytest.approx(5 / (3 * math.pi), rel=1e-14)

    def test_kappa_zero_is_arcsine(self):
        xs = np.linspace(-0.999, 0.999, 101)
        np.testing.assert_allclose(KappaDisc(1e-9).density(xs), Arcsine().density(xs), rtol=1e-12)

    @pytest.mark.parametrize("dist", [Arcsine(), KappaDisc(0.3), KappaDisc(0.9), UniformSym(2.0)])
    def test_mass_one(self, dist):
        assert dist.density_mass() == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("dist", [Rademacher(), empirical_from_samples([0.0, 1.0])])
    def test_no_density(self, dist):
        with pytest.raises(TypeError):
            dist.density(0.0)


class TestFamilies:
    def test_kappa_eta(self):
        assert KappaDisc(0.5).eta == pytest.approx(5 / 3)
        for k in (0.0, 0.3, 0.99):
            assert KappaDisc(k).eta >= 1
        assert KappaDisc(0.3).eta > 1

    @pytest.mark.parametrize("k", [-0.1, 1.0, 0.995])
    def test_kappa_range(self, k):
        with pytest.raises(ValueError):
            KappaDisc(k)

    @pytest.mark.parametrize("name", sorted(ANALYTIC))
    def test_json_roundtrip(self, name):
        d = ANALYTIC[name]
        back = parse_distribution(d.to_json())
        u = np.linspace(0.01, 0.99, 17)
        np.testing.assert_array_equal(back.quantile(u), d.quantile(u))

    def test_zero_mean(self):
        for d in ANALYTIC.values():
            u = (np.arange(200_000) + 0.5) / 200_000
            assert abs(np.mean(d.quantile(u))) < 1e-12
