import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from ginibre_extremes.errors import DomainError
from ginibre_extremes.scaling import (
    Ensemble,
    Regime,
    RegimeDecl,
    ScalingConstants,
    a_of,
    b_of,
    c1_of,
    c2_of,
    constants_for,
    limit_constants,
    q1,
    q2,
    rescale_max,
    u_n,
    unscale,
    v_alpha,
    v_n,
)
from ginibre_extremes.specfun import digamma


class TestEnsembleAndRegime:
    def test_alpha_beta(self):
        e = Ensemble(1000, 10)
        assert e.alpha_n == 100.0
        assert e.beta_n == 1e8

    @pytest.mark.parametrize("n,k", [(0, 1), (1, 0), (2.5, 1), (-3, 2)])
    def test_invalid(self, n, k):
        with pytest.raises(DomainError):
            Ensemble(n, k)

    def test_decl_invariants(self):
        assert RegimeDecl.zero(math.inf).beta == math.inf
        assert RegimeDecl.finite(2.0, -math.inf).eta == -math.inf
        with pytest.raises(DomainError):
            RegimeDecl(Regime.FINITE, alpha=0.0, eta=0.0)
        with pytest.raises(DomainError):
            RegimeDecl(Regime.FINITE, alpha=1.0)
        with pytest.raises(DomainError):
            RegimeDecl(Regime.ZERO, beta=1.0, eta=0.0)
        with pytest.raises(DomainError):
            RegimeDecl(Regime.INFINITE, beta=1.0)
        with pytest.raises(DomainError):
            RegimeDecl(Regime.ZERO)


class TestConstants:
    def test_zero_limit(self):
        assert abs(a_of(0.0)) < 1e-15
        assert b_of(0.0) == 1.0
        sc = constants_for(Ensemble(8, 512), RegimeDecl.zero(1.0))
        assert (sc.a, sc.b) == (0.0, 1.0)
        assert sc.c1 is None and sc.c2 is None

    def test_formulas(self):
        e = Ensemble(1000, 10)
        sc = constants_for(e)
        al = 100.0
        a = math.sqrt(math.log(al + 1)) - math.log(
            math.sqrt(2 * math.pi) * math.log(al + math.exp(1 / math.sqrt(2 * math.pi)))
        ) / math.sqrt(math.log(al + math.e))
        assert sc.a_n == pytest.approx(a, rel=1e-15)
        assert sc.b_n == pytest.approx(1 / math.sqrt(math.log(al + math.e)), rel=1e-15)
        assert sc.centering == pytest.approx(10 * digamma(1000.0), rel=1e-15)

    def test_infinite_marks_limits_not_applicable(self):
        sc = constants_for(Ensemble(10**6, 1), RegimeDecl.infinite())
        assert sc.alpha is None and sc.a is None and sc.b is None and sc.c1 is None
        with pytest.raises(DomainError):
            sc.require_finite()

    def test_finite_uses_declared_alpha(self):
        sc = constants_for(Ensemble(70, 64), RegimeDecl.finite(1.0, 0.0))
        assert sc.alpha == 1.0
        assert sc.a == a_of(1.0) and sc.b == b_of(1.0)
        assert sc.alpha_n == 70 / 64 and sc.a_n == a_of(70 / 64)

    @pytest.mark.parametrize("alpha", [0.3, 1.0, 4.0, 50.0])
    def test_c1_finite_difference(self, alpha):
        h = 1e-5
        fd = (a_of(alpha + h) - a_of(alpha - h)) / (2 * h)
        assert abs(c1_of(alpha) - fd) <= 1e-6

    @pytest.mark.parametrize("alpha", [0.3, 1.0, 4.0, 50.0])
    def test_c2_finite_difference(self, alpha):
        h = 1e-5
        fd = (b_of(alpha + h) - b_of(alpha - h)) / (2 * h)
        assert abs(c2_of(alpha) + fd) <= 1e-6

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 3.0])
    def test_taylor_remainder_is_quadratic(self, alpha):
        hs = np.array([1e-2, 1e-3, 1e-4])
        a, b, c1, c2 = a_of(alpha), b_of(alpha), c1_of(alpha), c2_of(alpha)
        ra = np.array([abs(a_of(alpha + h) - a - c1 * h) for h in hs])
        rb = np.array([abs(b_of(alpha + h) - b + c2 * h) for h in hs])
        for r in (ra, rb):
            slope = np.polyfit(np.log(hs), np.log(r), 1)[0]
            assert abs(slope - 2) <= 0.1

    def test_c_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            c1_of(0.0)
        with pytest.raises(DomainError):
            c2_of(-1.0)


class TestCoordinates:
    def test_u_n(self):
        sc = ScalingConstants(alpha_n=4.0, a_n=0.3, b_n=0.5, centering=0.0)
        assert u_n(2, 1.0, sc) == pytest.approx(1.8, abs=1e-15)
        assert u_n(0, 2.0, sc) == pytest.approx(0.3 + 0.5 * 2.0)
        assert u_n(7, 0.1, sc) - u_n(6, 0.1, sc) == pytest.approx(0.5, abs=1e-15)

    def test_v_alpha(self):
        sc = limit_constants(1.0)
        assert v_alpha(0, 0.0, sc) == sc.a
        x = (-1.0 - sc.a) / sc.b
        assert v_alpha(3, x, sc) == pytest.approx(2.0, abs=1e-14)
        sc4 = limit_constants(4.0)
        assert v_alpha(5, 0.3, sc4) - v_alpha(4, 0.3, sc4) == pytest.approx(0.5, abs=1e-14)

    def test_v_alpha_regime_mismatch(self):
        with pytest.raises(DomainError):
            v_alpha(0, 0.0, constants_for(Ensemble(100, 1)))

    def test_v_n_m0(self):
        e = Ensemble(50, 7)
        sc = constants_for(e)
        from ginibre_extremes.specfun import polygamma

        expected = (sc.a_n + sc.b_n * 0.4) / math.sqrt(50 * polygamma(1, 50.0))
        assert v_n(0, 0.4, e, sc) == pytest.approx(expected, rel=1e-14)

    def test_v_n_extended_precision(self):
        e = Ensemble(100, 100)
        sc = constants_for(e)
        mp.mp.dps = 40
        n, k, m = mp.mpf(100), mp.mpf(100), 1
        al = n / k
        a_n = mp.sqrt(mp.log(al + 1)) - mp.log(
            mp.sqrt(2 * mp.pi) * mp.log(al + mp.exp(1 / mp.sqrt(2 * mp.pi)))
        ) / mp.sqrt(mp.log(al + mp.e))
        tri = mp.polygamma(1, n - m)
        ref = k * (mp.digamma(n) - mp.digamma(n - m)) / mp.sqrt(k * tri) + a_n / mp.sqrt(n * tri)
        assert abs(v_n(1, 0.0, e, sc) - float(ref)) <= 1e-12

    @pytest.mark.parametrize("n,k", [(1000, 10), (2000, 2000), (5000, 50), (400, 1)])
    def test_v_n_close_to_u_n(self, n, k):
        e = Ensemble(n, k)
        sc = constants_for(e)
        m = np.arange(1, n // 10 + 1)
        for x in (-1.0, 0.0, 1.0, 3.0):
            u = u_n(m, x, sc)
            ok = np.abs(u) > 0.5
            ratio = v_n(m, x, e, sc) / u
            assert np.all(np.abs(ratio[ok] - 1) <= 3 * m[ok] / n)

    def test_v_n_domain(self):
        e = Ensemble(5, 2)
        with pytest.raises(DomainError):
            v_n(5, 0.0, e, constants_for(e))


def _q1_expanded(alpha, m, s):
    sa = math.sqrt(alpha)
    return (2 * m * m + (3 - 2 * sa * s) * m + 2 * alpha * s * s - 3 * sa * s - 2 * alpha) / (12 * sa)


class TestPolynomials:
    def test_q1_examples(self):
        for alpha in (0.5, 1.0, 2.0):
            sc = limit_constants(alpha)
            x = -sc.a / sc.b  # v_alpha(0, x) = 0
            assert q1(0, x, sc) == pytest.approx(-math.sqrt(alpha) / 6, abs=1e-14)
        sc = limit_constants(1.0)
        x = -sc.a / sc.b  # v_alpha(1, x) = 1
        assert q1(1, x, sc) == pytest.approx(0.25, abs=1e-14)

    def test_q2_example(self):
        sc = limit_constants(2.0)
        assert q2(0, 0.0, sc) == sc.c1

    @given(st.floats(0.05, 50.0), st.integers(0, 200), st.floats(-8.0, 14.0))
    def test_q1_matches_expansion_in_s(self, alpha, m, x):
        sc = limit_constants(alpha)
        s = sc.a + sc.b * x
        ref = _q1_expanded(alpha, m, s)
        assert abs(q1(m, x, sc) - ref) <= 1e-12 * max(1.0, abs(ref))

    @given(st.floats(0.05, 50.0), st.integers(0, 200), st.floats(-8.0, 14.0))
    def test_q2_affine(self, alpha, m, x):
        sc = limit_constants(alpha)
        ref = sc.c1 - sc.c2 * x - m / (2 * alpha**1.5)
        assert abs(q2(m, x, sc) - ref) <= 1e-12 * max(1.0, abs(ref))

    def test_regime_mismatch(self):
        sc = constants_for(Ensemble(8, 512), RegimeDecl.zero(1.0))
        with pytest.raises(DomainError):
            q1(0, 0.0, sc)
        with pytest.raises(DomainError):
            q2(0, 0.0, sc)


class TestRescale:
    def test_examples(self):
        e = Ensemble(30, 4)
        sc = constants_for(e)
        assert rescale_max(sc.centering, e, sc) == pytest.approx(-sc.a_n / sc.b_n, abs=1e-12)
        raw = sc.centering + (sc.a_n + sc.b_n) / math.sqrt(sc.alpha_n)
        assert rescale_max(raw, e, sc) == pytest.approx(1.0, abs=1e-12)

    @given(st.floats(-50, 50), st.integers(1, 10**6), st.integers(1, 10**4))
    def test_round_trip(self, x, n, k):
        e = Ensemble(n, k)
        sc = constants_for(e)
        back = rescale_max(unscale(x, e, sc), e, sc)
        assert abs(back - x) <= 1e-12 * max(1.0, abs(x)) * max(1.0, abs(sc.centering) * math.sqrt(sc.alpha_n) / sc.b_n)

    def test_strictly_increasing_preserves_argmax(self):
        e = Ensemble(12, 3)
        sc = constants_for(e)
        raw = np.random.default_rng(0).normal(size=500) + sc.centering
        x = rescale_max(raw, e, sc)
        assert np.argmax(x) == np.argmax(raw)
        order = np.argsort(raw)
        assert np.all(np.diff(x[order]) > 0)
