import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from ginibre_extremes.empirics import (
    DistanceReport,
    Ecdf,
    Method,
    dkw_radius,
    ks_critical_value,
    kolmogorov_distance,
    two_sample_ks,
    w1_distance,
)
from ginibre_extremes.errors import DomainError
from ginibre_extremes.limits import LimitLaw
from ginibre_extremes.sampler import SeedSpec, exact_cdf_k1
from ginibre_extremes.scaling import Ensemble, constants_for
from ginibre_extremes.specfun import norm_cdf

NORMAL = LimitLaw.normal()
GUMBEL = LimitLaw.gumbel()


class TestEcdf:
    def test_right_continuous(self):
        ec = Ecdf([2.0, 1.0, 2.0, 3.0])
        assert ec(0.5) == 0.0
        assert ec(1.0) == 0.25
        assert ec.left_limit(2.0) == 0.25
        assert ec(2.0) == 0.75
        assert ec(3.0) == 1.0
        assert len(ec) == 4

    def test_rejects_bad_input(self):
        with pytest.raises(DomainError):
            Ecdf([])
        with pytest.raises(DomainError):
            Ecdf([1.0, np.inf])

    @given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=50))
    def test_monotone_zero_one(self, vals):
        ec = Ecdf(vals)
        xs = np.linspace(min(vals) - 1, max(vals) + 1, 101)
        f = ec(xs)
        assert f[0] == 0.0 and f[-1] == 1.0
        assert np.all(np.diff(f) >= 0)


class TestRadii:
    def test_dkw(self):
        assert dkw_radius(10**6) == pytest.approx(math.sqrt(math.log(200) / 2e6))
        assert dkw_radius(10**6) == pytest.approx(0.00163, abs=5e-6)
        with pytest.raises(DomainError):
            dkw_radius(0)

    def test_ks_critical(self):
        assert ks_critical_value(20_000, 20_000) == pytest.approx(1.628 * math.sqrt(2 / 20_000))


class TestKolmogorov:
    def test_hand_example(self):
        table = {1.0: 0.2, 2.0: 0.5, 3.0: 0.9}
        f = lambda xs: np.array([table[float(x)] for x in np.atleast_1d(xs)])  # noqa: E731
        rep = kolmogorov_distance(Ecdf([1.0, 2.0, 3.0]), f)
        assert rep.statistic == pytest.approx(0.9 - 2 / 3, abs=1e-15)
        assert rep.statistic == pytest.approx(0.2333, abs=5e-5)
        assert rep.argmax == 3.0

    def test_single_point(self):
        rep = kolmogorov_distance(Ecdf([0.0]), NORMAL)
        assert rep.statistic == 0.5 and rep.argmax == 0.0

    def test_ties(self):
        rep = kolmogorov_distance(Ecdf([0.0, 0.0]), NORMAL)
        assert rep.statistic == 0.5

    def test_dkw_coverage_across_seeds(self):
        violations = 0
        for seed in range(50):
            x = SeedSpec(seed, 77).generator().standard_normal(5000)
            rep = kolmogorov_distance(Ecdf(x), NORMAL, {"seed": seed})
            violations += rep.statistic > rep.dkw_radius_99
        assert violations <= 3

    @pytest.mark.parametrize("seed", range(20))
    def test_matches_dense_grid_scan(self, seed):
        rng = SeedSpec(seed, 88).generator()
        x = np.round(rng.normal(size=int(rng.integers(5, 40))), 3)
        ec = Ecdf(x)
        grid = np.arange(x.min() - 1e-3, x.max() + 1e-3, 1e-4)
        # the grid, plus the data points with their left limits, brackets every jump
        pts = np.concatenate([grid, ec.sorted_values])
        brute = max(
            np.max(np.abs(ec(pts) - norm_cdf(pts))),
            np.max(np.abs(ec.left_limit(ec.sorted_values) - norm_cdf(ec.sorted_values))),
        )
        assert kolmogorov_distance(ec, NORMAL).statistic == pytest.approx(brute, abs=1e-12)

    def test_report_json(self):
        rep = kolmogorov_distance(Ecdf([0.1, 0.2, 0.3]), GUMBEL, {"seed": 5, "count_drawn": 3})
        d = json.loads(rep.to_json())
        assert set(d) == {"method", "statistic", "argmax", "dkw_radius_99", "count", "metadata"}
        assert d["method"] == "KolmogorovVsLaw"
        assert d["metadata"]["seed"] == 5
        assert d["dkw_radius_99"] == pytest.approx(math.sqrt(math.log(200) / 6))

    def test_negative_statistic_rejected(self):
        with pytest.raises(DomainError):
            DistanceReport(Method.KOLMOGOROV_VS_LAW, -1.0, 0.0, 0.0, 1)


class TestTwoSample:
    def test_identical(self):
        x = np.arange(200.0)
        assert two_sample_ks(x, x.copy()).statistic == 0.0

    def test_disjoint(self):
        rep = two_sample_ks(np.arange(100.0), np.arange(100.0) + 1000)
        assert rep.statistic == 1.0
        assert rep.method is Method.TWO_SAMPLE_KS

    def test_matches_scipy(self):
        rng = SeedSpec(1, 5).generator()
        a, b = rng.normal(size=300), rng.normal(0.2, size=500)
        assert two_sample_ks(a, b).statistic == pytest.approx(stats.ks_2samp(a, b).statistic, abs=1e-15)

    def test_calibration(self):
        ok = 0
        for seed in range(100):
            rng = SeedSpec(seed, 99).generator()
            rep = two_sample_ks(rng.normal(size=10_000), rng.normal(size=10_000))
            ok += rep.statistic < rep.metadata["critical_value_01"]
        assert ok >= 97


class TestW1:
    def test_shift(self):
        rep = w1_distance(lambda x: norm_cdf(np.asarray(x) - 0.3), NORMAL)
        assert rep.statistic == pytest.approx(0.3, abs=1e-6)
        assert rep.method is Method.W1_VS_LAW

    def test_identical(self):
        # only the certified tail remainder is left
        assert w1_distance(GUMBEL.cdf, GUMBEL).statistic == pytest.approx(0.0, abs=1e-8)

    def test_ecdf_against_closed_form(self):
        # W1 between a two-atom ECDF {0, 1} and the uniform law on [0, 1] is 1/4
        uni = lambda x: np.clip(np.asarray(x, dtype=float), 0.0, 1.0)  # noqa: E731
        rep = w1_distance(Ecdf([0.0, 1.0]), uni)
        assert rep.statistic == pytest.approx(0.25, abs=1e-7)

    def test_tolerance_halving(self):
        law = LimitLaw.phi_alpha(1.0)
        f = lambda x: norm_cdf(np.asarray(x) * 1.1 + 0.2)  # noqa: E731
        a = w1_distance(f, law, tol=1e-6).statistic
        b = w1_distance(f, law, tol=5e-7).statistic
        assert abs(a - b) < 10 * 1e-6

    def test_tail_remainder_small(self):
        rep = w1_distance(lambda x: norm_cdf(np.asarray(x) - 0.3), NORMAL)
        assert rep.metadata["tail_remainder"] <= 1e-8

    def test_narrow_bounds(self):
        with pytest.raises(DomainError):
            w1_distance(GUMBEL.cdf, NORMAL, bounds=(-3, 3))
        with pytest.raises(DomainError):
            w1_distance(GUMBEL.cdf, NORMAL, bounds=(3, -3))

    def test_exact_k1_gumbel_rate(self):
        e = Ensemble(10**5, 1)
        sc = constants_for(e)
        rep = w1_distance(lambda x: exact_cdf_k1(e, sc, x), GUMBEL)
        la = math.log(e.alpha_n)
        target = math.log(la) ** 2 / (2 * la)
        assert target / 1.5 <= rep.statistic <= 1.5 * target
