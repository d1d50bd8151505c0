from __future__ import annotations

import math
import statistics

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special
from scipy import stats as sps

from lingshift.errors import DegenerateInput
from lingshift.stats import (
    Significance,
    benjamini_hochberg,
    betainc,
    classify,
    log_beta,
    pearson,
    student_t_test,
    t_sf,
    welch_t_test,
)
from oracles import pearson_direct, t_two_sided_quad, welch_reference

finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False)
samples = st.lists(finite, min_size=2, max_size=15).filter(lambda xs: max(xs) > min(xs))


class TestTailProbability:
    def test_zero_and_infinity(self):
        for df in (0.5, 1, 3.7, 30, 1e5, 1e9):
            assert t_sf(0.0, df) == 1.0
            assert t_sf(math.inf, df) == 0.0
            assert t_sf(-math.inf, df) == 0.0

    def test_quadrature_point(self):
        assert abs(t_sf(2.0, 10) - t_two_sided_quad(2.0, 10)) < 1e-8

    @pytest.mark.parametrize("df", [0.7, 1, 2, 4.5, 9, 25, 120, 3000])
    @pytest.mark.parametrize("t", [0.05, 0.9, 1.7, 2.5, 4.0, 9.0])
    def test_against_quadrature(self, t, df):
        assert t_sf(t, df) == pytest.approx(t_two_sided_quad(t, df), abs=1e-9)

    def test_cauchy_closed_form(self):
        # df = 1 is the Cauchy distribution
        for t in (0.3, 1.0, 7.0):
            assert t_sf(t, 1) == pytest.approx(1 - 2 * math.atan(t) / math.pi, abs=1e-13)

    def test_gaussian_limit(self):
        for t in (0.5, 1.0, 1.96, 3.0):
            assert abs(t_sf(t, 10_000) - math.erfc(t / math.sqrt(2))) < 1e-4

    @pytest.mark.parametrize("df", [5e6, 9.9e6, 1.01e7, 1e9, 1e13])
    def test_large_df_branch(self, df):
        for t in (0.5, 2.0, 4.0):
            assert t_sf(t, df) == pytest.approx(2 * sps.t.sf(t, df), abs=1e-10)

    @given(st.floats(0, 50), st.floats(0, 50), st.floats(0.3, 1e4))
    def test_monotone_in_abs_t(self, t1, t2, df):
        lo, hi = sorted((t1, t2))
        assert t_sf(hi, df) <= t_sf(lo, df) + 1e-15
        assert t_sf(-lo, df) == t_sf(lo, df)

    def test_rejects_bad_df(self):
        with pytest.raises(ValueError):
            t_sf(1.0, 0)

    @given(st.floats(0.1, 300), st.floats(0.1, 300), st.floats(0, 1))
    def test_betainc_matches_scipy(self, a, b, x):
        assert betainc(a, b, x) == pytest.approx(special.betainc(a, b, x), abs=1e-11)

    @given(st.floats(0.1, 1e8), st.floats(0.1, 1e3))
    def test_log_beta(self, a, b):
        # scipy's betaln drifts by ~1e-7 for a ~ 5e7, so the oracle is 40-digit mpmath
        with mpmath.workdps(40):
            expected = float(mpmath.log(mpmath.beta(a, b)))
        assert log_beta(a, b) == pytest.approx(expected, rel=1e-12, abs=1e-12)


class TestClassify:
    @pytest.mark.parametrize("p, expected", [
        (0.0005, Significance.HIGHLY), (0.001, Significance.VERY), (0.005, Significance.VERY),
        (0.01, Significance.SIGNIFICANT), (0.03, Significance.SIGNIFICANT),
        (0.05, Significance.NOT), (0.5, Significance.NOT), (0.0, Significance.HIGHLY),
        (1.0, Significance.NOT),
    ])
    def test_bands(self, p, expected):
        assert classify(p) is expected

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            classify(1.2)


class TestWelch:
    def test_identical_samples(self):
        a = [0.31, 0.35, 0.29, 0.4]
        r = welch_t_test(a, list(a))
        assert r.t_statistic == 0.0 and r.p_value == 1.0
        assert r.significance_class is Significance.NOT

    def test_separated_ranges(self):
        a, b = [1, 2, 3, 4, 5, 6], [11, 12, 13, 14, 15, 16]
        r = welch_t_test(a, b)
        t, df, p = welch_reference(a, b)
        assert r.t_statistic == pytest.approx(t, rel=1e-14) and r.degrees_of_freedom == pytest.approx(df)
        assert r.p_value == pytest.approx(p, abs=1e-12)
        assert r.p_value < 0.001 and r.significance_class is Significance.HIGHLY

    def test_random_gaussian_vs_quadrature(self):
        rng = np.random.default_rng(42)
        for _ in range(40):
            a = rng.normal(0, 1, rng.integers(2, 30))
            b = rng.normal(rng.uniform(-1, 1), rng.uniform(0.2, 3), rng.integers(2, 30))
            r = welch_t_test(a.tolist(), b.tolist())
            _, _, p = welch_reference(a, b)
            assert abs(r.p_value - p) < 1e-9
            ref = sps.ttest_ind(a, b, equal_var=False)
            assert r.p_value == pytest.approx(ref.pvalue, abs=1e-10)
            assert r.t_statistic == pytest.approx(ref.statistic, rel=1e-10)

    def test_student_vs_scipy(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            a, b = rng.normal(0, 1, 7), rng.normal(0.8, 2, 9)
            ref = sps.ttest_ind(a, b, equal_var=True)
            r = student_t_test(a.tolist(), b.tolist())
            assert r.p_value == pytest.approx(ref.pvalue, abs=1e-10)
            assert r.degrees_of_freedom == 14

    @given(samples, samples)
    def test_symmetric(self, a, b):
        ab, ba = welch_t_test(a, b), welch_t_test(b, a)
        assert ab.t_statistic == -ba.t_statistic
        assert ab.p_value == ba.p_value

    @given(samples, st.floats(0, 100), st.floats(0, 100))
    def test_monotone_in_mean_gap(self, a, d1, d2):
        lo, hi = sorted((d1, d2))
        p_lo = welch_t_test(a, [x + lo for x in a]).p_value
        p_hi = welch_t_test(a, [x + hi for x in a]).p_value
        assert p_hi <= p_lo + 1e-12

    def test_tiny_variance_df(self):
        # b constant after rounding, so df collapses to len(a) - 1 exactly
        a = [0.0, 2.6e-134, 1.3e-134]
        res = welch_t_test(a, [x + 1.0 for x in a])
        assert res.degrees_of_freedom == 2.0 and res.p_value < 1e-100 and not res.degenerate

    def test_degenerate_conventions(self):
        same = welch_t_test([2.0, 2.0, 2.0], [2.0, 2.0])
        assert same.p_value == 1.0 and same.degenerate
        apart = welch_t_test([2.0, 2.0], [3.0, 3.0])
        assert apart.p_value == 0.0 and apart.degenerate and apart.t_statistic == -math.inf

    def test_too_few(self):
        with pytest.raises(DegenerateInput):
            welch_t_test([1.0], [1.0, 2.0])


class TestPearson:
    def test_perfect(self):
        x = [1.0, 2.5, 3.0, 7.0, -4.0]
        assert pearson(x, x).r == 1.0
        assert pearson(x, [-2 * v + 7 for v in x]).r == -1.0

    def test_direct_formula(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            n = int(rng.integers(3, 60))
            x = rng.normal(size=n).tolist()
            y = (rng.normal(size=n) + rng.uniform(-2, 2) * np.array(x)).tolist()
            assert abs(pearson(x, y).r - pearson_direct(x, y)) < 1e-12
            assert pearson(x, y).r == pytest.approx(statistics.correlation(x, y), abs=1e-12)

    @given(st.lists(st.tuples(finite, finite), min_size=3, max_size=30),
           st.floats(0.01, 100), st.floats(-100, 100))
    def test_affine_invariance(self, pairs, scale, shift):
        x, y = [p[0] for p in pairs], [p[1] for p in pairs]
        try:
            r = pearson(x, y).r
        except DegenerateInput:
            return
        moved = [scale * v + shift for v in x]
        if max(moved) == min(moved):
            return
        assert pearson(moved, y).r == pytest.approx(r, abs=1e-9)
        assert pearson([-v for v in moved], y).r == pytest.approx(-r, abs=1e-9)

    def test_degenerate(self):
        with pytest.raises(DegenerateInput):
            pearson([1, 2], [3, 4])
        with pytest.raises(DegenerateInput):
            pearson([1, 1, 1], [1, 2, 3])
        with pytest.raises(DegenerateInput):
            pearson([1, 2, 3], [1, 2])


def test_benjamini_hochberg():
    p = [0.01, 0.04, 0.03, 0.2, 0.001]
    assert benjamini_hochberg(p) == pytest.approx(sps.false_discovery_control(p).tolist())
    assert benjamini_hochberg([]) == []
