"""Estimators and tests against hand-computed and independent oracles."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gazeassist import stats


class TestLaplace:
    def test_uniform_prior(self):
        assert stats.laplace(0, 0) == 0.5

    def test_symmetry(self):
        assert stats.laplace(5, 10) == 0.5

    def test_seven_of_eight(self):
        assert stats.laplace(7, 8) == pytest.approx(0.8)

    def test_rejects_excess_successes(self):
        with pytest.raises(ValueError):
            stats.laplace(3, 2)

    @given(st.integers(0, 200), st.integers(0, 200))
    def test_strictly_interior(self, x, extra):
        n = x + extra
        assert 0.0 < stats.laplace(x, n) < 1.0


class TestAdjustedWald:
    def test_zero_successes_clamps_low_end(self):
        low, high = stats.adjusted_wald(0, 10)
        assert low == 0.0
        assert 0.0 < high < 1.0

    def test_ten_of_twenty(self):
        # hand evaluation of the adjusted-Wald formula with z = 1.9599640:
        # center (10 + z^2/2)/(20 + z^2) = 0.5, half-width 0.2007020
        low, high = stats.adjusted_wald(10, 20)
        assert low == pytest.approx(0.2992980, abs=1e-4)
        assert high == pytest.approx(0.7007020, abs=1e-4)

    def test_narrow_level_collapses_to_center(self):
        low, high = stats.adjusted_wald(7, 10, level=1e-9)
        center = 7 / 10  # z ~ 0 leaves the plain proportion
        assert low == pytest.approx(center, abs=1e-6)
        assert high == pytest.approx(center, abs=1e-6)

    @given(st.integers(0, 60), st.integers(1, 60))
    def test_contains_adjusted_center(self, x, extra):
        n = min(x + extra, 60)
        x = min(x, n)
        low, high = stats.adjusted_wald(x, n)
        z = 1.9599639845400545
        center = (x + z * z / 2) / (n + z * z)
        assert low <= center <= high
        assert 0.0 <= low <= high <= 1.0


def pearson_2x2(x1, n1, x2, n2):
    """Independent chi-square oracle from the explicit 2x2 table."""
    a, b, c, d = x1, n1 - x1, x2, n2 - x2
    n = n1 + n2
    return n * (a * d - b * c) ** 2 / ((a + b) * (c + d) * (a + c) * (b + d))


class TestN1Chisq:
    def test_identical_proportions(self):
        res = stats.n1_chisq(5, 10, 5, 10)
        assert res.statistic == 0.0
        assert res.p_value == 1.0

    def test_clearly_different(self):
        res = stats.n1_chisq(9, 10, 1, 10)
        expected = pearson_2x2(9, 10, 1, 10) * 19 / 20
        assert res.statistic == pytest.approx(expected, rel=1e-12)
        assert res.p_value < 0.01

    def test_near_null(self):
        res = stats.n1_chisq(6, 10, 5, 10)
        expected = pearson_2x2(6, 10, 5, 10) * 19 / 20
        assert res.statistic == pytest.approx(expected, rel=1e-12)
        assert res.p_value > 0.5

    def test_degenerate_pooled_table(self):
        res = stats.n1_chisq(0, 5, 0, 7)
        assert res.degenerate and res.p_value == 1.0
        res = stats.n1_chisq(5, 5, 7, 7)
        assert res.degenerate and res.p_value == 1.0

    @given(st.integers(0, 12), st.integers(1, 12), st.integers(0, 12), st.integers(1, 12))
    def test_symmetric_under_group_swap(self, x1, n1, x2, n2):
        x1, x2 = min(x1, n1), min(x2, n2)
        a = stats.n1_chisq(x1, n1, x2, n2)
        b = stats.n1_chisq(x2, n2, x1, n1)
        assert a.statistic == pytest.approx(b.statistic, abs=1e-12)
        assert a.p_value == pytest.approx(b.p_value, abs=1e-12)


class TestGeoMeanCI:
    def test_constant_durations(self):
        s = stats.geo_mean_ci([3.0, 3.0, 3.0])
        assert s.geo_mean == pytest.approx(3.0)
        assert s.ci_low == pytest.approx(3.0)
        assert s.ci_high == pytest.approx(3.0)

    def test_two_point_geometric_mean(self):
        s = stats.geo_mean_ci([1.0, 100.0])
        assert s.geo_mean == pytest.approx(10.0)

    def test_powers_of_two_against_t_table(self):
        # logs are ln2*{1,2,3}: mean 2 ln2, sd ln2, t(0.975, 2) = 4.3027
        s = stats.geo_mean_ci([2.0, 4.0, 8.0])
        half = 4.302653 * math.log(2.0) / math.sqrt(3.0)
        assert s.geo_mean == pytest.approx(4.0)
        assert s.ci_low == pytest.approx(4.0 * math.exp(-half), rel=1e-4)
        assert s.ci_high == pytest.approx(4.0 * math.exp(half), rel=1e-4)

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            stats.geo_mean_ci([1.0])
        with pytest.raises(ValueError):
            stats.geo_mean_ci([1.0, -2.0])

    @given(
        st.lists(st.floats(0.1, 50.0), min_size=2, max_size=8),
        st.floats(0.1, 10.0),
    )
    @settings(max_examples=50)
    def test_rescaling_equivariance(self, times, k):
        base = stats.geo_mean_ci(times)
        scaled = stats.geo_mean_ci([k * t for t in times])
        assert scaled.geo_mean == pytest.approx(k * base.geo_mean, rel=1e-9)
        assert scaled.ci_low == pytest.approx(k * base.ci_low, rel=1e-9)
        assert scaled.ci_high == pytest.approx(k * base.ci_high, rel=1e-9)


class TestTwoSampleT:
    def test_identical_samples(self):
        res = stats.two_sample_t([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert res.statistic == 0.0
        assert res.p_value == 1.0

    def test_separated_samples(self):
        res = stats.two_sample_t([0.0, 0.0, 0.0, 0.0], [10.0, 10.0, 10.0, 10.0001])
        assert res.p_value == pytest.approx(0.0, abs=1e-6)

    def test_hand_welch_example(self):
        # means 2 and 3, both variances 1, se = sqrt(2/3), dof = 4
        res = stats.two_sample_t([1.0, 2.0, 3.0], [2.0, 3.0, 4.0])
        assert res.statistic == pytest.approx(-1.224745, abs=1e-5)
        assert res.p_value == pytest.approx(0.2878, abs=1e-3)

    def test_degenerate_equal_constants(self):
        res = stats.two_sample_t([5.0, 5.0], [5.0, 5.0])
        assert res.degenerate and res.p_value == 1.0

    @given(
        st.lists(st.floats(-100, 100), min_size=2, max_size=8),
        st.lists(st.floats(-100, 100), min_size=2, max_size=8),
    )
    @settings(max_examples=50)
    def test_antisymmetric_under_swap(self, a, b):
        r1 = stats.two_sample_t(a, b)
        r2 = stats.two_sample_t(b, a)
        assert r1.statistic == pytest.approx(-r2.statistic, abs=1e-9) or (
            math.isinf(r1.statistic) and math.isinf(r2.statistic)
        )
        assert r1.p_value == pytest.approx(r2.p_value, abs=1e-9)


class TestFailureTable:
    def test_fixture_column_means(self):
        table = stats.aggregate_failure_table(stats.PARAM_SET_FAILURE_RATES)
        assert round(table.column_means["cutting"]) == 59
        assert round(table.column_means["grasping"]) == 54
        assert table.column_means["cutting"] == pytest.approx(58.75)
        assert table.column_means["grasping"] == pytest.approx(54.125)

    def test_fixture_minima_and_ties(self):
        table = stats.aggregate_failure_table(stats.PARAM_SET_FAILURE_RATES)
        assert table.minima["cutting"] == [2, 6, 7]
        assert table.minima["grasping"] == [5]
        assert table.rates[5]["grasping"] == 38

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            stats.aggregate_failure_table({})


class TestFailureTableFromRecords:
    class Rec:
        def __init__(self, boundary_set, task, outcome):
            self.config = {"boundary_set": boundary_set, "task": task}
            self.outcome = outcome

    def test_groups_and_rates(self):
        records = (
            [self.Rec(2, "cutting", "success")] * 3
            + [self.Rec(2, "cutting", "fail_wrong_location")]
            + [self.Rec(5, "grasping", "success")] * 4
            + [self.Rec(5, "grasping", "fail_hazard_contact")] * 4
        )
        table = stats.failure_table_from_records(records)
        assert table.rates[2]["cutting"] == pytest.approx(25.0)
        assert table.rates[5]["grasping"] == pytest.approx(50.0)
        assert table.minima["cutting"] == [2]

    def test_records_without_set_are_skipped(self):
        records = [self.Rec(None, "cutting", "success")]
        with pytest.raises(ValueError):
            stats.failure_table_from_records(records)


def test_mean_ci_hand_example():
    # mean 2, sd 1, t(0.975, 2) = 4.3027
    s = stats.mean_ci([1.0, 2.0, 3.0])
    half = 4.302653 / math.sqrt(3.0)
    assert s.mean == pytest.approx(2.0)
    assert s.ci_low == pytest.approx(2.0 - half, rel=1e-4)
    assert s.ci_high == pytest.approx(2.0 + half, rel=1e-4)
