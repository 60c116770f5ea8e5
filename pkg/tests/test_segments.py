"""Extreme segments, category profiles, per-category uplift, targeting."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from upliftkit import (
    SEGMENT_BOTTOM,
    SEGMENT_TOP,
    ConfigError,
    DataError,
    TLearner,
    average_treatment_effect,
    extreme_deciles,
    group_cate_table,
    one_hot_encode,
    run_segment_profiles,
    segment_profile,
    targeting_policy,
)

from conftest import make_cohort


class TestExtremeDeciles:
    def test_twenty_rows_default_fraction(self):
        tau = np.linspace(-1.0, 1.0, 20)
        bottom, top = extreme_deciles(tau, 0.1)
        assert bottom.tolist() == [0, 1]
        assert top.tolist() == [18, 19]

    def test_all_equal_falls_back_to_row_order(self):
        bottom, top = extreme_deciles(np.zeros(100), 0.1)
        assert bottom.tolist() == list(range(10))
        assert top.tolist() == list(range(90, 100))

    def test_half_fraction_partitions(self):
        rng = np.random.default_rng(0)
        tau = rng.normal(size=10)
        bottom, top = extreme_deciles(tau, 0.5)
        assert sorted(bottom.tolist() + top.tolist()) == list(range(10))

    @given(
        st.lists(st.floats(-1, 1, allow_nan=False, width=32), min_size=2, max_size=80),
        st.sampled_from([0.1, 0.25, 0.5]),
    )
    @settings(max_examples=60, deadline=None)
    def test_disjoint_equal_sized_and_ordered(self, values, fraction):
        tau = np.array(values, dtype=np.float64)
        size = int(tau.shape[0] * fraction)
        if size < 1:
            with pytest.raises(DataError):
                extreme_deciles(tau, fraction)
            return
        bottom, top = extreme_deciles(tau, fraction)
        assert bottom.shape == top.shape == (size,)
        assert not set(bottom.tolist()) & set(top.tolist())
        assert tau[bottom].max() <= tau[top].min()
        assert (np.diff(bottom) > 0).all() and (np.diff(top) > 0).all()

    def test_fraction_bounds(self):
        with pytest.raises(ConfigError):
            extreme_deciles(np.zeros(10), 0.0)
        with pytest.raises(ConfigError):
            extreme_deciles(np.zeros(10), 0.6)

    def test_too_small(self):
        with pytest.raises(DataError):
            extreme_deciles(np.zeros(1), 0.5)
        with pytest.raises(DataError, match="empty"):
            extreme_deciles(np.zeros(5), 0.1)


class TestSegmentProfile:
    def test_four_row_example(self):
        from upliftkit import CategoricalSchema, Variable

        schema = CategoricalSchema(
            variables=(Variable("grade", ("A", "B", "C")),)
        )
        cohort = make_cohort(
            schema, [[0], [0], [1], [2]], [1, 0, 1, 0], [1, 1, 0, 0]
        )
        profile = segment_profile(cohort, np.arange(4), "grade")
        assert profile.proportions == (0.5, 0.25, 0.25)
        assert profile.categories == ("A", "B", "C")
        assert profile.n_rows == 4.0
        assert sum(profile.proportions) == pytest.approx(1.0)

    def test_single_row(self, schema3):
        cohort = make_cohort(schema3, [[2, 3, 1]], [1], [1])
        profile = segment_profile(cohort, [0], "region", label="x")
        assert profile.segment == "x"
        assert profile.proportions == (0.0, 0.0, 0.0, 1.0)

    def test_subset_only(self, schema3):
        cohort = make_cohort(
            schema3,
            [[0, 0, 0], [1, 1, 1], [2, 2, 0]],
            [1, 0, 1],
            [1, 0, 1],
        )
        profile = segment_profile(cohort, [1, 2], "age_band")
        assert profile.proportions == (0.0, 0.5, 0.5)

    def test_empty_raises(self, hetero_cohort):
        with pytest.raises(DataError, match="empty"):
            segment_profile(hetero_cohort, np.array([], dtype=np.int64), "age_band")

    def test_to_dict(self, schema3):
        cohort = make_cohort(schema3, [[0, 0, 0]], [1], [1])
        d = segment_profile(cohort, [0], "device", label=SEGMENT_TOP).to_dict()
        assert d["segment"] == SEGMENT_TOP
        assert d["proportions"] == {"phone": 1.0, "desktop": 0.0}


class TestGroupCateTable:
    def test_recovers_planted_effects(self, hetero_cohort):
        table = group_cate_table(hetero_cohort, "age_band")
        by_cat = {row.category: row for row in table.rows}
        assert by_cat["young"].uplift == pytest.approx(0.4, abs=0.08)
        assert by_cat["middle"].uplift == pytest.approx(0.0, abs=0.08)
        assert by_cat["old"].uplift == pytest.approx(-0.3, abs=0.08)

    def test_absent_category_undefined_with_counts(self, schema3):
        cohort = make_cohort(
            schema3,
            [[0, 0, 0], [0, 1, 0], [0, 1, 1], [0, 2, 0]],
            [1, 0, 1, 0],
            [1, 0, 1, 0],
        )
        table = group_cate_table(cohort, "region")
        west = table.rows[3]
        assert west.category == "west"
        assert np.isnan(west.uplift)
        assert west.n_treated == 0 and west.n_control == 0
        assert np.isnan(west.mean_treated) and np.isnan(west.mean_control)

    def test_single_arm_category_undefined(self, schema3):
        cohort = make_cohort(
            schema3,
            [[0, 0, 0], [0, 0, 0], [1, 0, 0], [1, 0, 0]],
            [1, 1, 1, 0],
            [1, 0, 1, 0],
        )
        table = group_cate_table(cohort, "age_band")
        young = table.rows[0]
        assert np.isnan(young.uplift)  # only treated rows
        assert young.n_treated == 2 and young.n_control == 0
        assert young.mean_treated == pytest.approx(0.5)

    def test_all_successes_both_arms(self, two_cat_schema):
        cohort = make_cohort(
            two_cat_schema, [[0], [0], [0], [0]], [1, 1, 0, 0], [1, 1, 1, 1]
        )
        row = group_cate_table(cohort, "group").rows[0]
        assert row.mean_treated == 1.0
        assert row.mean_control == 1.0
        assert row.uplift == 0.0

    def test_ate_recombines_from_cells(self, hetero_cohort):
        table = group_cate_table(hetero_cohort, "region")
        n_t = sum(row.n_treated for row in table.rows)
        n_c = sum(row.n_control for row in table.rows)
        mean_t = sum(row.n_treated * row.mean_treated for row in table.rows) / n_t
        mean_c = sum(row.n_control * row.mean_control for row in table.rows) / n_c
        ate = average_treatment_effect(
            hetero_cohort.treatment, hetero_cohort.outcome
        )
        assert mean_t - mean_c == pytest.approx(ate, abs=1e-9)


class TestTargetingPolicy:
    def test_threshold_below_range_selects_all(self):
        tau = np.array([-0.5, 0.0, 0.5])
        assert targeting_policy(tau, -1.0).tolist() == [0, 1, 2]

    def test_threshold_above_range_selects_none(self):
        tau = np.array([-0.5, 0.0, 0.5])
        assert targeting_policy(tau, 1.0).tolist() == []

    def test_strictly_greater(self):
        tau = np.array([0.5, 0.2, 0.21])
        assert targeting_policy(tau, 0.2).tolist() == [0, 2]

    @given(st.lists(st.floats(-1, 1, allow_nan=False, width=32), min_size=1, max_size=60))
    @settings(max_examples=50, deadline=None)
    def test_monotone_in_threshold(self, values):
        tau = np.array(values, dtype=np.float64)
        low = set(targeting_policy(tau, -0.25).tolist())
        high = set(targeting_policy(tau, 0.25).tolist())
        assert high <= low

    def test_selects_rows_with_planted_positive_effect(self, hetero_cohort):
        X = one_hot_encode(hetero_cohort).values
        tau = TLearner(random_state=31).fit(
            X, hetero_cohort.treatment, hetero_cohort.outcome
        ).predict(X)
        selected = targeting_policy(tau, 0.2)
        assert selected.shape[0] > 0
        # young rows carry +0.4; anything above 0.2 should be mostly young
        assert hetero_cohort.true_effect[selected].mean() >= 0.3


class TestBootstrapSegments:
    def test_profiles_average_and_sum_to_one(self, hetero_cohort, small_config):
        reports = run_segment_profiles(
            hetero_cohort, small_config, ("age_band", "device")
        )
        assert set(reports) == {"age_band", "device"}
        for report in reports.values():
            assert report.bottom.segment == SEGMENT_BOTTOM
            assert report.top.segment == SEGMENT_TOP
            assert sum(report.bottom.proportions) == pytest.approx(1.0, abs=1e-9)
            assert sum(report.top.proportions) == pytest.approx(1.0, abs=1e-9)
        age = reports["age_band"]
        # bottom segment concentrates on the backfiring category
        assert age.bottom.proportions[2] > 0.6
        assert age.top.proportions[0] > 0.6

    def test_deterministic(self, hetero_cohort, small_config):
        a = run_segment_profiles(hetero_cohort, small_config, ("age_band",))
        b = run_segment_profiles(hetero_cohort, small_config, ("age_band",))
        assert a["age_band"].to_dict() == b["age_band"].to_dict()

    def test_segment_size_recorded(self, hetero_cohort, small_config):
        reports = run_segment_profiles(
            hetero_cohort, small_config, ("age_band",), fraction=0.25
        )
        # population 400, train fraction 0.8: 80 test rows, quarter = 20
        assert reports["age_band"].bottom.n_rows == 20.0
        assert reports["age_band"].fraction == 0.25
