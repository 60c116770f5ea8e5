"""Seed mixing, train/test splits, bootstrap resampling."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from upliftkit import DataError, bootstrap_resample, mix_seed, split_train_test

from conftest import make_cohort


class TestMixSeed:
    def test_deterministic(self):
        assert mix_seed(42, 3) == mix_seed(42, 3)

    def test_distinct_children(self):
        children = {mix_seed(42, i) for i in range(1000)}
        assert len(children) == 1000

    def test_distinct_parents(self):
        assert mix_seed(1, 0) != mix_seed(2, 0)

    def test_negative_index_allowed(self):
        assert mix_seed(7, -1) != mix_seed(7, 0)

    @given(st.integers(0, 2**64 - 1), st.integers(-8, 10_000))
    @settings(max_examples=200, deadline=None)
    def test_range_is_uint64(self, seed, index):
        child = mix_seed(seed, index)
        assert 0 <= child < 2**64

    def test_usable_as_generator_seed(self):
        rng = np.random.default_rng(mix_seed(123, 5))
        assert 0.0 <= rng.random() < 1.0


class TestSplitTrainTest:
    @pytest.fixture()
    def cohort(self, two_cat_schema):
        n = 23
        return make_cohort(
            two_cat_schema,
            [[i % 2] for i in range(n)],
            [i % 2 for i in range(n)],
            [(i // 2) % 2 for i in range(n)],
        )

    def test_sizes_floor(self, cohort):
        train, test = split_train_test(cohort, 0.8, np.random.default_rng(0))
        assert train.n_rows == 18  # floor(23 * 0.8)
        assert test.n_rows == 5

    def test_exhaustive_and_disjoint(self, cohort):
        train, test = split_train_test(cohort, 0.8, np.random.default_rng(0))
        # rows are not individually unique, so compare multisets of row tuples
        def rows(c):
            return sorted(
                zip(c.codes[:, 0].tolist(), c.treatment.tolist(), c.outcome.tolist())
            )

        assert sorted(rows(train) + rows(test)) == rows(cohort)

    def test_deterministic_given_seed(self, cohort):
        a = split_train_test(cohort, 0.8, np.random.default_rng(99))
        b = split_train_test(cohort, 0.8, np.random.default_rng(99))
        for left, right in zip(a, b):
            assert np.array_equal(left.codes, right.codes)
            assert np.array_equal(left.treatment, right.treatment)
            assert np.array_equal(left.outcome, right.outcome)

    def test_different_seeds_differ(self, cohort):
        a, _ = split_train_test(cohort, 0.8, np.random.default_rng(1))
        b, _ = split_train_test(cohort, 0.8, np.random.default_rng(2))
        same = np.array_equal(a.treatment, b.treatment) and np.array_equal(
            a.codes, b.codes
        )
        assert not same

    @pytest.mark.parametrize("fraction", [0.0, 1.0, -0.2, 1.5])
    def test_fraction_out_of_range(self, cohort, fraction):
        with pytest.raises(DataError):
            split_train_test(cohort, fraction, np.random.default_rng(0))

    def test_degenerate_part_raises(self, two_cat_schema):
        tiny = make_cohort(two_cat_schema, [[0], [1], [0]], [1, 0, 1], [1, 0, 0])
        with pytest.raises(DataError):
            split_train_test(tiny, 0.1, np.random.default_rng(0))  # floor = 0

    def test_single_row_raises(self, two_cat_schema):
        one = make_cohort(two_cat_schema, [[0]], [1], [1])
        with pytest.raises(DataError):
            split_train_test(one, 0.5, np.random.default_rng(0))


class TestBootstrapResample:
    def test_size_and_membership(self, hetero_cohort):
        sample = bootstrap_resample(hetero_cohort, 700, np.random.default_rng(4))
        assert sample.n_rows == 700
        # resampled codes must all occur in the source cohort
        source = {tuple(row) for row in hetero_cohort.codes.tolist()}
        assert {tuple(row) for row in sample.codes.tolist()} <= source

    def test_deterministic(self, hetero_cohort):
        a = bootstrap_resample(hetero_cohort, 100, np.random.default_rng(5))
        b = bootstrap_resample(hetero_cohort, 100, np.random.default_rng(5))
        assert np.array_equal(a.codes, b.codes)
        assert np.array_equal(a.outcome, b.outcome)

    def test_draws_with_replacement(self, two_cat_schema):
        tiny = make_cohort(two_cat_schema, [[0], [1]], [1, 0], [1, 0])
        big = bootstrap_resample(tiny, 50, np.random.default_rng(6))
        assert big.n_rows == 50  # must repeat rows

    def test_bad_size(self, hetero_cohort):
        with pytest.raises(DataError):
            bootstrap_resample(hetero_cohort, 0, np.random.default_rng(0))
