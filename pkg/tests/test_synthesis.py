"""Synthetic cohort generator: ground truth, clipping, determinism, rates."""

from __future__ import annotations

import numpy as np
import pytest

from upliftkit import (
    CategoricalSchema,
    DataError,
    Rule,
    SyntheticSpec,
    Variable,
    generate_cohort,
    potential_probabilities,
    true_cate,
)


class TestRules:
    def test_empty_where_matches_all(self, schema3):
        rule = Rule(where=(), effect=0.1)
        codes = np.zeros((5, 3), dtype=np.int16)
        assert rule.mask(schema3, codes).all()

    def test_conjunction(self, schema3):
        rule = Rule(
            where=(("age_band", "young"), ("region", "south")), effect=0.2
        )
        codes = np.array(
            [[0, 1, 0], [0, 0, 0], [1, 1, 0]], dtype=np.int16
        )
        assert rule.mask(schema3, codes).tolist() == [True, False, False]

    def test_unknown_category_raises(self, schema3):
        rule = Rule(where=(("age_band", "ancient"),), effect=0.1)
        with pytest.raises(DataError, match="ancient"):
            rule.mask(schema3, np.zeros((1, 3), dtype=np.int16))


class TestGroundTruth:
    def test_true_cate_sums_matching_rules(self, schema3):
        spec = SyntheticSpec(
            schema=schema3,
            base_rate=0.5,
            effect_rules=(
                Rule(where=(("age_band", "young"),), effect=0.4),
                Rule(where=(("region", "north"),), effect=-0.1),
            ),
        )
        assert true_cate(spec, {"age_band": "young", "region": "north"}) == pytest.approx(0.3)
        assert true_cate(spec, {"age_band": "old", "region": "south"}) == 0.0

    def test_clipping_is_per_potential_outcome(self, schema3):
        # control 0.9, raw effect +0.4: treated clips to 1.0, truth is 0.1
        spec = SyntheticSpec(
            schema=schema3,
            base_rate=0.9,
            effect_rules=(Rule(where=(), effect=0.4),),
        )
        assert true_cate(spec, {}) == pytest.approx(0.1)

    def test_negative_clipping(self, schema3):
        spec = SyntheticSpec(
            schema=schema3,
            base_rate=0.2,
            effect_rules=(Rule(where=(), effect=-0.5),),
        )
        p0, p1 = potential_probabilities(spec, np.zeros((1, 3), dtype=np.int16))
        assert p0[0] == pytest.approx(0.2)
        assert p1[0] == 0.0
        assert true_cate(spec, {}) == pytest.approx(-0.2)

    def test_base_adjustments_shift_control(self, schema3):
        spec = SyntheticSpec(
            schema=schema3,
            base_rate=0.5,
            base_adjustments=(Rule(where=(("device", "desktop"),), effect=0.2),),
        )
        codes = np.array([[0, 0, 1], [0, 0, 0]], dtype=np.int16)
        p0, p1 = potential_probabilities(spec, codes)
        assert p0.tolist() == [0.7, 0.5]
        assert np.array_equal(p0, p1)  # no effect rules


class TestGeneration:
    def test_deterministic(self, hetero_spec):
        a = generate_cohort(hetero_spec, 500)
        b = generate_cohort(hetero_spec, 500)
        assert np.array_equal(a.codes, b.codes)
        assert np.array_equal(a.treatment, b.treatment)
        assert np.array_equal(a.outcome, b.outcome)
        assert np.array_equal(a.true_effect, b.true_effect)

    def test_seed_changes_draws(self, hetero_spec):
        import dataclasses

        other = dataclasses.replace(hetero_spec, seed=hetero_spec.seed + 1)
        a = generate_cohort(hetero_spec, 500)
        b = generate_cohort(other, 500)
        assert not np.array_equal(a.outcome, b.outcome)

    def test_true_effect_column_matches_rules(self, hetero_spec):
        cohort = generate_cohort(hetero_spec, 1000)
        young = cohort.codes[:, 0] == 0
        old = cohort.codes[:, 0] == 2
        assert np.allclose(cohort.true_effect[young], 0.4)
        assert np.allclose(cohort.true_effect[old], -0.3)
        middle = ~(young | old)
        assert np.allclose(cohort.true_effect[middle], 0.0)

    def test_treatment_share_near_half(self, null_cohort):
        share = null_cohort.treatment.mean()
        # n = 4000: 4 sigma is about 0.032
        assert abs(share - 0.5) < 0.04

    def test_empirical_uplift_near_truth(self, hetero_cohort):
        # young rows: planted effect +0.4, n about 1300 per arm-cell
        young = hetero_cohort.codes[:, 0] == 0
        w = hetero_cohort.treatment[young]
        y = hetero_cohort.outcome[young]
        uplift = y[w == 1].mean() - y[w == 0].mean()
        assert uplift == pytest.approx(0.4, abs=0.08)

    def test_category_probabilities_respected(self, schema3):
        spec = SyntheticSpec(
            schema=schema3,
            category_probabilities={"age_band": (0.8, 0.2, 0.0)},
            seed=3,
        )
        cohort = generate_cohort(spec, 2000)
        counts = np.bincount(cohort.codes[:, 0], minlength=3)
        assert counts[2] == 0
        assert counts[0] / 2000 == pytest.approx(0.8, abs=0.05)
        # unconfigured variables stay uniform
        region = np.bincount(cohort.codes[:, 1], minlength=4) / 2000
        assert np.allclose(region, 0.25, atol=0.06)

    def test_bad_size(self, hetero_spec):
        with pytest.raises(DataError):
            generate_cohort(hetero_spec, 0)


class TestSpecValidation:
    def test_base_rate_range(self, schema3):
        with pytest.raises(DataError):
            SyntheticSpec(schema=schema3, base_rate=1.2)

    def test_treatment_probability_open_interval(self, schema3):
        with pytest.raises(DataError):
            SyntheticSpec(schema=schema3, treatment_probability=0.0)
        with pytest.raises(DataError):
            SyntheticSpec(schema=schema3, treatment_probability=1.0)

    def test_category_probability_length(self, schema3):
        with pytest.raises(DataError, match="age_band"):
            SyntheticSpec(
                schema=schema3,
                category_probabilities={"age_band": (0.5, 0.5)},
            )

    def test_category_probability_sum(self, schema3):
        with pytest.raises(DataError, match="sum"):
            SyntheticSpec(
                schema=schema3,
                category_probabilities={"age_band": (0.5, 0.4, 0.2)},
            )

    def test_category_probability_unknown_variable(self, schema3):
        with pytest.raises(Exception):
            SyntheticSpec(
                schema=schema3,
                category_probabilities={"nope": (1.0,)},
            )

    def test_single_category_schema_ok(self):
        schema = CategoricalSchema(variables=(Variable("only", ("one",)),))
        spec = SyntheticSpec(schema=schema, seed=1)
        cohort = generate_cohort(spec, 10)
        assert (cohort.codes == 0).all()
