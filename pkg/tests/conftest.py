"""Shared fixtures: schemas and synthetic cohorts with known ground truth."""

from __future__ import annotations

import numpy as np
import pytest

from upliftkit import (
    CategoricalSchema,
    Cohort,
    EvalConfig,
    Rule,
    SyntheticSpec,
    Variable,
    generate_cohort,
)


@pytest.fixture(scope="session")
def schema3() -> CategoricalSchema:
    return CategoricalSchema(
        variables=(
            Variable("age_band", ("young", "middle", "old")),
            Variable("region", ("north", "south", "east", "west")),
            Variable("device", ("phone", "desktop")),
        )
    )


@pytest.fixture(scope="session")
def hetero_spec(schema3) -> SyntheticSpec:
    """Two planted segments: +0.4 for young, -0.3 for old."""
    return SyntheticSpec(
        schema=schema3,
        base_rate=0.5,
        effect_rules=(
            Rule((("age_band", "young"),), 0.4),
            Rule((("age_band", "old"),), -0.3),
        ),
        seed=7,
    )


@pytest.fixture(scope="session")
def hetero_cohort(hetero_spec) -> Cohort:
    return generate_cohort(hetero_spec, 4000)


@pytest.fixture(scope="session")
def null_spec(schema3) -> SyntheticSpec:
    return SyntheticSpec(schema=schema3, base_rate=0.5, seed=13)


@pytest.fixture(scope="session")
def null_cohort(null_spec) -> Cohort:
    return generate_cohort(null_spec, 4000)


@pytest.fixture
def small_config() -> EvalConfig:
    return EvalConfig(
        n_replicates=6, population_size=400, master_seed=29, n_quantiles=5
    )


def make_cohort(schema: CategoricalSchema, codes, treatment, outcome) -> Cohort:
    """Hand-built cohort from plain lists."""
    return Cohort(
        schema=schema,
        codes=np.asarray(codes, dtype=np.int16),
        treatment=np.asarray(treatment, dtype=np.int8),
        outcome=np.asarray(outcome, dtype=np.int8),
    )


@pytest.fixture(scope="session")
def two_cat_schema() -> CategoricalSchema:
    return CategoricalSchema(
        variables=(Variable("group", ("a", "b")),)
    )
