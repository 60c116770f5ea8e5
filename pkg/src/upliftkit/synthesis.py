"""Synthetic randomized-experiment cohorts with known ground-truth effects.

The generator is the test oracle for the whole pipeline: covariates are
drawn from configured category distributions, treatment is assigned by a
coin flip, and outcomes are Bernoulli draws whose success probabilities
are rule-based functions of the covariates. Every generated row carries
its exact ground-truth effect.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .data import CategoricalSchema, Cohort
from .errors import DataError


@dataclass(frozen=True)
class Rule:
    """An additive probability contribution gated on covariate values.

    `where` is a tuple of (variable, category) conditions, all of which
    must hold; an empty tuple matches every row.
    """

    where: tuple[tuple[str, str], ...]
    effect: float

    def __post_init__(self):
        object.__setattr__(self, "where", tuple(tuple(c) for c in self.where))

    def mask(self, schema: CategoricalSchema, codes: np.ndarray) -> np.ndarray:
        m = np.ones(codes.shape[0], dtype=bool)
        for name, category in self.where:
            var = schema.variable(name)
            j = schema.variable_index(name)
            try:
                k = var.categories.index(category)
            except ValueError:
                raise DataError(
                    f"rule references unknown category {category!r} of {name!r}"
                ) from None
            m &= codes[:, j] == k
        return m


@dataclass(frozen=True)
class SyntheticSpec:
    """Generator configuration.

    base_rate plus any matching base_adjustments give the control success
    probability; effect_rules add the treatment effect on top. Both
    potential-outcome probabilities are clipped to [0, 1] separately, and
    the stored ground truth is the difference of the clipped values.
    """

    schema: CategoricalSchema
    base_rate: float = 0.5
    base_adjustments: tuple[Rule, ...] = ()
    effect_rules: tuple[Rule, ...] = ()
    category_probabilities: Mapping[str, tuple[float, ...]] | None = None
    treatment_probability: float = 0.5
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "base_adjustments", tuple(self.base_adjustments))
        object.__setattr__(self, "effect_rules", tuple(self.effect_rules))
        if not 0.0 <= self.base_rate <= 1.0:
            raise DataError(f"base_rate must be in [0, 1], got {self.base_rate}")
        if not 0.0 < self.treatment_probability < 1.0:
            raise DataError(
                f"treatment_probability must be in (0, 1), got {self.treatment_probability}"
            )
        if self.category_probabilities is not None:
            probs = dict(self.category_probabilities)
            for name, p in probs.items():
                var = self.schema.variable(name)
                p = tuple(float(x) for x in p)
                if len(p) != len(var.categories):
                    raise DataError(
                        f"category_probabilities for {name!r} has {len(p)} entries, "
                        f"expected {len(var.categories)}"
                    )
                if min(p) < 0.0 or max(p) > 1.0:
                    raise DataError(f"category probabilities for {name!r} outside [0, 1]")
                if abs(sum(p) - 1.0) > 1e-12:
                    raise DataError(f"category probabilities for {name!r} do not sum to 1")
                probs[name] = p
            object.__setattr__(self, "category_probabilities", probs)

    def variable_probabilities(self, name: str) -> np.ndarray:
        k = len(self.schema.variable(name).categories)
        if self.category_probabilities and name in self.category_probabilities:
            return np.asarray(self.category_probabilities[name], dtype=np.float64)
        return np.full(k, 1.0 / k)


def _control_probability(spec: SyntheticSpec, codes: np.ndarray) -> np.ndarray:
    p = np.full(codes.shape[0], spec.base_rate, dtype=np.float64)
    for rule in spec.base_adjustments:
        p[rule.mask(spec.schema, codes)] += rule.effect
    return p


def _effect_shift(spec: SyntheticSpec, codes: np.ndarray) -> np.ndarray:
    tau = np.zeros(codes.shape[0], dtype=np.float64)
    for rule in spec.effect_rules:
        tau[rule.mask(spec.schema, codes)] += rule.effect
    return tau


def potential_probabilities(
    spec: SyntheticSpec, codes: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Clipped success probabilities (control, treatment) per row."""
    p0_raw = _control_probability(spec, codes)
    tau_raw = _effect_shift(spec, codes)
    p0 = np.clip(p0_raw, 0.0, 1.0)
    p1 = np.clip(p0_raw + tau_raw, 0.0, 1.0)
    return p0, p1


def true_effect_for_codes(spec: SyntheticSpec, codes: np.ndarray) -> np.ndarray:
    """Ground-truth conditional effect for each code row."""
    p0, p1 = potential_probabilities(spec, codes)
    return p1 - p0


def true_cate(spec: SyntheticSpec, covariates: Mapping[str, str]) -> float:
    """Ground-truth effect for a single covariate profile given as labels."""
    row = np.zeros((1, len(spec.schema.variables)), dtype=np.int16)
    for name, category in covariates.items():
        var = spec.schema.variable(name)
        try:
            row[0, spec.schema.variable_index(name)] = var.categories.index(category)
        except ValueError:
            raise DataError(
                f"unknown category {category!r} for variable {name!r}"
            ) from None
    return float(true_effect_for_codes(spec, row)[0])


def generate_cohort(spec: SyntheticSpec, n: int) -> Cohort:
    """Draw a cohort of n rows; deterministic given spec.seed.

    Draw order is fixed: covariates variable-by-variable in schema order,
    then treatment flags, then outcomes.
    """
    if n < 1:
        raise DataError(f"cohort size must be >= 1, got {n}")
    rng = np.random.default_rng(spec.seed)
    codes = np.empty((n, len(spec.schema.variables)), dtype=np.int16)
    for j, var in enumerate(spec.schema.variables):
        p = spec.variable_probabilities(var.name)
        codes[:, j] = rng.choice(len(var.categories), size=n, p=p).astype(np.int16)
    w = (rng.random(n) < spec.treatment_probability).astype(np.int8)
    p0, p1 = potential_probabilities(spec, codes)
    success = np.where(w == 1, p1, p0)
    y = (rng.random(n) < success).astype(np.int8)
    return Cohort(
        schema=spec.schema,
        codes=codes,
        treatment=w,
        outcome=y,
        true_effect=p1 - p0,
    )
