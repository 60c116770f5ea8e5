"""Seeded resampling utilities: train/test splits, bootstrap draws, seed mixing."""

from __future__ import annotations

import math

import numpy as np

from .data import Cohort
from .errors import DataError
from .validation import check_random_state

_MASK64 = (1 << 64) - 1


def mix_seed(seed: int, index: int) -> int:
    """Derive a child seed from (seed, index) with a splitmix64 finalizer.

    Used for replicate sub-seeding and per-arm sub-seeding: children are
    decorrelated, and child i never depends on how many siblings exist.
    """
    z = (int(seed) + (index + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def estimator_seed(seed: int, index: int) -> int:
    """mix_seed folded into [0, 2**32): the range third-party estimators
    accept for their random_state parameter."""
    return mix_seed(seed, index) % (1 << 32)


def split_train_test(
    cohort: Cohort, train_fraction: float, rng
) -> tuple[Cohort, Cohort]:
    """Disjoint, exhaustive train/test partition via a uniform shuffle.

    Train size is floor(n * train_fraction); the remainder goes to test.
    The split is unstratified. Deterministic given a seeded generator.
    """
    if not 0.0 < train_fraction < 1.0:
        raise DataError(f"train_fraction must be in (0, 1), got {train_fraction}")
    n = cohort.n_rows
    if n < 2:
        raise DataError("need at least 2 rows to split")
    n_train = math.floor(n * train_fraction)
    if n_train == 0 or n_train == n:
        raise DataError(
            f"train_fraction {train_fraction} leaves an empty part for n={n}"
        )
    rng = check_random_state(rng)
    perm = rng.permutation(n)
    return cohort.take(perm[:n_train]), cohort.take(perm[n_train:])


def bootstrap_resample(cohort: Cohort, size: int, rng) -> Cohort:
    """Draw `size` rows uniformly with replacement."""
    if size <= 0:
        raise DataError(f"resample size must be positive, got {size}")
    if cohort.n_rows == 0:
        raise DataError("cannot resample an empty cohort")
    rng = check_random_state(rng)
    idx = rng.integers(0, cohort.n_rows, size=size)
    return cohort.take(idx)
