"""Segment-level views of predicted effects.

Pure functions: extreme-decile extraction, category profiles within a
segment, per-category observed uplift tables, and threshold targeting.
The bootstrap-averaged variants live in the evaluation module, which
reuses each replicate's fitted T-learner.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Cohort
from .errors import ConfigError, DataError
from .tlearner import observed_uplift
from .validation import check_vector

SEGMENT_BOTTOM = "most-negative"
SEGMENT_TOP = "most-positive"


def extreme_deciles(tau_hat, fraction: float = 0.1) -> tuple[np.ndarray, np.ndarray]:
    """Index sets of the most negative and most positive predictions.

    Each set holds floor(n * fraction) rows; ties are broken by original
    row index, so the sets are disjoint and reproducible. Returned index
    arrays are sorted ascending.
    """
    if not 0.0 < fraction <= 0.5:
        raise ConfigError("fraction must be in (0, 0.5]")
    tau_hat = check_vector(tau_hat, name="tau_hat")
    n = tau_hat.shape[0]
    if n < 2:
        raise DataError("need at least 2 rows to extract extreme segments")
    size = int(n * fraction)
    if size < 1:
        raise DataError(
            f"segment of fraction {fraction} over {n} rows would be empty"
        )
    order = np.argsort(tau_hat, kind="stable")
    bottom = np.sort(order[:size])
    top = np.sort(order[n - size:])
    return bottom, top


@dataclass(frozen=True)
class SegmentProfile:
    """Category mix of one variable within one segment."""

    segment: str
    variable: str
    categories: tuple[str, ...]
    proportions: tuple[float, ...]
    n_rows: float

    def to_dict(self) -> dict:
        return {
            "segment": self.segment,
            "variable": self.variable,
            "n_rows": self.n_rows,
            "proportions": {
                category: proportion
                for category, proportion in zip(self.categories, self.proportions)
            },
        }


def segment_profile(
    cohort: Cohort, indices, variable: str, label: str = "segment"
) -> SegmentProfile:
    """Category frequencies of one variable over a row subset."""
    indices = np.asarray(indices, dtype=np.int64)
    if indices.ndim != 1 or indices.shape[0] == 0:
        raise DataError("segment is empty")
    vi = cohort.schema.variable_index(variable)
    categories = cohort.schema.variable(variable).categories
    counts = np.bincount(cohort.codes[indices, vi], minlength=len(categories))
    proportions = counts / indices.shape[0]
    return SegmentProfile(
        segment=label,
        variable=variable,
        categories=categories,
        proportions=tuple(float(p) for p in proportions),
        n_rows=float(indices.shape[0]),
    )


@dataclass(frozen=True)
class GroupCateRow:
    category: str
    uplift: float
    n_treated: int
    n_control: int
    mean_treated: float
    mean_control: float


@dataclass(frozen=True)
class GroupCateTable:
    """Observed uplift per category of one variable, whole-cohort."""

    variable: str
    rows: tuple[GroupCateRow, ...]

    def to_dict(self) -> dict:
        return {
            "variable": self.variable,
            "rows": [
                {
                    "category": row.category,
                    "uplift": row.uplift,
                    "n_treated": row.n_treated,
                    "n_control": row.n_control,
                    "mean_treated": row.mean_treated,
                    "mean_control": row.mean_control,
                }
                for row in self.rows
            ],
        }


def group_cate_table(cohort: Cohort, variable: str) -> GroupCateTable:
    """Per-category observed arm difference over the whole cohort.

    Categories present in only one arm (or absent) get a NaN uplift with
    their counts still reported.
    """
    vi = cohort.schema.variable_index(variable)
    categories = cohort.schema.variable(variable).categories
    codes = cohort.codes[:, vi]
    treated = cohort.treatment == 1
    rows = []
    for c, category in enumerate(categories):
        in_cat = codes == c
        t_mask = in_cat & treated
        c_mask = in_cat & ~treated
        n_treated = int(t_mask.sum())
        n_control = int(c_mask.sum())
        mean_treated = (
            float(cohort.outcome[t_mask].mean()) if n_treated else float("nan")
        )
        mean_control = (
            float(cohort.outcome[c_mask].mean()) if n_control else float("nan")
        )
        rows.append(
            GroupCateRow(
                category=category,
                uplift=observed_uplift(
                    cohort.treatment[in_cat], cohort.outcome[in_cat]
                ),
                n_treated=n_treated,
                n_control=n_control,
                mean_treated=mean_treated,
                mean_control=mean_control,
            )
        )
    return GroupCateTable(variable=variable, rows=tuple(rows))


def targeting_policy(tau_hat, threshold: float) -> np.ndarray:
    """Indices of rows whose predicted effect strictly exceeds threshold.

    With threshold = 0 this selects everyone not predicted to backfire.
    """
    tau_hat = check_vector(tau_hat, name="tau_hat")
    return np.flatnonzero(tau_hat > float(threshold))
