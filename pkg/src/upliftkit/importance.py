"""Meta-model feature importances for effect heterogeneity.

Each bootstrap replicate fits a gradient-boosting regressor predicting
the T-learner's out-of-fit effect estimates from the one-hot covariates;
its Gini importances say which variables the effect varies over. Column
scores are averaged across replicates, then across each variable's
one-hot columns. Intervals are percentile ranges over replicate-level
variable scores.

Averaging across a variable's categories breaks the sum-to-one property
of per-column Gini importances, so the report carries raw-averaged
scores by default with an optional renormalized presentation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import CategoricalSchema, Cohort
from .errors import NumericalError
from .evaluation import (
    BootstrapResults,
    EvalConfig,
    percentile_ci,
    run_bootstrap_analyses,
)


@dataclass(frozen=True)
class VariableImportance:
    variable: str
    score: float
    ci_low: float
    ci_high: float
    n_columns: int


@dataclass(frozen=True)
class ImportanceReport:
    """Per-variable heterogeneity importance, ordered most important first."""

    entries: tuple[VariableImportance, ...]
    renormalized: bool
    ci_level: float
    n_replicates: int
    n_skipped_replicates: int
    n_meta_skipped: int
    # mean raw importance per one-hot column, aligned with column_labels
    column_labels: tuple[str, ...]
    column_scores: tuple[float, ...]

    @property
    def n_contributing(self) -> int:
        return self.n_replicates - self.n_skipped_replicates - self.n_meta_skipped

    def to_dict(self) -> dict:
        return {
            "variables": [
                {
                    "variable": e.variable,
                    "score": e.score,
                    "ci_low": e.ci_low,
                    "ci_high": e.ci_high,
                    "n_columns": e.n_columns,
                }
                for e in self.entries
            ],
            "renormalized": self.renormalized,
            "ci_level": self.ci_level,
            "n_replicates": self.n_replicates,
            "n_skipped_replicates": self.n_skipped_replicates,
            "n_meta_skipped": self.n_meta_skipped,
            "columns": [
                {"column": label, "score": score}
                for label, score in zip(self.column_labels, self.column_scores)
            ],
        }


def _variable_column_slices(schema: CategoricalSchema) -> list[tuple[str, slice]]:
    out = []
    start = 0
    for variable in schema.variables:
        width = len(variable.categories) - 1
        out.append((variable.name, slice(start, start + width)))
        start += width
    return out


def build_importance_report(
    schema: CategoricalSchema,
    results: BootstrapResults,
    *,
    renormalize: bool = False,
) -> ImportanceReport:
    """Aggregate per-replicate column importances into variable scores."""
    valid = results.valid_outcomes()
    n_meta_skipped = sum(1 for o in valid if o.meta_skipped)
    contributing = [o.meta_columns for o in valid if o.meta_columns is not None]

    n_columns = schema.n_encoded_columns
    if contributing:
        matrix = np.stack(contributing)
        column_means = matrix.mean(axis=0)
    else:
        # nothing to average: undefined scores, flagged by the skip counts
        matrix = np.empty((0, n_columns), dtype=np.float64)
        column_means = np.full(n_columns, float("nan"))

    entries = []
    for name, cols in _variable_column_slices(schema):
        width = cols.stop - cols.start
        if width == 0:
            entries.append(VariableImportance(name, 0.0, 0.0, 0.0, 0))
            continue
        if not contributing:
            nan = float("nan")
            entries.append(VariableImportance(name, nan, nan, nan, width))
            continue
        replicate_scores = matrix[:, cols].mean(axis=1)
        low, high = percentile_ci(replicate_scores, results.config.ci_level)
        entries.append(
            VariableImportance(
                variable=name,
                score=float(replicate_scores.mean()),
                ci_low=low,
                ci_high=high,
                n_columns=width,
            )
        )

    column_scores = column_means
    if renormalize:
        total = float(sum(e.score for e in entries if e.n_columns > 0))
        if not np.isfinite(total) or total <= 0.0:
            raise NumericalError(
                "cannot renormalize importances: total score is not positive"
            )
        entries = [
            VariableImportance(
                variable=e.variable,
                score=e.score / total,
                ci_low=e.ci_low / total,
                ci_high=e.ci_high / total,
                n_columns=e.n_columns,
            )
            for e in entries
        ]
        column_scores = column_means / total

    entries.sort(key=lambda e: -e.score if np.isfinite(e.score) else np.inf)
    labels = tuple(f"{var}[{cat}]" for var, cat in schema.encoded_columns())
    return ImportanceReport(
        entries=tuple(entries),
        renormalized=renormalize,
        ci_level=results.config.ci_level,
        n_replicates=results.config.n_replicates,
        n_skipped_replicates=results.n_skipped_replicates,
        n_meta_skipped=n_meta_skipped,
        column_labels=labels,
        column_scores=tuple(float(s) for s in column_scores),
    )


def compute_meta_importances(
    cohort: Cohort,
    config: EvalConfig,
    *,
    base_classifier=None,
    base_regressor=None,
    renormalize: bool = False,
    n_jobs: int | None = 1,
) -> ImportanceReport:
    """The full bootstrap meta-importance analysis."""
    results = run_bootstrap_analyses(
        cohort,
        config,
        base_classifier=base_classifier,
        base_regressor=base_regressor,
        collect_uplift=False,
        collect_meta=True,
        n_jobs=n_jobs,
    )
    return build_importance_report(cohort.schema, results, renormalize=renormalize)
