"""Experiment data model: categorical schema, cohorts, and CSV ingestion.

A cohort is a randomized experiment: categorical covariates, a binary
treatment flag, and a binary outcome. Covariates are stored as integer
category codes against a fixed schema so that downstream encoding and
reporting are deterministic.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import DataError

#: Raw outcome labels mapped onto the binary outcome. Only the affirmative
#: answer counts as 1; "don't know" answers count as 0. "0"/"1" are accepted
#: so that cohorts written by this package round-trip.
DEFAULT_OUTCOME_LABELS: Mapping[str, int] = {
    "Yes": 1,
    "No": 0,
    "Don't know": 0,
    "1": 1,
    "0": 0,
}

DEFAULT_TREATMENT_LABELS: Mapping[str, int] = {"1": 1, "0": 0}


@dataclass(frozen=True)
class Variable:
    """A categorical covariate with an explicit, ordered category list."""

    name: str
    categories: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "categories", tuple(self.categories))
        if len(self.categories) < 1:
            raise DataError(f"variable {self.name!r} has no categories")
        if len(set(self.categories)) != len(self.categories):
            raise DataError(f"variable {self.name!r} has duplicate categories")


@dataclass(frozen=True)
class CategoricalSchema:
    """Ordered covariate schema plus the treatment/outcome column names.

    Variable order and category order are fixed at construction and define
    the one-hot column order everywhere downstream.
    """

    variables: tuple[Variable, ...]
    treatment_column: str = "treatment"
    outcome_column: str = "outcome"

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise DataError("schema has duplicate variable names")
        reserved = {self.treatment_column, self.outcome_column}
        if len(reserved) != 2:
            raise DataError("treatment and outcome columns must differ")
        if reserved & set(names):
            raise DataError("treatment/outcome column collides with a variable name")

    @property
    def variable_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def variable_index(self, name: str) -> int:
        for i, v in enumerate(self.variables):
            if v.name == name:
                return i
        raise DataError(f"unknown variable {name!r}")

    def variable(self, name: str) -> Variable:
        return self.variables[self.variable_index(name)]

    def encoded_columns(self) -> tuple[tuple[str, str], ...]:
        """(variable, category) pairs for the one-hot layout.

        The first category of each variable is the dropped contrast level,
        so a k-category variable contributes k - 1 columns.
        """
        cols = []
        for v in self.variables:
            cols.extend((v.name, c) for c in v.categories[1:])
        return tuple(cols)

    @property
    def n_encoded_columns(self) -> int:
        return sum(len(v.categories) - 1 for v in self.variables)


def binarize_outcome(label: str, labels: Mapping[str, int] = DEFAULT_OUTCOME_LABELS) -> int:
    """Map a raw outcome label onto {0, 1}.

    Raises DataError for labels outside the configured label set.
    """
    try:
        value = labels[label]
    except KeyError:
        raise DataError(f"unknown outcome label {label!r}") from None
    if value not in (0, 1):
        raise DataError(f"outcome label {label!r} maps to non-binary value {value!r}")
    return int(value)


@dataclass(frozen=True)
class Cohort:
    """Immutable experiment data: codes, treatment flags, and outcomes.

    codes        int16 array of shape (n_rows, n_variables); codes[i, v] is the
                 category index of row i for schema variable v.
    treatment    int8 array of 0/1 assignment flags.
    outcome      int8 array of 0/1 outcomes.
    true_effect  optional float64 array of per-row ground-truth effects;
                 populated by the synthetic generator only.
    """

    schema: CategoricalSchema
    codes: np.ndarray
    treatment: np.ndarray
    outcome: np.ndarray
    true_effect: np.ndarray | None = field(default=None)

    def __post_init__(self):
        codes = np.ascontiguousarray(self.codes, dtype=np.int16)
        w = np.ascontiguousarray(self.treatment, dtype=np.int8)
        y = np.ascontiguousarray(self.outcome, dtype=np.int8)
        n_vars = len(self.schema.variables)
        if codes.ndim != 2 or codes.shape[1] != n_vars:
            raise DataError(
                f"codes must have shape (n_rows, {n_vars}), got {codes.shape}"
            )
        n = codes.shape[0]
        if w.shape != (n,) or y.shape != (n,):
            raise DataError("treatment/outcome length does not match codes")
        for j, var in enumerate(self.schema.variables):
            col = codes[:, j]
            if col.size and (col.min() < 0 or col.max() >= len(var.categories)):
                raise DataError(f"invalid category code for variable {var.name!r}")
        if w.size and not ((w >= 0) & (w <= 1)).all():
            raise DataError("treatment flags must be 0 or 1")
        if y.size and not ((y >= 0) & (y <= 1)).all():
            raise DataError("outcomes must be 0 or 1")
        tau = self.true_effect
        if tau is not None:
            tau = np.ascontiguousarray(tau, dtype=np.float64)
            if tau.shape != (n,):
                raise DataError("true_effect length does not match codes")
            if tau.size and (np.abs(tau) > 1.0 + 1e-12).any():
                raise DataError("true_effect values must lie in [-1, 1]")
            tau.setflags(write=False)
        for arr in (codes, w, y):
            arr.setflags(write=False)
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "treatment", w)
        object.__setattr__(self, "outcome", y)
        object.__setattr__(self, "true_effect", tau)

    @property
    def n_rows(self) -> int:
        return self.codes.shape[0]

    def __len__(self) -> int:
        return self.n_rows

    def take(self, indices) -> "Cohort":
        """New cohort holding the given rows (in the given order)."""
        idx = np.asarray(indices, dtype=np.intp)
        return Cohort(
            schema=self.schema,
            codes=self.codes[idx],
            treatment=self.treatment[idx],
            outcome=self.outcome[idx],
            true_effect=None if self.true_effect is None else self.true_effect[idx],
        )

    def category_labels(self, variable: str) -> np.ndarray:
        """Category names per row for one variable."""
        var = self.schema.variable(variable)
        j = self.schema.variable_index(variable)
        return np.asarray(var.categories, dtype=object)[self.codes[:, j]]


def load_csv(
    path,
    schema: CategoricalSchema,
    *,
    outcome_labels: Mapping[str, int] = DEFAULT_OUTCOME_LABELS,
    treatment_labels: Mapping[str, int] = DEFAULT_TREATMENT_LABELS,
) -> Cohort:
    """Read a cohort from a UTF-8 CSV file with a header row.

    Every row is validated against the schema; errors name the offending
    data row (1-based, excluding the header) and field. Columns not named
    by the schema are ignored.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"input file does not exist: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"empty file: {path}") from None
        col_index: dict[str, int] = {}
        for i, name in enumerate(header):
            if name not in col_index:
                col_index[name] = i
        needed = list(schema.variable_names) + [
            schema.treatment_column,
            schema.outcome_column,
        ]
        for name in needed:
            if name not in col_index:
                raise DataError(f"missing column {name!r} in {path}")
        var_cols = [col_index[v] for v in schema.variable_names]
        w_col = col_index[schema.treatment_column]
        y_col = col_index[schema.outcome_column]
        cat_index = [
            {c: k for k, c in enumerate(v.categories)} for v in schema.variables
        ]

        codes_rows: list[list[int]] = []
        w_rows: list[int] = []
        y_rows: list[int] = []
        for row_no, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) < len(header):
                raise DataError(f"row {row_no}: expected {len(header)} fields, got {len(row)}")
            rec = []
            for var, ci, lookup in zip(schema.variables, var_cols, cat_index):
                label = row[ci]
                if label not in lookup:
                    raise DataError(
                        f"row {row_no}: unknown category {label!r} for variable {var.name!r}"
                    )
                rec.append(lookup[label])
            w_label = row[w_col]
            if w_label not in treatment_labels:
                raise DataError(
                    f"row {row_no}: non-binary treatment value {w_label!r}"
                )
            try:
                y_value = binarize_outcome(row[y_col], outcome_labels)
            except DataError as exc:
                raise DataError(f"row {row_no}: {exc}") from None
            codes_rows.append(rec)
            w_rows.append(int(treatment_labels[w_label]))
            y_rows.append(y_value)

    if not codes_rows:
        raise DataError(f"no data rows in {path}")
    return Cohort(
        schema=schema,
        codes=np.asarray(codes_rows, dtype=np.int16),
        treatment=np.asarray(w_rows, dtype=np.int8),
        outcome=np.asarray(y_rows, dtype=np.int8),
    )


def save_csv(cohort: Cohort, path) -> None:
    """Write a cohort as CSV with category labels and 0/1 flags.

    Includes a true_effect column when the cohort carries ground truth;
    load_csv ignores it on the way back in.
    """
    schema = cohort.schema
    header = list(schema.variable_names) + [
        schema.treatment_column,
        schema.outcome_column,
    ]
    if cohort.true_effect is not None:
        header.append("true_effect")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        cats = [v.categories for v in schema.variables]
        for i in range(cohort.n_rows):
            row = [cats[j][cohort.codes[i, j]] for j in range(len(cats))]
            row.append(str(int(cohort.treatment[i])))
            row.append(str(int(cohort.outcome[i])))
            if cohort.true_effect is not None:
                row.append(repr(float(cohort.true_effect[i])))
            writer.writerow(row)
