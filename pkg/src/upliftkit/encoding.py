"""One-hot encoding of cohort covariates.

Each k-category variable becomes k - 1 binary columns; the first category
in schema order is the dropped contrast level, so an all-zero block means
"first category". Column order follows schema order and is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .data import CategoricalSchema, Cohort
from .errors import DataError


@dataclass(frozen=True)
class EncodedMatrix:
    """A one-hot design matrix plus per-column provenance.

    values   float64 array of shape (n_rows, n_columns), entries in {0, 1}.
    columns  (variable, category) pair for every column.
    """

    values: np.ndarray
    columns: tuple[tuple[str, str], ...]

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_columns(self) -> int:
        return self.values.shape[1]


def one_hot_encode(cohort: Cohort) -> EncodedMatrix:
    """Encode a cohort's covariates against its schema.

    Raises DataError on an empty cohort.
    """
    if cohort.n_rows == 0:
        raise DataError("cannot encode an empty cohort")
    return EncodedMatrix(
        values=encode_codes(cohort.schema, cohort.codes),
        columns=cohort.schema.encoded_columns(),
    )


def encode_codes(schema: CategoricalSchema, codes: np.ndarray) -> np.ndarray:
    """One-hot encode an (n, n_variables) code matrix to float64 {0, 1}."""
    n = codes.shape[0]
    out = np.zeros((n, schema.n_encoded_columns), dtype=np.float64)
    col = 0
    for j, var in enumerate(schema.variables):
        k = len(var.categories)
        if k == 1:
            continue
        block = out[:, col : col + k - 1]
        # category index c >= 1 activates block column c - 1
        rows = np.nonzero(codes[:, j] > 0)[0]
        block[rows, codes[rows, j] - 1] = 1.0
        col += k - 1
    return out


def decode_columns(schema: CategoricalSchema, values: np.ndarray) -> np.ndarray:
    """Invert encode_codes: recover category codes from a one-hot matrix."""
    n = values.shape[0]
    codes = np.zeros((n, len(schema.variables)), dtype=np.int16)
    col = 0
    for j, var in enumerate(schema.variables):
        k = len(var.categories)
        if k == 1:
            continue
        block = values[:, col : col + k - 1]
        active = block.sum(axis=1)
        if (active > 1).any():
            raise DataError(
                f"multiple active categories for variable {var.name!r}"
            )
        codes[:, j] = np.where(active > 0, block.argmax(axis=1) + 1, 0)
        col += k - 1
    return codes


class CohortEncoder(BaseEstimator, TransformerMixin):
    """sklearn-style transformer from cohorts to one-hot matrices.

    The layout is fully determined by the cohort's schema; fit records the
    schema and column provenance, transform produces the design matrix.
    """

    def __init__(self, schema: CategoricalSchema | None = None):
        self.schema = schema

    def fit(self, cohort: Cohort, y=None):
        schema = self.schema if self.schema is not None else cohort.schema
        self.schema_ = schema
        self.columns_ = schema.encoded_columns()
        self.n_features_out_ = len(self.columns_)
        return self

    def transform(self, cohort: Cohort) -> np.ndarray:
        if not hasattr(self, "schema_"):
            self.fit(cohort)
        if cohort.schema != self.schema_:
            raise DataError("cohort schema does not match the fitted schema")
        return one_hot_encode(cohort).values
