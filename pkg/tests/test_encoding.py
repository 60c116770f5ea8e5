"""One-hot encoding layout and round-trips."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone

from upliftkit import (
    CategoricalSchema,
    CohortEncoder,
    DataError,
    Variable,
    encode_codes,
    one_hot_encode,
)
from upliftkit.encoding import decode_columns

from conftest import make_cohort


def test_layout_drops_first_category(schema3):
    codes = np.array([[0, 0, 0], [1, 2, 1], [2, 3, 0]], dtype=np.int16)
    x = encode_codes(schema3, codes)
    assert x.shape == (3, 6)
    # row 0 is all contrast categories: every dummy off
    assert not x[0].any()
    # row 1: age_band=middle -> col 0, region=east -> col 3, device=desktop -> col 5
    assert list(np.flatnonzero(x[1])) == [0, 3, 5]
    # row 2: age_band=old -> col 1, region=west -> col 4
    assert list(np.flatnonzero(x[2])) == [1, 4]


def test_values_are_binary(hetero_cohort):
    encoded = one_hot_encode(hetero_cohort)
    assert encoded.values.shape == (hetero_cohort.n_rows, 6)
    assert set(np.unique(encoded.values)) <= {0.0, 1.0}
    assert encoded.columns == hetero_cohort.schema.encoded_columns()


def test_block_row_sums_at_most_one(hetero_cohort):
    x = one_hot_encode(hetero_cohort).values
    # age_band block: columns 0-1; region: 2-4; device: 5
    for block in (slice(0, 2), slice(2, 5), slice(5, 6)):
        assert x[:, block].sum(axis=1).max() <= 1.0


@st.composite
def schema_and_codes(draw):
    n_vars = draw(st.integers(1, 4))
    sizes = [draw(st.integers(1, 5)) for _ in range(n_vars)]
    schema = CategoricalSchema(
        variables=tuple(
            Variable(f"v{i}", tuple(f"c{j}" for j in range(k)))
            for i, k in enumerate(sizes)
        )
    )
    n_rows = draw(st.integers(1, 30))
    codes = np.array(
        [
            [draw(st.integers(0, k - 1)) for k in sizes]
            for _ in range(n_rows)
        ],
        dtype=np.int16,
    )
    return schema, codes


@given(schema_and_codes())
@settings(max_examples=50, deadline=None)
def test_encode_decode_round_trip(pair):
    schema, codes = pair
    decoded = decode_columns(schema, encode_codes(schema, codes))
    assert np.array_equal(decoded, codes)


def test_decode_rejects_multi_hot():
    schema = CategoricalSchema(
        variables=(Variable("v", ("a", "b", "c")),)
    )
    bad = np.array([[1.0, 1.0]])
    with pytest.raises(DataError):
        decode_columns(schema, bad)


class TestCohortEncoder:
    def test_fit_transform(self, hetero_cohort):
        enc = CohortEncoder()
        x = enc.fit(hetero_cohort).transform(hetero_cohort)
        assert x.shape == (hetero_cohort.n_rows, enc.n_features_out_)
        assert enc.columns_ == hetero_cohort.schema.encoded_columns()

    def test_schema_mismatch_raises(self, hetero_cohort, two_cat_schema):
        enc = CohortEncoder().fit(hetero_cohort)
        other = make_cohort(two_cat_schema, [[0]], [1], [1])
        with pytest.raises(DataError):
            enc.transform(other)

    def test_sklearn_clone(self, schema3):
        enc = CohortEncoder(schema=schema3)
        cloned = clone(enc)
        assert cloned.get_params()["schema"] == schema3
