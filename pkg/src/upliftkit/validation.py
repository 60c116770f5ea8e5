"""Input validation helpers used by the estimators and pipeline functions."""

from __future__ import annotations

import numpy as np

from .errors import DataError


def check_random_state(seed) -> np.random.Generator:
    """Turn ``seed`` into a numpy Generator.

    Accepts None (fresh entropy), an int seed, or an existing Generator.
    """
    if seed is None:
        return np.random.default_rng()
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, (int, np.integer)):
        return np.random.default_rng(int(seed))
    raise TypeError(f"cannot seed a random generator from {seed!r}")


def check_matrix(X, *, n_columns: int | None = None) -> np.ndarray:
    """Validate a 2D feature matrix and return it as C-contiguous float64."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DataError(f"expected a 2D feature matrix, got ndim={X.ndim}")
    if not np.all(np.isfinite(X)):
        raise DataError("feature matrix contains non-finite values")
    if n_columns is not None and X.shape[1] != n_columns:
        raise DataError(
            f"feature matrix has {X.shape[1]} columns, expected {n_columns}"
        )
    return X


def check_vector(v, *, n_rows: int | None = None, name: str = "vector") -> np.ndarray:
    """Validate a 1D float vector."""
    v = np.ascontiguousarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise DataError(f"{name} must be 1D, got ndim={v.ndim}")
    if not np.all(np.isfinite(v)):
        raise DataError(f"{name} contains non-finite values")
    if n_rows is not None and v.shape[0] != n_rows:
        raise DataError(f"{name} has length {v.shape[0]}, expected {n_rows}")
    return v


def check_binary_vector(v, *, n_rows: int | None = None, name: str = "vector") -> np.ndarray:
    """Validate a 1D vector of 0/1 values, returned as int8."""
    v = np.asarray(v)
    if v.ndim != 1:
        raise DataError(f"{name} must be 1D, got ndim={v.ndim}")
    if n_rows is not None and v.shape[0] != n_rows:
        raise DataError(f"{name} has length {v.shape[0]}, expected {n_rows}")
    out = v.astype(np.int8, copy=True)
    if not np.array_equal(np.asarray(v, dtype=np.float64), out.astype(np.float64)) or (
        out.size and (out.min() < 0 or out.max() > 1)
    ):
        raise DataError(f"{name} must contain only 0 and 1")
    return out
