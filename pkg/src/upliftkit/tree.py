"""Least-squares regression trees over binary (one-hot) features.

Inputs are one-hot columns, so every candidate split is "x <= 0.5": rows
with the feature absent go left, rows with it present go right. Split
search maximizes variance reduction; ties are broken toward the lowest
column index so that training is fully deterministic.
"""

from __future__ import annotations

import numpy as np

from .errors import DataError


class TreeNode:
    """A split node or a leaf.

    Leaves have feature None and carry a prediction value. Split nodes
    carry the split column, the per-sample impurity decrease achieved by
    the split, and the number of training samples that reached the node.
    """

    __slots__ = ("feature", "threshold", "left", "right", "value",
                 "impurity_decrease", "n_samples")

    def __init__(self, *, feature=None, threshold=0.5, left=None, right=None,
                 value=0.0, impurity_decrease=0.0, n_samples=0):
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right
        self.value = value
        self.impurity_decrease = impurity_decrease
        self.n_samples = n_samples

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"leaf": True, "value": self.value, "n_samples": self.n_samples}
        return {
            "leaf": False,
            "feature": self.feature,
            "threshold": self.threshold,
            "impurity_decrease": self.impurity_decrease,
            "n_samples": self.n_samples,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }


def _best_split(sub: np.ndarray, tt: np.ndarray, min_samples_leaf: int):
    """Best (column, sse_gain) over all one-hot columns, or None.

    sse_gain is the reduction in within-node sum of squared errors:
    s_left^2/n_left + s_right^2/n_right - s^2/n, maximized over columns.
    """
    n = sub.shape[0]
    s = tt.sum()
    n1 = sub.sum(axis=0)
    s1 = tt @ sub
    n0 = n - n1
    s0 = s - s1
    ok = (n0 >= min_samples_leaf) & (n1 >= min_samples_leaf)
    if not ok.any():
        return None
    with np.errstate(divide="ignore", invalid="ignore"):
        gain = s0 * s0 / n0 + s1 * s1 / n1 - s * s / n
    gain[~ok] = -np.inf
    j = int(np.argmax(gain))  # first maximum: lowest column index wins ties
    g = float(gain[j])
    if not g > 0.0:
        return None
    return j, g


def grow_tree(
    X: np.ndarray,
    targets: np.ndarray,
    *,
    max_depth: int = 3,
    min_samples_split: int = 2,
    min_samples_leaf: int = 1,
    rows: np.ndarray | None = None,
    leaf_rows: list | None = None,
) -> TreeNode:
    """Fit a least-squares CART to (X, targets).

    Recursion stops at max_depth, min_samples_split, min_samples_leaf, or
    zero gain; leaf values are target means. When `leaf_rows` is given,
    (leaf, training row indices) pairs are appended to it, which lets the
    boosting loop update leaf values and scores without re-routing rows.
    """
    X = np.asarray(X, dtype=np.float64)
    t = np.asarray(targets, dtype=np.float64)
    if X.ndim != 2:
        raise DataError(f"X must be 2D, got ndim={X.ndim}")
    if t.shape != (X.shape[0],):
        raise DataError(
            f"targets length {t.shape} does not match {X.shape[0]} rows"
        )
    if X.shape[0] < 1:
        raise DataError("need at least one row to fit a tree")
    if rows is None:
        rows = np.arange(X.shape[0], dtype=np.intp)
    return _grow(X, t, rows, 0, max_depth, min_samples_split, min_samples_leaf,
                 leaf_rows)


def _grow(X, t, rows, depth, max_depth, min_samples_split, min_samples_leaf,
          leaf_rows):
    n = rows.size
    tt = t[rows]
    node = None
    if n >= min_samples_split and depth < max_depth and tt.min() < tt.max():
        sub = X[rows]
        found = _best_split(sub, tt, min_samples_leaf)
        if found is not None:
            j, gain = found
            go_left = sub[:, j] <= 0.5
            node = TreeNode(
                feature=j,
                threshold=0.5,
                impurity_decrease=gain / n,
                n_samples=n,
            )
            node.left = _grow(X, t, rows[go_left], depth + 1, max_depth,
                              min_samples_split, min_samples_leaf, leaf_rows)
            node.right = _grow(X, t, rows[~go_left], depth + 1, max_depth,
                               min_samples_split, min_samples_leaf, leaf_rows)
            return node
    node = TreeNode(value=float(tt.mean()), n_samples=n)
    if leaf_rows is not None:
        leaf_rows.append((node, rows))
    return node


def tree_predict(root: TreeNode, X: np.ndarray) -> np.ndarray:
    """Evaluate a fitted tree on every row of X."""
    X = np.asarray(X, dtype=np.float64)
    out = np.empty(X.shape[0], dtype=np.float64)
    _route(root, X, np.arange(X.shape[0], dtype=np.intp), out)
    return out


def _route(node, X, rows, out):
    if node.feature is None:
        out[rows] = node.value
        return
    go_left = X[rows, node.feature] <= node.threshold
    _route(node.left, X, rows[go_left], out)
    _route(node.right, X, rows[~go_left], out)


def accumulate_importances(root: TreeNode, total_samples: int,
                           acc: np.ndarray) -> None:
    """Add this tree's sample-weighted impurity decreases into `acc`.

    Each split contributes (n_samples / total_samples) * impurity_decrease
    to its column's slot.
    """
    if root.feature is None:
        return
    acc[root.feature] += (root.n_samples / total_samples) * root.impurity_decrease
    accumulate_importances(root.left, total_samples, acc)
    accumulate_importances(root.right, total_samples, acc)


def count_splits(root: TreeNode) -> int:
    if root.feature is None:
        return 0
    return 1 + count_splits(root.left) + count_splits(root.right)
