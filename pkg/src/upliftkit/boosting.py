"""Gradient-boosted trees over one-hot features.

Two estimators with the conventional defaults (100 stages, learning rate
0.1, depth-3 trees): a binary classifier trained on log-loss with per-leaf
Newton updates, and a regressor trained on squared error. Both expose
Gini feature importances accumulated from split impurity decreases.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, RegressorMixin
from sklearn.exceptions import NotFittedError

from .errors import DataError, NumericalError
from .tree import TreeNode, accumulate_importances, count_splits, grow_tree, tree_predict
from .validation import check_binary_vector, check_matrix, check_random_state, check_vector

# Degenerate single-class fits collapse to a constant model with the class
# probability clamped away from 0/1 to keep log-odds finite.
PROBABILITY_CLAMP = 1e-6

# Newton-step denominators are clamped below this to avoid division by zero.
NEWTON_DENOMINATOR_FLOOR = 1e-12


def _sigmoid(score: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp(-score))


def _log_loss(y: np.ndarray, score: np.ndarray) -> float:
    # mean(softplus(score) - y * score), stable for large |score|
    return float(np.mean(np.logaddexp(0.0, score) - y * score))


class _BaseGradientBoosting(BaseEstimator):
    def __init__(self, n_estimators=100, learning_rate=0.1, max_depth=3,
                 min_samples_split=2, min_samples_leaf=1, subsample=1.0,
                 random_state=None):
        self.n_estimators = n_estimators
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.min_samples_leaf = min_samples_leaf
        self.subsample = subsample
        self.random_state = random_state

    def _validate_hyperparameters(self):
        if self.n_estimators < 0:
            raise ValueError("n_estimators must be >= 0")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")
        if not 0.0 < self.subsample <= 1.0:
            raise ValueError("subsample must be in (0, 1]")

    def _check_fitted(self):
        if not hasattr(self, "trees_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted yet")

    def _stage_rows(self, n: int, rng) -> np.ndarray | None:
        """Row subset used for one stage; None means all rows.

        The generator is only consumed when subsample < 1, so default
        fits are RNG-free.
        """
        if self.subsample >= 1.0:
            return None
        m = max(1, int(n * self.subsample))
        return np.sort(rng.permutation(n)[:m])

    def _grow_stage_tree(self, X, residual, rows, leaf_rows):
        return grow_tree(
            X,
            residual,
            max_depth=self.max_depth,
            min_samples_split=self.min_samples_split,
            min_samples_leaf=self.min_samples_leaf,
            rows=rows,
            leaf_rows=leaf_rows,
        )

    def _raw_scores(self, X: np.ndarray) -> np.ndarray:
        self._check_fitted()
        X = check_matrix(X, n_columns=self.n_features_in_)
        score = np.full(X.shape[0], self.initial_score_, dtype=np.float64)
        for root in self.trees_:
            score += self.learning_rate * tree_predict(root, X)
        return score

    @property
    def feature_importances_(self) -> np.ndarray:
        """Normalized Gini importances; raises if the model never split.

        Per column: sum over splits of (node samples / tree samples) times
        the split's impurity decrease, accumulated across trees and then
        normalized to sum to 1.
        """
        self._check_fitted()
        acc = np.zeros(self.n_features_in_, dtype=np.float64)
        for root in self.trees_:
            accumulate_importances(root, root.n_samples, acc)
        total = acc.sum()
        if not total > 0.0:
            raise NumericalError(
                "feature importances are undefined: the model has no splits"
            )
        return acc / total

    @property
    def n_splits_(self) -> int:
        self._check_fitted()
        return sum(count_splits(root) for root in self.trees_)

    def to_dict(self) -> dict:
        """Dump the fitted ensemble as plain data. Not a stable format."""
        self._check_fitted()
        return {
            "kind": self._model_kind,
            "initial_score": self.initial_score_,
            "learning_rate": self.learning_rate,
            "n_features": self.n_features_in_,
            "trees": [root.to_dict() for root in self.trees_],
        }


class GradientBoostingRegressor(_BaseGradientBoosting, RegressorMixin):
    """Squared-error gradient boosting: each stage fits the residuals."""

    _model_kind = "regressor-squared"

    def fit(self, X, y):
        self._validate_hyperparameters()
        X = check_matrix(X)
        n = X.shape[0]
        if n < 2:
            raise DataError("need at least 2 rows to fit")
        t = check_vector(y, n_rows=n, name="targets")
        rng = check_random_state(self.random_state)

        self.n_features_in_ = X.shape[1]
        # exact constant models for constant targets
        if n and t.min() == t.max():
            self.initial_score_ = float(t[0])
        else:
            self.initial_score_ = float(t.mean())

        trees: list[TreeNode] = []
        train_score = np.empty(self.n_estimators, dtype=np.float64)
        score = np.full(n, self.initial_score_, dtype=np.float64)
        for m in range(self.n_estimators):
            residual = t - score
            rows = self._stage_rows(n, rng)
            leaf_rows: list = []
            root = self._grow_stage_tree(X, residual, rows, leaf_rows)
            if rows is None:
                for leaf, idx in leaf_rows:
                    score[idx] += self.learning_rate * leaf.value
            else:
                score += self.learning_rate * tree_predict(root, X)
            trees.append(root)
            train_score[m] = float(np.mean((t - score) ** 2))
        self.trees_ = trees
        self.train_score_ = train_score
        return self

    def predict(self, X) -> np.ndarray:
        return self._raw_scores(X)


class GradientBoostingClassifier(_BaseGradientBoosting, ClassifierMixin):
    """Binary log-loss gradient boosting.

    The initial score is the log-odds of the base rate; each stage fits a
    least-squares tree to the residual y - p and replaces leaf values with
    the one-step Newton update sum(residual) / sum(p * (1 - p)).

    Single-class training data yields a constant model with the class
    probability clamped to [1e-6, 1 - 1e-6], flagged via is_degenerate_.
    """

    _model_kind = "classifier-logloss"

    def fit(self, X, y):
        self._validate_hyperparameters()
        X = check_matrix(X)
        n = X.shape[0]
        if n < 2:
            raise DataError("need at least 2 rows to fit")
        yb = check_binary_vector(y, n_rows=n, name="labels").astype(np.float64)
        rng = check_random_state(self.random_state)

        self.n_features_in_ = X.shape[1]
        self.classes_ = np.array([0, 1])
        base_rate = float(yb.mean())
        if base_rate <= 0.0 or base_rate >= 1.0:
            p = min(max(base_rate, PROBABILITY_CLAMP), 1.0 - PROBABILITY_CLAMP)
            self.is_degenerate_ = True
            self.constant_probability_ = p
            self.initial_score_ = float(np.log(p / (1.0 - p)))
            self.trees_ = []
            self.train_score_ = np.empty(0, dtype=np.float64)
            return self

        self.is_degenerate_ = False
        self.initial_score_ = float(np.log(base_rate / (1.0 - base_rate)))
        trees: list[TreeNode] = []
        train_score = np.empty(self.n_estimators, dtype=np.float64)
        score = np.full(n, self.initial_score_, dtype=np.float64)
        for m in range(self.n_estimators):
            p = _sigmoid(score)
            residual = yb - p
            rows = self._stage_rows(n, rng)
            leaf_rows: list = []
            root = self._grow_stage_tree(X, residual, rows, leaf_rows)
            for leaf, idx in leaf_rows:
                num = residual[idx].sum()
                den = (p[idx] * (1.0 - p[idx])).sum()
                leaf.value = float(num / max(den, NEWTON_DENOMINATOR_FLOOR))
            if rows is None:
                for leaf, idx in leaf_rows:
                    score[idx] += self.learning_rate * leaf.value
            else:
                score += self.learning_rate * tree_predict(root, X)
            trees.append(root)
            train_score[m] = _log_loss(yb, score)
        self.trees_ = trees
        self.train_score_ = train_score
        return self

    def predict_proba(self, X) -> np.ndarray:
        self._check_fitted()
        if self.is_degenerate_:
            X = check_matrix(X, n_columns=self.n_features_in_)
            p1 = np.full(X.shape[0], self.constant_probability_)
        else:
            p1 = _sigmoid(self._raw_scores(X))
        return np.column_stack([1.0 - p1, p1])

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X)[:, 1] >= 0.5).astype(np.int64)

    def decision_function(self, X) -> np.ndarray:
        return self._raw_scores(X)


def gini_importances(model) -> np.ndarray:
    """Normalized Gini feature importances of a fitted booster."""
    return model.feature_importances_
