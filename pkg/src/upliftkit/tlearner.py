"""T-learner for conditional average treatment effects.

Fits one response model per arm (control rows only, treated rows only)
and estimates the effect as the difference of predicted success
probabilities. Any binary classifier exposing the usual fit /
predict_proba pair can serve as the base learner.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, clone

from .boosting import GradientBoostingClassifier
from .errors import DataError
from .sampling import estimator_seed
from .validation import check_binary_vector, check_matrix, check_random_state, check_vector


class TLearner(BaseEstimator):
    """Two-model uplift estimator.

    Parameters
    ----------
    base_classifier:
        Prototype classifier cloned once per arm. Defaults to the native
        gradient-boosted classifier with standard settings.
    random_state:
        Seed used to derive distinct sub-seeds for the two arms. Only
        applied when the base classifier exposes a random_state parameter.
    """

    def __init__(self, base_classifier=None, random_state=None):
        self.base_classifier = base_classifier
        self.random_state = random_state

    def _make_arm(self, arm_index: int):
        prototype = self.base_classifier
        if prototype is None:
            prototype = GradientBoostingClassifier()
        model = clone(prototype)
        if self.random_state is not None and "random_state" in model.get_params():
            model.set_params(random_state=estimator_seed(self.random_state, arm_index))
        return model

    def fit(self, X, w, y):
        """Fit both arm models.

        X is the encoded feature matrix, w the 0/1 assignment vector and
        y the 0/1 outcome vector. Raises DataError when an arm is empty.
        """
        X = check_matrix(X)
        n = X.shape[0]
        w = check_binary_vector(w, n_rows=n, name="treatment")
        y = check_binary_vector(y, n_rows=n, name="outcome")

        treated = w == 1
        n_treated = int(treated.sum())
        if n_treated == 0:
            raise DataError("cannot fit treatment arm: no treated rows")
        if n_treated == n:
            raise DataError("cannot fit control arm: no control rows")

        self.n_features_in_ = X.shape[1]
        self.model_control_ = self._make_arm(0).fit(X[~treated], y[~treated])
        self.model_treatment_ = self._make_arm(1).fit(X[treated], y[treated])
        return self

    def predict(self, X) -> np.ndarray:
        """Per-row effect estimates, each in [-1, 1]."""
        if not hasattr(self, "model_control_"):
            from sklearn.exceptions import NotFittedError

            raise NotFittedError("TLearner is not fitted yet")
        X = check_matrix(X, n_columns=self.n_features_in_)
        p1 = self.model_treatment_.predict_proba(X)[:, 1]
        p0 = self.model_control_.predict_proba(X)[:, 1]
        return p1 - p0


def average_treatment_effect(w, y) -> float:
    """Difference in mean outcome between treated and control rows."""
    w = check_binary_vector(np.asarray(w), n_rows=None, name="treatment")
    y = check_binary_vector(np.asarray(y), n_rows=w.shape[0], name="outcome")
    treated = w == 1
    n_treated = int(treated.sum())
    if n_treated == 0 or n_treated == w.shape[0]:
        raise DataError("average treatment effect needs both arms populated")
    return float(y[treated].mean() - y[~treated].mean())


def observed_uplift(treatment, outcome) -> float:
    """Mean outcome difference between arms; NaN when an arm is empty.

    The NaN marker lets quantile- and category-level callers treat
    single-arm groups as undefined rather than as errors.
    """
    treatment = np.asarray(treatment)
    outcome = np.asarray(outcome)
    treated = treatment == 1
    n_treated = int(treated.sum())
    if n_treated == 0 or n_treated == treatment.shape[0]:
        return float("nan")
    return float(outcome[treated].mean() - outcome[~treated].mean())
