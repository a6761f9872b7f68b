"""Multinomial Naive Bayes over TF-IDF features.

TF-IDF values act as fractional term counts.  Laplace smoothing with
``alpha`` keeps unseen terms from zeroing a class out; a class absent from
the training labels gets a -inf log-prior and is never predicted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import LearnerError, TrainedLearner, as_csr, check_labels, softmax


@dataclass(frozen=True)
class NBConfig:
    alpha: float = 1.0

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")

    def fit(self, X, y, n_classes: int | None = None) -> "NaiveBayesModel":
        return nb_fit(X, y, self.alpha, n_classes)


class NaiveBayesModel(TrainedLearner):
    kind = "nb"

    def __init__(self, class_log_prior, feature_log_prob, alpha: float):
        feature_log_prob = np.asarray(feature_log_prob, dtype=np.float64)
        super().__init__(feature_dim=feature_log_prob.shape[1], n_classes=feature_log_prob.shape[0])
        self.class_log_prior = np.asarray(class_log_prior, dtype=np.float64)
        self.feature_log_prob = feature_log_prob
        self.alpha = float(alpha)

    def joint_log_scores(self, X) -> np.ndarray:
        X = as_csr(X, self.feature_dim)
        return X @ self.feature_log_prob.T + self.class_log_prior

    def predict_proba(self, X) -> np.ndarray:
        return softmax(self.joint_log_scores(X))

    def to_state(self) -> dict:
        return {
            "kind": self.kind,
            "alpha": self.alpha,
            "class_log_prior": self.class_log_prior,
            "feature_log_prob": self.feature_log_prob,
        }

    @classmethod
    def from_state(cls, state: dict) -> "NaiveBayesModel":
        model = cls(state["class_log_prior"], state["feature_log_prob"], state["alpha"])
        return model


def nb_fit(X, y, alpha: float = 1.0, n_classes: int | None = None) -> NaiveBayesModel:
    if alpha <= 0:
        raise LearnerError("alpha must be > 0")
    X = as_csr(X)
    y, k = check_labels(y, n_classes)
    if X.shape[0] != y.shape[0]:
        raise LearnerError(f"X has {X.shape[0]} rows but y has {y.shape[0]} labels")
    n, d = X.shape

    class_counts = np.bincount(y, minlength=k).astype(np.float64)
    absent = [int(c) for c in np.nonzero(class_counts == 0)[0]]
    with np.errstate(divide="ignore"):
        class_log_prior = np.log(class_counts / n)

    # Per-class accumulated feature mass (fractional counts).
    feature_count = np.zeros((k, d), dtype=np.float64)
    indicator_rows = np.arange(n)
    for label in range(k):
        mask = y == label
        if mask.any():
            feature_count[label] = np.asarray(X[indicator_rows[mask]].sum(axis=0)).ravel()

    smoothed = feature_count + alpha
    totals = feature_count.sum(axis=1, keepdims=True) + alpha * d
    feature_log_prob = np.log(smoothed) - np.log(totals)

    model = NaiveBayesModel(class_log_prior, feature_log_prob, alpha)
    model.fit_report = {"absent_classes": absent, "n_train": int(n)}
    return model
