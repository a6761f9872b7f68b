"""Multiclass logistic regression trained by full-batch gradient descent.

The objective is mean cross-entropy of softmax(X W^T + b) plus an L2
penalty (l2/2)*||W||^2 on the weights (bias unpenalized).  Weights start at
zero; the objective is convex, so the fit is deterministic.  The analytic
gradient lives in :func:`logreg_gradient` so it can be checked against
finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import LearnerError, TrainedLearner, as_csr, check_labels, softmax


@dataclass(frozen=True)
class LogRegConfig:
    l2: float = 1e-4
    lr: float = 0.5
    epochs: int = 300
    tol: float = 1e-6

    def __post_init__(self):
        if self.l2 < 0:
            raise ValueError("l2 must be >= 0")
        if self.lr <= 0:
            raise ValueError("lr must be > 0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")

    def fit(self, X, y, n_classes: int | None = None) -> "LogRegModel":
        return logreg_fit(X, y, self, n_classes)


class LogRegModel(TrainedLearner):
    kind = "logreg"

    def __init__(self, W: np.ndarray, b: np.ndarray):
        W = np.asarray(W, dtype=np.float64)
        super().__init__(feature_dim=W.shape[1], n_classes=W.shape[0])
        self.W = W
        self.b = np.asarray(b, dtype=np.float64)

    def decision_scores(self, X) -> np.ndarray:
        X = as_csr(X, self.feature_dim)
        return X @ self.W.T + self.b

    def predict_proba(self, X) -> np.ndarray:
        return softmax(self.decision_scores(X))

    def to_state(self) -> dict:
        return {"kind": self.kind, "W": self.W, "b": self.b}

    @classmethod
    def from_state(cls, state: dict) -> "LogRegModel":
        model = cls(state["W"], state["b"])
        return model


def _one_hot(y: np.ndarray, k: int) -> np.ndarray:
    Y = np.zeros((y.shape[0], k), dtype=np.float64)
    Y[np.arange(y.shape[0]), y] = 1.0
    return Y


def logreg_objective(W, b, X, y, l2: float) -> float:
    """Mean cross-entropy plus (l2/2)*||W||^2."""
    X = as_csr(X)
    scores = X @ W.T + b
    shifted = scores - np.max(scores, axis=1, keepdims=True)
    log_probs = shifted - np.log(np.sum(np.exp(shifted), axis=1, keepdims=True))
    nll = -np.mean(log_probs[np.arange(y.shape[0]), y])
    return float(nll + 0.5 * l2 * np.sum(W * W))


def logreg_gradient(W, b, X, y, l2: float) -> tuple[np.ndarray, np.ndarray]:
    """Exact analytic gradient of :func:`logreg_objective` at (W, b)."""
    X = as_csr(X)
    n, _ = X.shape
    P = softmax(X @ W.T + b)
    R = P - _one_hot(np.asarray(y, dtype=np.int64), W.shape[0])
    dW = (X.T @ R).T / n + l2 * W
    db = R.mean(axis=0)
    return dW, db


def logreg_fit(X, y, config: LogRegConfig = LogRegConfig(), n_classes: int | None = None) -> LogRegModel:
    X = as_csr(X)
    y, k = check_labels(y, n_classes)
    if X.shape[0] != y.shape[0]:
        raise LearnerError(f"X has {X.shape[0]} rows but y has {y.shape[0]} labels")
    n, d = X.shape

    W = np.zeros((k, d), dtype=np.float64)
    b = np.zeros(k, dtype=np.float64)
    losses = [logreg_objective(W, b, X, y, config.l2)]
    Y = _one_hot(y, k)

    for epoch in range(config.epochs):
        P = softmax(X @ W.T + b)
        R = P - Y
        dW = (X.T @ R).T / n + config.l2 * W
        db = R.mean(axis=0)
        W -= config.lr * dW
        b -= config.lr * db
        loss = logreg_objective(W, b, X, y, config.l2)
        if not np.isfinite(loss):
            raise LearnerError(f"logistic regression diverged at epoch {epoch + 1}")
        improvement = losses[-1] - loss
        losses.append(loss)
        if 0 <= improvement < config.tol:
            break

    model = LogRegModel(W, b)
    model.fit_report = {
        "epochs_run": len(losses) - 1,
        "final_loss": losses[-1],
        "loss_history": losses,
        "n_train": int(n),
    }
    return model
