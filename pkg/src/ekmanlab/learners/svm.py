"""One-vs-rest linear SVM trained with Pegasos SGD, plus probability
calibration.

Pegasos runs single-sample updates with step 1/(l2*t).  The iterates are
kept as an unscaled accumulator Z with w_t = Z/(l2*(t-1)), which is the
exact closed form of the (1 - 1/t) decay, so no scale drift accumulates.
Probabilities come from per-class Platt sigmoids fitted on out-of-fold
decision scores from an internal 3-fold split, renormalized to sum to one;
when a class lacks enough positives to calibrate, the model falls back to a
softmax over raw margins.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .base import (
    LearnerError,
    TrainedLearner,
    as_csr,
    check_labels,
    softmax,
    stratified_kfold,
)

# Internal shuffle/fold seed; fixed so repeated fits are bit-identical.
_SVM_SEED = 0
_CALIBRATION_FOLDS = 3


@dataclass(frozen=True)
class SVMConfig:
    l2: float = 1e-4
    epochs: int = 20
    calibration: str = "platt"  # "platt" | "softmax_margins"

    def __post_init__(self):
        if self.l2 <= 0:
            raise ValueError("l2 must be > 0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.calibration not in ("platt", "softmax_margins"):
            raise ValueError(f"unknown calibration: {self.calibration!r}")

    def fit(self, X, y, n_classes: int | None = None) -> "SVMModel":
        return svm_fit(X, y, self, n_classes)


def _pegasos_train(X, y, k: int, l2: float, epochs: int, seed: int) -> np.ndarray:
    """Pegasos over all classes simultaneously; returns W (k, d)."""
    X = X.tocsr()
    n, d = X.shape
    indptr = X.indptr
    indices = X.indices
    data = X.data

    Z = np.zeros((k, d), dtype=np.float64)
    rng = np.random.default_rng(seed)
    t = 0
    sign = np.empty(k, dtype=np.float64)
    for _ in range(epochs):
        for i in rng.permutation(n):
            t += 1
            sl = slice(indptr[i], indptr[i + 1])
            idx = indices[sl]
            vals = data[sl]
            sign.fill(-1.0)
            sign[y[i]] = 1.0
            if t == 1:
                margins = np.zeros(k)
            else:
                margins = sign * (Z[:, idx] @ vals) / (l2 * (t - 1))
            viol = np.nonzero(margins < 1.0)[0]
            if viol.shape[0] and idx.shape[0]:
                Z[np.ix_(viol, idx)] += np.outer(sign[viol], vals)
    if t == 0:
        return Z
    return Z / (l2 * t)


def platt_fit(scores: np.ndarray, positives: np.ndarray,
              max_iter: int = 100) -> tuple[float, float]:
    """Fit sigmoid parameters (A, B) so 1/(1+exp(A*s+B)) models P(positive|s).

    Regularized maximum likelihood with Platt's smoothed targets, solved by
    Newton iterations with backtracking.
    """
    scores = np.asarray(scores, dtype=np.float64)
    positives = np.asarray(positives, dtype=bool)
    n_pos = int(positives.sum())
    n_neg = positives.shape[0] - n_pos
    hi = (n_pos + 1.0) / (n_pos + 2.0)
    lo = 1.0 / (n_neg + 2.0)
    t = np.where(positives, hi, lo)

    A = 0.0
    B = np.log((n_neg + 1.0) / (n_pos + 1.0))
    sigma = 1e-12
    min_step = 1e-10

    def objective(a: float, b: float) -> float:
        f = a * scores + b
        # t*f + log(1+exp(-f)) holds for both signs via logaddexp
        return float(np.sum(t * f + np.logaddexp(0.0, -f)))

    fval = objective(A, B)
    for _ in range(max_iter):
        f = A * scores + B
        p = expit(-f)
        q = 1.0 - p
        d2 = p * q
        h11 = float(np.sum(scores * scores * d2)) + sigma
        h22 = float(np.sum(d2)) + sigma
        h21 = float(np.sum(scores * d2))
        d1 = t - p
        g1 = float(np.sum(scores * d1))
        g2 = float(np.sum(d1))
        if abs(g1) < 1e-5 and abs(g2) < 1e-5:
            break
        det = h11 * h22 - h21 * h21
        dA = -(h22 * g1 - h21 * g2) / det
        dB = -(-h21 * g1 + h11 * g2) / det
        gd = g1 * dA + g2 * dB
        step = 1.0
        while step >= min_step:
            new_a = A + step * dA
            new_b = B + step * dB
            new_f = objective(new_a, new_b)
            if new_f < fval + 1e-4 * step * gd:
                A, B, fval = new_a, new_b, new_f
                break
            step /= 2.0
        else:
            break
    return A, B


class SVMModel(TrainedLearner):
    kind = "svm"

    def __init__(self, W: np.ndarray, calibration: str,
                 platt_a: np.ndarray | None = None,
                 platt_b: np.ndarray | None = None):
        W = np.asarray(W, dtype=np.float64)
        super().__init__(feature_dim=W.shape[1], n_classes=W.shape[0])
        self.W = W
        self.calibration = calibration
        self.platt_a = None if platt_a is None else np.asarray(platt_a, dtype=np.float64)
        self.platt_b = None if platt_b is None else np.asarray(platt_b, dtype=np.float64)

    def decision_scores(self, X) -> np.ndarray:
        X = as_csr(X, self.feature_dim)
        return X @ self.W.T

    def predict_proba(self, X) -> np.ndarray:
        scores = self.decision_scores(X)
        if self.calibration == "platt":
            p = expit(-(self.platt_a * scores + self.platt_b))
            totals = p.sum(axis=1, keepdims=True)
            uniform = np.full_like(p, 1.0 / self.n_classes)
            with np.errstate(invalid="ignore", divide="ignore"):
                out = np.where(totals > 0, p / totals, uniform)
            return out
        return softmax(scores)

    def to_state(self) -> dict:
        state = {
            "kind": self.kind,
            "W": self.W,
            "calibration": self.calibration,
        }
        if self.platt_a is not None:
            state["platt_a"] = self.platt_a
            state["platt_b"] = self.platt_b
        return state

    @classmethod
    def from_state(cls, state: dict) -> "SVMModel":
        model = cls(state["W"], state["calibration"],
                    state.get("platt_a"), state.get("platt_b"))
        return model


def svm_calibrate(oof_scores: np.ndarray, y: np.ndarray, n_classes: int):
    """Per-class Platt parameters from out-of-fold decision scores.

    Returns (A, B, fallback_classes); when any class has fewer than two
    positive examples, calibration is impossible and the caller should fall
    back to softmax over margins.
    """
    A = np.zeros(n_classes)
    B = np.zeros(n_classes)
    fallback = []
    for c in range(n_classes):
        positives = y == c
        if int(positives.sum()) < 2:
            fallback.append(c)
            continue
        A[c], B[c] = platt_fit(oof_scores[:, c], positives)
    return A, B, fallback


def svm_fit(X, y, config: SVMConfig = SVMConfig(), n_classes: int | None = None) -> SVMModel:
    X = as_csr(X)
    y, k = check_labels(y, n_classes)
    n, d = X.shape
    if n != y.shape[0]:
        raise LearnerError(f"X has {n} rows but y has {y.shape[0]} labels")

    W = _pegasos_train(X, y, k, config.l2, config.epochs, _SVM_SEED)
    report: dict = {"n_train": int(n), "calibration": config.calibration}

    if config.calibration == "platt":
        fold_id, stratified = stratified_kfold(y, _CALIBRATION_FOLDS, _SVM_SEED)
        oof = np.zeros((n, k), dtype=np.float64)
        for f in range(_CALIBRATION_FOLDS):
            holdout = fold_id == f
            W_f = _pegasos_train(X[~holdout], y[~holdout], k,
                                 config.l2, config.epochs, _SVM_SEED + 1 + f)
            oof[holdout] = X[holdout] @ W_f.T
        A, B, fallback = svm_calibrate(oof, y, k)
        report["calibration_stratified"] = stratified
        if fallback:
            report["calibration"] = "softmax_margins"
            report["calibration_fallback_classes"] = fallback
            model = SVMModel(W, "softmax_margins")
        else:
            model = SVMModel(W, "platt", A, B)
    else:
        model = SVMModel(W, "softmax_margins")

    model.fit_report = report
    return model
