"""Shared machinery for the from-scratch learners."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from ..features import SparseVector


class LearnerError(Exception):
    pass


class DimensionError(LearnerError):
    pass


def as_csr(X, dim: int | None = None) -> sp.csr_matrix:
    """Accept a CSR matrix, SparseVector or dense array; return CSR."""
    if isinstance(X, SparseVector):
        mat = X.to_csr()
    elif sp.issparse(X):
        mat = X.tocsr()
    else:
        mat = sp.csr_matrix(np.atleast_2d(np.asarray(X, dtype=np.float64)))
    if dim is not None and mat.shape[1] != dim:
        raise DimensionError(f"input has {mat.shape[1]} features, model expects {dim}")
    return mat


def softmax(scores: np.ndarray) -> np.ndarray:
    """Row-wise softmax, stable under large scores; -inf rows allowed."""
    scores = np.atleast_2d(scores)
    shifted = scores - np.max(scores, axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / np.sum(exp, axis=1, keepdims=True)


def check_labels(y, n_classes: int | None) -> tuple[np.ndarray, int]:
    y = np.asarray(y, dtype=np.int64)
    if y.ndim != 1 or y.size == 0:
        raise LearnerError("y must be a non-empty 1-d label array")
    if y.min() < 0:
        raise LearnerError("labels must be non-negative integers")
    k = int(y.max()) + 1 if n_classes is None else int(n_classes)
    if y.max() >= k:
        raise LearnerError(f"label {int(y.max())} outside 0..{k - 1}")
    return y, k


class TrainedLearner:
    """Base for fitted models: batch probabilities plus argmax prediction."""

    kind: str = ""

    def __init__(self, feature_dim: int, n_classes: int):
        self.feature_dim = int(feature_dim)
        self.n_classes = int(n_classes)
        self.fit_report: dict = {}

    def predict_proba(self, X) -> np.ndarray:
        raise NotImplementedError

    def predict(self, X) -> np.ndarray:
        # np.argmax returns the first maximum, which is the lowest-index
        # tie-break the contract asks for.
        return np.argmax(self.predict_proba(X), axis=1)

    def to_state(self) -> dict:
        raise NotImplementedError

    @classmethod
    def from_state(cls, state: dict) -> "TrainedLearner":
        raise NotImplementedError


def stratified_kfold(y: np.ndarray, k: int, seed: int) -> tuple[np.ndarray, bool]:
    """Assign each row to one of k folds, stratified by label.

    Returns (fold ids, stratified flag).  When any class has fewer members
    than k, stratification would leave folds without that class, so the
    split falls back to a plain shuffled partition and the flag is False.
    """
    y = np.asarray(y)
    n = y.shape[0]
    if k < 2:
        raise LearnerError("k_folds must be >= 2")
    if n < k:
        raise LearnerError(f"cannot split {n} rows into {k} folds")
    rng = np.random.default_rng(seed)
    fold_id = np.empty(n, dtype=np.int64)
    counts = np.bincount(y)
    if counts[counts > 0].min() >= k:
        for label in np.nonzero(counts)[0]:
            idx = np.nonzero(y == label)[0]
            idx = idx[rng.permutation(idx.shape[0])]
            fold_id[idx] = np.arange(idx.shape[0]) % k
        return fold_id, True
    perm = rng.permutation(n)
    fold_id[perm] = np.arange(n) % k
    return fold_id, False
