"""Voting, bagging, and stacking over the learner interface.

Voting fits heterogeneous members on the full training set and combines
their probability distributions (soft) or argmax votes (hard).  Bagging
fits copies of one base learner on bootstrap resamples.  Stacking trains a
meta-classifier on out-of-fold base probabilities, so no meta-feature row
is ever produced by a model that saw that row during training.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
import numpy as np

from .learners.base import (
    LearnerError,
    TrainedLearner,
    as_csr,
    check_labels,
    stratified_kfold,
)
from .learners.boosting import GBTConfig
from .learners.forest import ForestConfig
from .learners.logistic import LogRegConfig
from .learners.svm import SVMConfig


def default_voting_members() -> tuple:
    """The boosted-trees / logistic-regression / SVM triple."""
    return (GBTConfig(), LogRegConfig(), SVMConfig())


def default_stacking_bases() -> tuple:
    """Forest, boosted trees and SVM bases under a logistic meta-learner."""
    return (ForestConfig(), GBTConfig(), SVMConfig())


@dataclass(frozen=True)
class VotingConfig:
    members: tuple = field(default_factory=default_voting_members)
    mode: str = "soft"
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.mode not in ("soft", "hard"):
            raise ValueError(f"unknown voting mode: {self.mode!r}")
        if not self.members:
            raise ValueError("voting needs at least one member")
        if self.weights is not None:
            if len(self.weights) != len(self.members):
                raise ValueError("weights length must match members length")
            if any(w <= 0 for w in self.weights):
                raise ValueError("weights must be positive")

    def fit(self, X, y, n_classes: int | None = None) -> "VotingModel":
        return voting_fit(X, y, self, n_classes)


@dataclass(frozen=True)
class BaggingConfig:
    base: object = field(default_factory=SVMConfig)
    n_estimators: int = 10
    seed: int = 0
    bootstrap: bool = True  # identity-sample hook for tests when False

    def __post_init__(self):
        if self.n_estimators < 1:
            raise ValueError("n_estimators must be >= 1")

    def fit(self, X, y, n_classes: int | None = None) -> "BaggingModel":
        return bagging_fit(X, y, self, n_classes)


@dataclass(frozen=True)
class StackingConfig:
    bases: tuple = field(default_factory=default_stacking_bases)
    meta: object = field(default_factory=LogRegConfig)
    k_folds: int = 5
    seed: int = 0

    def __post_init__(self):
        if not self.bases:
            raise ValueError("stacking needs at least one base")
        if self.k_folds < 2:
            raise ValueError("k_folds must be >= 2")

    def fit(self, X, y, n_classes: int | None = None) -> "StackingModel":
        return stacking_fit(X, y, self, n_classes)


class VotingModel(TrainedLearner):
    kind = "voting"

    def __init__(self, members: list[TrainedLearner], mode: str,
                 weights: np.ndarray, feature_dim: int, n_classes: int):
        super().__init__(feature_dim=feature_dim, n_classes=n_classes)
        self.members = members
        self.mode = mode
        self.weights = np.asarray(weights, dtype=np.float64)

    def member_probas(self, X) -> np.ndarray:
        X = as_csr(X, self.feature_dim)
        return np.stack([m.predict_proba(X) for m in self.members])  # (M, n, k)

    def predict_proba(self, X) -> np.ndarray:
        return self.vote_soft(X)

    def vote_soft(self, X, weights=None) -> np.ndarray:
        """Weighted mean of member distributions, renormalized exactly."""
        probas = self.member_probas(X)
        w = self.weights if weights is None else np.asarray(weights, dtype=np.float64)
        w = w / w.sum()
        mixed = np.tensordot(w, probas, axes=(0, 0))
        return mixed / mixed.sum(axis=1, keepdims=True)

    def vote_hard(self, X) -> np.ndarray:
        """Majority label over members; ties broken by summed member
        probability over the tied labels, then by lowest class index."""
        probas = self.member_probas(X)
        votes = probas.argmax(axis=2)  # (M, n)
        n = votes.shape[1]
        out = np.empty(n, dtype=np.int64)
        for i in range(n):
            counts = np.bincount(votes[:, i], minlength=self.n_classes)
            top = counts.max()
            tied = np.nonzero(counts == top)[0]
            if tied.shape[0] == 1:
                out[i] = tied[0]
            else:
                sums = probas[:, i, tied].sum(axis=0)
                out[i] = tied[np.argmax(sums)]
        return out

    def predict(self, X) -> np.ndarray:
        if self.mode == "hard":
            return self.vote_hard(X)
        return np.argmax(self.vote_soft(X), axis=1)

    def to_state(self) -> dict:
        return {
            "kind": self.kind,
            "mode": self.mode,
            "weights": self.weights,
            "feature_dim": self.feature_dim,
            "n_classes": self.n_classes,
            "members": [m.to_state() for m in self.members],
        }

    @classmethod
    def from_state(cls, state: dict) -> "VotingModel":
        from .modelstore import model_from_state

        members = [model_from_state(ms) for ms in state["members"]]
        model = cls(members, state["mode"], state["weights"],
                    int(state["feature_dim"]), int(state["n_classes"]))
        return model


def voting_fit(X, y, config: VotingConfig = VotingConfig(),
               n_classes: int | None = None) -> VotingModel:
    X = as_csr(X)
    y, k = check_labels(y, n_classes)
    members = []
    timings = []
    for cfg in config.members:
        start = time.perf_counter()
        members.append(cfg.fit(X, y, k))
        timings.append(time.perf_counter() - start)
    weights = (
        np.asarray(config.weights, dtype=np.float64)
        if config.weights is not None
        else np.ones(len(members))
    )
    model = VotingModel(members, config.mode, weights, X.shape[1], k)
    model.fit_report = {
        "members": [m.kind for m in members],
        "member_seconds": timings,
        "member_reports": [m.fit_report for m in members],
        "mode": config.mode,
    }
    return model


def vote_soft(ensemble: VotingModel, x, weights=None) -> np.ndarray:
    return ensemble.vote_soft(x, weights)[0]


def vote_hard(ensemble: VotingModel, x) -> int:
    return int(ensemble.vote_hard(x)[0])


class BaggingModel(TrainedLearner):
    kind = "bagging"

    def __init__(self, members: list[TrainedLearner], base_kind: str,
                 feature_dim: int, n_classes: int):
        super().__init__(feature_dim=feature_dim, n_classes=n_classes)
        self.members = members
        self.base_kind = base_kind

    def predict_proba(self, X) -> np.ndarray:
        X = as_csr(X, self.feature_dim)
        acc = np.zeros((X.shape[0], self.n_classes))
        for m in self.members:
            acc += m.predict_proba(X)
        return acc / len(self.members)

    def to_state(self) -> dict:
        return {
            "kind": self.kind,
            "base_kind": self.base_kind,
            "feature_dim": self.feature_dim,
            "n_classes": self.n_classes,
            "members": [m.to_state() for m in self.members],
        }

    @classmethod
    def from_state(cls, state: dict) -> "BaggingModel":
        from .modelstore import model_from_state

        members = [model_from_state(ms) for ms in state["members"]]
        model = cls(members, state["base_kind"],
                    int(state["feature_dim"]), int(state["n_classes"]))
        return model


def bagging_fit(X, y, config: BaggingConfig = BaggingConfig(),
                n_classes: int | None = None) -> BaggingModel:
    X = as_csr(X)
    y, k = check_labels(y, n_classes)
    n = X.shape[0]
    seeds = np.random.SeedSequence(config.seed).spawn(config.n_estimators)
    members = []
    timings = []
    for e in range(config.n_estimators):
        start = time.perf_counter()
        if config.bootstrap:
            rng = np.random.default_rng(seeds[e])
            rows = rng.integers(0, n, size=n)
            members.append(config.base.fit(X[rows], y[rows], k))
        else:
            members.append(config.base.fit(X, y, k))
        timings.append(time.perf_counter() - start)
    model = BaggingModel(members, members[0].kind, X.shape[1], k)
    model.fit_report = {
        "n_estimators": config.n_estimators,
        "base": members[0].kind,
        "bootstrap": config.bootstrap,
        "member_seconds": timings,
    }
    return model


def bagging_predict_proba(ensemble: BaggingModel, x) -> np.ndarray:
    return ensemble.predict_proba(x)[0]


class StackingModel(TrainedLearner):
    kind = "stacking"

    def __init__(self, bases: list[TrainedLearner], meta: TrainedLearner,
                 feature_dim: int, n_classes: int):
        super().__init__(feature_dim=feature_dim, n_classes=n_classes)
        self.bases = bases
        self.meta = meta

    @property
    def meta_dim(self) -> int:
        return len(self.bases) * self.n_classes

    def meta_features(self, X) -> np.ndarray:
        X = as_csr(X, self.feature_dim)
        return np.hstack([b.predict_proba(X) for b in self.bases])

    def predict_proba(self, X) -> np.ndarray:
        return self.meta.predict_proba(self.meta_features(X))

    def to_state(self) -> dict:
        return {
            "kind": self.kind,
            "feature_dim": self.feature_dim,
            "n_classes": self.n_classes,
            "bases": [b.to_state() for b in self.bases],
            "meta": self.meta.to_state(),
        }

    @classmethod
    def from_state(cls, state: dict) -> "StackingModel":
        from .modelstore import model_from_state

        bases = [model_from_state(bs) for bs in state["bases"]]
        meta = model_from_state(state["meta"])
        model = cls(bases, meta, int(state["feature_dim"]), int(state["n_classes"]))
        return model


def stacking_oof_features(X, y, config: StackingConfig, k: int) -> tuple[np.ndarray, bool]:
    """Out-of-fold meta-feature matrix, n x (|bases| * k)."""
    X = as_csr(X)
    n = X.shape[0]
    fold_id, stratified = stratified_kfold(y, config.k_folds, config.seed)
    meta = np.zeros((n, len(config.bases) * k), dtype=np.float64)
    for f in range(config.k_folds):
        holdout = fold_id == f
        rest = ~holdout
        for b, base_cfg in enumerate(config.bases):
            fitted = base_cfg.fit(X[rest], y[rest], k)
            meta[holdout, b * k : (b + 1) * k] = fitted.predict_proba(X[holdout])
    return meta, stratified


def stacking_fit(X, y, config: StackingConfig = StackingConfig(),
                 n_classes: int | None = None) -> StackingModel:
    X = as_csr(X)
    y, k = check_labels(y, n_classes)
    if X.shape[0] < config.k_folds:
        raise LearnerError(
            f"stacking needs at least k_folds={config.k_folds} rows, got {X.shape[0]}"
        )
    oof_start = time.perf_counter()
    meta_features, stratified = stacking_oof_features(X, y, config, k)
    oof_seconds = time.perf_counter() - oof_start
    meta = config.meta.fit(meta_features, y, k)
    bases = []
    timings = []
    for cfg in config.bases:
        start = time.perf_counter()
        bases.append(cfg.fit(X, y, k))
        timings.append(time.perf_counter() - start)
    model = StackingModel(bases, meta, X.shape[1], k)
    model.fit_report = {
        "bases": [b.kind for b in bases],
        "meta": meta.kind,
        "k_folds": config.k_folds,
        "stratified": stratified,
        "meta_dim": model.meta_dim,
        "oof_seconds": oof_seconds,
        "base_refit_seconds": timings,
    }
    return model


def stacking_predict_proba(ensemble: StackingModel, x) -> np.ndarray:
    return ensemble.predict_proba(x)[0]
