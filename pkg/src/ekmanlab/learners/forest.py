"""Random forest: bootstrapped CART trees with per-split feature sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .base import LearnerError, TrainedLearner, as_csr, check_labels
from .tree import TreeModel, grow_classification_tree


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 200
    max_depth: int = 40
    min_samples_split: int = 2
    min_gain: float = 1e-7
    feature_fraction_rule: str | float = "sqrt"
    bootstrap: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")

    def mtry(self, d: int) -> int:
        if self.feature_fraction_rule == "sqrt":
            return max(1, math.ceil(math.sqrt(d)))
        frac = float(self.feature_fraction_rule)
        if not 0 < frac <= 1:
            raise ValueError("feature fraction must be in (0, 1]")
        return max(1, math.ceil(frac * d))

    def fit(self, X, y, n_classes: int | None = None) -> "ForestModel":
        return forest_fit(X, y, self, n_classes)


class ForestModel(TrainedLearner):
    kind = "forest"

    def __init__(self, trees: list[TreeModel], feature_dim: int, n_classes: int):
        super().__init__(feature_dim=feature_dim, n_classes=n_classes)
        self.trees = trees

    def predict_proba(self, X) -> np.ndarray:
        X = as_csr(X, self.feature_dim)
        acc = np.zeros((X.shape[0], self.n_classes))
        for tree in self.trees:
            acc += tree.predict_proba(X)
        return acc / len(self.trees)

    def to_state(self) -> dict:
        return {
            "kind": self.kind,
            "feature_dim": self.feature_dim,
            "n_classes": self.n_classes,
            "trees": [t.to_state() for t in self.trees],
        }

    @classmethod
    def from_state(cls, state: dict) -> "ForestModel":
        trees = [TreeModel.from_state(ts) for ts in state["trees"]]
        model = cls(trees, int(state["feature_dim"]), int(state["n_classes"]))
        return model


def forest_fit(X, y, config: ForestConfig = ForestConfig(), n_classes: int | None = None) -> ForestModel:
    X = as_csr(X)
    y, k = check_labels(y, n_classes)
    n, d = X.shape
    if n != y.shape[0]:
        raise LearnerError(f"X has {n} rows but y has {y.shape[0]} labels")
    mtry = config.mtry(d)
    seeds = np.random.SeedSequence(config.seed).spawn(config.n_trees)

    trees: list[TreeModel] = []
    for t in range(config.n_trees):
        rng = np.random.default_rng(seeds[t])
        if config.bootstrap:
            rows = rng.integers(0, n, size=n)
            Xb = X[rows]
            yb = y[rows]
        else:
            Xb = X
            yb = y
        feature, threshold, left, right, counts = grow_classification_tree(
            Xb.tocsc(), yb, k, config.max_depth, config.min_samples_split,
            config.min_gain, mtry=mtry if mtry < d else None, rng=rng,
        )
        trees.append(TreeModel(feature, threshold, left, right, counts, d))

    model = ForestModel(trees, d, k)
    model.fit_report = {
        "n_trees": config.n_trees,
        "mtry": mtry,
        "n_train": int(n),
        "n_nodes": [t.n_nodes for t in trees],
    }
    return model
