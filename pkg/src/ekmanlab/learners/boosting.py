"""Gradient-boosted trees for multiclass classification.

Each round fits one depth-limited regression tree per class on the softmax
gradients g = p - 1[y=k] and hessians h = p*(1-p), with second-order leaf
values w = -G/(H+lambda) and the regularized squared-gradient split gain.
Class scores accumulate learning_rate * tree_k(x); probabilities are the
softmax of the accumulated scores.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .base import LearnerError, TrainedLearner, as_csr, check_labels, softmax
from .tree import _apply_tree, _csc_arrays, _csr_arrays, _NodeStore, _scan_level_newton


@dataclass(frozen=True)
class GBTConfig:
    n_rounds: int = 200
    learning_rate: float = 0.1
    max_depth: int = 6
    lam: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n_rounds < 0:
            raise ValueError("n_rounds must be >= 0")
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")
        if self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")

    def fit(self, X, y, n_classes: int | None = None) -> "GBTModel":
        return gbt_fit(X, y, self, n_classes)


class RegressionTree:
    """Flat regression tree: internal nodes route, leaves carry values."""

    def __init__(self, feature, threshold, left, right, value):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.value = np.asarray(value, dtype=np.float64)

    def apply(self, X: sp.csr_matrix) -> np.ndarray:
        data, indices, indptr = _csr_arrays(X)
        leaves = _apply_tree(data, indices, indptr, X.shape[0],
                             self.feature, self.threshold, self.left, self.right)
        return self.value[leaves]

    def to_state(self) -> dict:
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left,
            "right": self.right,
            "value": self.value,
        }

    @classmethod
    def from_state(cls, state: dict) -> "RegressionTree":
        return cls(state["feature"], state["threshold"], state["left"],
                   state["right"], state["value"])


def grow_regression_tree(
    X_csc: sp.csc_matrix,
    g: np.ndarray,
    h: np.ndarray,
    max_depth: int,
    lam: float,
) -> tuple[RegressionTree, np.ndarray]:
    """Grow one Newton tree; also returns training-row leaf values."""
    n, d = X_csc.shape
    data, indices, indptr = _csc_arrays(X_csc)

    store = _NodeStore()
    root = store.add()
    node_value: list[float] = [0.0]

    node_of_sample = np.zeros(n, dtype=np.int64)
    level_slots = [root]
    depth = 0

    while level_slots:
        m = len(level_slots)
        active = node_of_sample >= 0
        node_g = np.bincount(node_of_sample[active], weights=g[active], minlength=m)
        node_h = np.bincount(node_of_sample[active], weights=h[active], minlength=m)
        node_n = np.bincount(node_of_sample[active], minlength=m).astype(np.int64)
        for s, gid in enumerate(level_slots):
            value = -node_g[s] / (node_h[s] + lam)
            if not np.isfinite(value):
                raise LearnerError("non-finite leaf value during boosting")
            node_value[gid] = value

        if depth >= max_depth:
            break
        splittable = node_n >= 2
        if not splittable.all():
            keep = np.nonzero(splittable)[0]
            slot_remap = np.full(m, -1, dtype=np.int64)
            slot_remap[keep] = np.arange(keep.shape[0])
            node_of_sample = np.where(
                active, slot_remap[np.clip(node_of_sample, 0, m - 1)], -1
            )
            level_slots = [level_slots[s] for s in keep]
            node_g = node_g[keep]
            node_h = node_h[keep]
            node_n = node_n[keep]
            m = len(level_slots)
        if m == 0:
            break

        best_feat, best_thr, best_gain = _scan_level_newton(
            data, indices, indptr, d, g, h,
            node_of_sample, node_g, node_h, node_n.astype(np.float64), lam,
        )
        split_slots = np.nonzero(best_feat >= 0)[0]
        if split_slots.shape[0] == 0:
            break

        next_slots: list[int] = []
        left_slot = np.full(m, -1, dtype=np.int64)
        right_slot = np.full(m, -1, dtype=np.int64)
        for s in split_slots:
            gid = level_slots[s]
            lid = store.add()
            rid = store.add()
            node_value.append(0.0)
            node_value.append(0.0)
            store.feature[gid] = int(best_feat[s])
            store.threshold[gid] = float(best_thr[s])
            store.left[gid] = lid
            store.right[gid] = rid
            left_slot[s] = len(next_slots)
            next_slots.append(lid)
            right_slot[s] = len(next_slots)
            next_slots.append(rid)

        zero_left = 0.0 <= best_thr
        default_child = np.where(zero_left, left_slot, right_slot)
        is_split = best_feat >= 0
        active = node_of_sample >= 0
        slot_of = node_of_sample[active]
        new_assign = np.where(is_split[slot_of], default_child[slot_of], -1)
        node_of_sample = node_of_sample.copy()
        node_of_sample[active] = new_assign

        for s in split_slots:
            j = int(best_feat[s])
            thr = float(best_thr[s])
            col = slice(indptr[j], indptr[j + 1])
            rows = indices[col]
            vals = data[col]
            sel = np.isin(node_of_sample[rows], (left_slot[s], right_slot[s]))
            rsel = rows[sel]
            vsel = vals[sel]
            node_of_sample[rsel] = np.where(vsel <= thr, left_slot[s], right_slot[s])

        level_slots = next_slots
        depth += 1

    feature, threshold, left, right = store.arrays()
    tree = RegressionTree(feature, threshold, left, right, np.asarray(node_value))

    data_r, indices_r, indptr_r = _csr_arrays(X_csc.tocsr())
    leaves = _apply_tree(data_r, indices_r, indptr_r, n,
                         tree.feature, tree.threshold, tree.left, tree.right)
    return tree, tree.value[leaves]


class GBTModel(TrainedLearner):
    kind = "gbt"

    def __init__(self, trees: list[list[RegressionTree]], feature_dim: int,
                 n_classes: int, learning_rate: float, base_score: float = 0.0):
        super().__init__(feature_dim=feature_dim, n_classes=n_classes)
        self.trees = trees  # [round][class]
        self.learning_rate = float(learning_rate)
        self.base_score = float(base_score)

    def decision_scores(self, X) -> np.ndarray:
        X = as_csr(X, self.feature_dim)
        scores = np.full((X.shape[0], self.n_classes), self.base_score)
        for round_trees in self.trees:
            for k, tree in enumerate(round_trees):
                scores[:, k] += self.learning_rate * tree.apply(X)
        return scores

    def predict_proba(self, X) -> np.ndarray:
        return softmax(self.decision_scores(X))

    def to_state(self) -> dict:
        return {
            "kind": self.kind,
            "feature_dim": self.feature_dim,
            "n_classes": self.n_classes,
            "learning_rate": self.learning_rate,
            "base_score": self.base_score,
            "trees": [[t.to_state() for t in round_trees] for round_trees in self.trees],
        }

    @classmethod
    def from_state(cls, state: dict) -> "GBTModel":
        trees = [
            [RegressionTree.from_state(ts) for ts in round_trees]
            for round_trees in state["trees"]
        ]
        model = cls(trees, int(state["feature_dim"]), int(state["n_classes"]),
                    float(state["learning_rate"]), float(state["base_score"]))
        return model


def _log_loss(F: np.ndarray, y: np.ndarray) -> float:
    shifted = F - F.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    return float(-log_probs[np.arange(y.shape[0]), y].mean())


def gbt_fit(X, y, config: GBTConfig = GBTConfig(), n_classes: int | None = None) -> GBTModel:
    X = as_csr(X)
    y, k = check_labels(y, n_classes)
    n, d = X.shape
    if n != y.shape[0]:
        raise LearnerError(f"X has {n} rows but y has {y.shape[0]} labels")

    X_csc = X.tocsc()
    F = np.zeros((n, k), dtype=np.float64)
    onehot = np.zeros((n, k), dtype=np.float64)
    onehot[np.arange(n), y] = 1.0

    trees: list[list[RegressionTree]] = []
    losses = [_log_loss(F, y)]
    for _ in range(config.n_rounds):
        P = softmax(F)
        G = P - onehot
        H = P * (1.0 - P)
        round_trees: list[RegressionTree] = []
        for c in range(k):
            tree, train_values = grow_regression_tree(
                X_csc, G[:, c], H[:, c], config.max_depth, config.lam,
            )
            F[:, c] += config.learning_rate * train_values
            round_trees.append(tree)
        trees.append(round_trees)
        losses.append(_log_loss(F, y))

    model = GBTModel(trees, d, k, config.learning_rate)
    model.fit_report = {
        "rounds": config.n_rounds,
        "final_loss": losses[-1],
        "loss_history": losses,
        "n_train": int(n),
    }
    return model
