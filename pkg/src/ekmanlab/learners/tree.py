"""CART decision trees on sparse feature matrices.

Split search runs level by level over CSC columns inside numba kernels, so
absent entries are treated as exact zeros without densifying.  Candidate
thresholds are midpoints of the sorted unique observed values of a feature
at a node, with zero always included as a boundary.  Ties between equally
good splits go to the lowest feature index, then the lowest threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from numba import njit

from .base import LearnerError, TrainedLearner, as_csr, check_labels


@dataclass(frozen=True)
class TreeConfig:
    max_depth: int = 40
    min_samples_split: int = 2
    min_gain: float = 1e-7

    def __post_init__(self):
        if self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        if self.min_gain < 0:
            raise ValueError("min_gain must be >= 0")

    def fit(self, X, y, n_classes: int | None = None) -> "TreeModel":
        return tree_fit(X, y, self, n_classes)


@njit(cache=True)
def _in_sorted(arr, row, width, value):
    lo, hi = 0, width
    while lo < hi:
        mid = (lo + hi) // 2
        v = arr[row, mid]
        if v == value:
            return True
        if v < value:
            lo = mid + 1
        else:
            hi = mid
    return False


@njit(cache=True)
def _gini(counts, total):
    if total <= 0.0:
        return 0.0
    s = 0.0
    for c in range(counts.shape[0]):
        p = counts[c] / total
        s += p * p
    return 1.0 - s


@njit(cache=True)
def _scan_level_gini(data, indices, indptr, n_features, y, n_classes,
                     node_of_sample, node_counts, cand, min_gain):
    """Best Gini split per active node slot for one tree level.

    Returns (best_feature, best_threshold, best_gain) arrays sized to the
    number of slots; feature -1 means no admissible split was found.
    ``cand`` holds per-slot sorted candidate features; a zero-width ``cand``
    means every feature is a candidate.
    """
    m = node_counts.shape[0]
    mtry = cand.shape[1]
    best_gain = np.full(m, -1.0)
    best_feat = np.full(m, -1, dtype=np.int64)
    best_thr = np.zeros(m)

    node_total = np.zeros(m)
    parent_gini = np.zeros(m)
    for s in range(m):
        tot = 0.0
        for c in range(n_classes):
            tot += node_counts[s, c]
        node_total[s] = tot
        parent_gini[s] = _gini(node_counts[s], tot)

    colcount = np.zeros(m, dtype=np.int64)
    left = np.zeros(n_classes)
    group = np.zeros(n_classes)
    seg_counts = np.zeros(n_classes)

    for j in range(n_features):
        start = indptr[j]
        end = indptr[j + 1]
        if end == start:
            continue
        total_active = 0
        for s in range(m):
            colcount[s] = 0
        for p in range(start, end):
            s = node_of_sample[indices[p]]
            if s < 0:
                continue
            if mtry > 0 and not _in_sorted(cand, s, mtry, j):
                continue
            colcount[s] += 1
            total_active += 1
        if total_active == 0:
            continue

        off = np.empty(m + 1, dtype=np.int64)
        off[0] = 0
        for s in range(m):
            off[s + 1] = off[s] + colcount[s]
        cursor = off[:-1].copy()
        ent_val = np.empty(total_active)
        ent_y = np.empty(total_active, dtype=np.int64)
        for p in range(start, end):
            r = indices[p]
            s = node_of_sample[r]
            if s < 0:
                continue
            if mtry > 0 and not _in_sorted(cand, s, mtry, j):
                continue
            pos = cursor[s]
            ent_val[pos] = data[p]
            ent_y[pos] = y[r]
            cursor[s] += 1

        for s in range(m):
            lo = off[s]
            hi = off[s + 1]
            cnt = hi - lo
            if cnt == 0:
                continue
            tot = node_total[s]
            seg = ent_val[lo:hi]
            seg_y = ent_y[lo:hi]
            order = np.argsort(seg)

            for c in range(n_classes):
                seg_counts[c] = 0.0
            for i in range(cnt):
                seg_counts[seg_y[i]] += 1.0
            zero_n = tot - cnt

            for c in range(n_classes):
                left[c] = 0.0
            n_left = 0.0
            i = 0
            zero_done = False
            while True:
                # next group: the zero block slots in before the first
                # positive value (or at the end of the negatives)
                if not zero_done and (i >= cnt or seg[order[i]] > 0.0):
                    group_val = 0.0
                    group_n = zero_n
                    for c in range(n_classes):
                        group[c] = node_counts[s, c] - seg_counts[c]
                    zero_done = True
                elif i < cnt:
                    group_val = seg[order[i]]
                    group_n = 0.0
                    for c in range(n_classes):
                        group[c] = 0.0
                    while i < cnt and seg[order[i]] == group_val:
                        group[seg_y[order[i]]] += 1.0
                        group_n += 1.0
                        i += 1
                else:
                    break
                for c in range(n_classes):
                    left[c] += group[c]
                n_left += group_n
                # peek the next group's value for the midpoint
                if not zero_done and (i >= cnt or seg[order[i]] > 0.0):
                    next_val = 0.0
                elif i < cnt:
                    next_val = seg[order[i]]
                else:
                    break
                if n_left <= 0.0 or n_left >= tot:
                    continue
                n_right = tot - n_left
                gini_l = 0.0
                gini_r = 0.0
                sl = 0.0
                sr = 0.0
                for c in range(n_classes):
                    pl = left[c] / n_left
                    pr = (node_counts[s, c] - left[c]) / n_right
                    sl += pl * pl
                    sr += pr * pr
                gini_l = 1.0 - sl
                gini_r = 1.0 - sr
                gain = parent_gini[s] - (n_left / tot) * gini_l - (n_right / tot) * gini_r
                if gain >= min_gain and gain > best_gain[s]:
                    best_gain[s] = gain
                    best_feat[s] = j
                    best_thr[s] = 0.5 * (group_val + next_val)
    return best_feat, best_thr, best_gain


@njit(cache=True)
def _scan_level_newton(data, indices, indptr, n_features, g, h,
                       node_of_sample, node_g, node_h, node_n, lam):
    """Best second-order split per slot: gain maximizes the regularized
    squared-gradient objective 0.5*(GL^2/(HL+lam) + GR^2/(HR+lam) - G^2/(H+lam))."""
    m = node_g.shape[0]
    best_gain = np.full(m, 0.0)
    best_feat = np.full(m, -1, dtype=np.int64)
    best_thr = np.zeros(m)

    colcount = np.zeros(m, dtype=np.int64)

    for j in range(n_features):
        start = indptr[j]
        end = indptr[j + 1]
        if end == start:
            continue
        total_active = 0
        for s in range(m):
            colcount[s] = 0
        for p in range(start, end):
            s = node_of_sample[indices[p]]
            if s < 0:
                continue
            colcount[s] += 1
            total_active += 1
        if total_active == 0:
            continue

        off = np.empty(m + 1, dtype=np.int64)
        off[0] = 0
        for s in range(m):
            off[s + 1] = off[s] + colcount[s]
        cursor = off[:-1].copy()
        ent_val = np.empty(total_active)
        ent_g = np.empty(total_active)
        ent_h = np.empty(total_active)
        for p in range(start, end):
            r = indices[p]
            s = node_of_sample[r]
            if s < 0:
                continue
            pos = cursor[s]
            ent_val[pos] = data[p]
            ent_g[pos] = g[r]
            ent_h[pos] = h[r]
            cursor[s] += 1

        for s in range(m):
            lo = off[s]
            hi = off[s + 1]
            cnt = hi - lo
            if cnt == 0:
                continue
            seg = ent_val[lo:hi]
            sg = ent_g[lo:hi]
            sh = ent_h[lo:hi]
            order = np.argsort(seg)

            seg_g = 0.0
            seg_h = 0.0
            for i in range(cnt):
                seg_g += sg[i]
                seg_h += sh[i]
            zero_g = node_g[s] - seg_g
            zero_h = node_h[s] - seg_h
            zero_n = node_n[s] - cnt

            parent_term = node_g[s] * node_g[s] / (node_h[s] + lam)

            gl = 0.0
            hl = 0.0
            nl = 0
            i = 0
            zero_done = False
            while True:
                if not zero_done and (i >= cnt or seg[order[i]] > 0.0):
                    group_val = 0.0
                    g_g = zero_g
                    g_h = zero_h
                    g_n = zero_n
                    zero_done = True
                elif i < cnt:
                    group_val = seg[order[i]]
                    g_g = 0.0
                    g_h = 0.0
                    g_n = 0
                    while i < cnt and seg[order[i]] == group_val:
                        g_g += sg[order[i]]
                        g_h += sh[order[i]]
                        g_n += 1
                        i += 1
                else:
                    break
                gl += g_g
                hl += g_h
                nl += g_n
                if not zero_done and (i >= cnt or seg[order[i]] > 0.0):
                    next_val = 0.0
                elif i < cnt:
                    next_val = seg[order[i]]
                else:
                    break
                if nl <= 0 or nl >= node_n[s]:
                    continue
                gr = node_g[s] - gl
                hr = node_h[s] - hl
                gain = 0.5 * (gl * gl / (hl + lam) + gr * gr / (hr + lam) - parent_term)
                if gain > best_gain[s] and gain > 0.0:
                    best_gain[s] = gain
                    best_feat[s] = j
                    best_thr[s] = 0.5 * (group_val + next_val)
    return best_feat, best_thr, best_gain


@njit(cache=True)
def _apply_tree(data, indices, indptr, n_rows, feature, threshold, left, right):
    """Route each CSR row to its leaf; returns leaf node ids."""
    out = np.empty(n_rows, dtype=np.int64)
    for i in range(n_rows):
        node = 0
        while feature[node] >= 0:
            j = feature[node]
            lo = indptr[i]
            hi = indptr[i + 1]
            x = 0.0
            while lo < hi:
                mid = (lo + hi) // 2
                cj = indices[mid]
                if cj == j:
                    x = data[mid]
                    break
                if cj < j:
                    lo = mid + 1
                else:
                    hi = mid
            if x <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = node
    return out


def _csc_arrays(X: sp.csc_matrix):
    return (
        np.ascontiguousarray(X.data, dtype=np.float64),
        np.ascontiguousarray(X.indices, dtype=np.int64),
        np.ascontiguousarray(X.indptr, dtype=np.int64),
    )


def _csr_arrays(X: sp.csr_matrix):
    return (
        np.ascontiguousarray(X.data, dtype=np.float64),
        np.ascontiguousarray(X.indices, dtype=np.int64),
        np.ascontiguousarray(X.indptr, dtype=np.int64),
    )


class _NodeStore:
    """Growable flat tree storage shared by all tree kinds."""

    def __init__(self):
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []

    def add(self) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        return len(self.feature) - 1

    def arrays(self):
        return (
            np.asarray(self.feature, dtype=np.int64),
            np.asarray(self.threshold, dtype=np.float64),
            np.asarray(self.left, dtype=np.int64),
            np.asarray(self.right, dtype=np.int64),
        )


def _sample_features(rng: np.random.Generator, d: int, mtry: int) -> np.ndarray:
    """Floyd's sampling: mtry distinct features, sorted, deterministic."""
    chosen: set[int] = set()
    out = np.empty(mtry, dtype=np.int64)
    pos = 0
    for j in range(d - mtry, d):
        t = int(rng.integers(0, j + 1))
        if t in chosen:
            t = j
        chosen.add(t)
        out[pos] = t
        pos += 1
    out.sort()
    return out


def grow_classification_tree(
    X_csc: sp.csc_matrix,
    y: np.ndarray,
    n_classes: int,
    max_depth: int,
    min_samples_split: int,
    min_gain: float,
    mtry: int | None = None,
    rng: np.random.Generator | None = None,
):
    """Level-wise CART induction; returns flat node arrays and counts.

    ``mtry`` enables per-split feature subsampling (random forest); None
    scans every feature.
    """
    n, d = X_csc.shape
    data, indices, indptr = _csc_arrays(X_csc)
    y = np.ascontiguousarray(y, dtype=np.int64)

    store = _NodeStore()
    root = store.add()
    node_counts_all: list[np.ndarray] = [np.zeros(n_classes)]

    node_of_sample = np.zeros(n, dtype=np.int64)
    level_slots = [root]  # slot -> global node id

    use_sampling = mtry is not None and mtry < d
    depth = 0
    while level_slots:
        m = len(level_slots)
        counts = np.zeros((m, n_classes), dtype=np.float64)
        active = node_of_sample >= 0
        np.add.at(counts, (node_of_sample[active], y[active]), 1.0)
        for s, gid in enumerate(level_slots):
            node_counts_all[gid] = counts[s]

        totals = counts.sum(axis=1)
        pure = (counts.max(axis=1) == totals)
        splittable = (totals >= min_samples_split) & ~pure & (depth < max_depth)

        # samples in unsplittable slots settle as leaves
        if not splittable.all():
            keep = np.nonzero(splittable)[0]
            slot_remap = np.full(m, -1, dtype=np.int64)
            slot_remap[keep] = np.arange(keep.shape[0])
            node_of_sample = np.where(
                active, slot_remap[np.clip(node_of_sample, 0, m - 1)], -1
            )
            level_slots = [level_slots[s] for s in keep]
            counts = counts[keep]
            m = len(level_slots)
        if m == 0:
            break

        if use_sampling:
            cand = np.empty((m, mtry), dtype=np.int64)
            for s in range(m):
                cand[s] = _sample_features(rng, d, mtry)
        else:
            cand = np.empty((m, 0), dtype=np.int64)

        best_feat, best_thr, best_gain = _scan_level_gini(
            data, indices, indptr, d, y, n_classes,
            node_of_sample, counts, cand, min_gain,
        )

        split_slots = np.nonzero(best_feat >= 0)[0]
        if split_slots.shape[0] == 0:
            break

        next_slots: list[int] = []
        left_slot = np.full(m, -1, dtype=np.int64)
        right_slot = np.full(m, -1, dtype=np.int64)
        for s in split_slots:
            gid = level_slots[s]
            j = int(best_feat[s])
            thr = float(best_thr[s])
            lid = store.add()
            rid = store.add()
            node_counts_all.append(np.zeros(n_classes))
            node_counts_all.append(np.zeros(n_classes))
            store.feature[gid] = j
            store.threshold[gid] = thr
            store.left[gid] = lid
            store.right[gid] = rid
            left_slot[s] = len(next_slots)
            next_slots.append(lid)
            right_slot[s] = len(next_slots)
            next_slots.append(rid)

        # zeros go left when the threshold admits them
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
            # rows currently routed to a child of slot s
            sel = np.isin(node_of_sample[rows], (left_slot[s], right_slot[s]))
            # restrict to rows that belonged to slot s: their default child ids
            # are unique to s, so the isin test is exact
            rsel = rows[sel]
            vsel = vals[sel]
            node_of_sample[rsel] = np.where(vsel <= thr, left_slot[s], right_slot[s])

        level_slots = next_slots
        depth += 1

    feature, threshold, left, right = store.arrays()
    counts_arr = np.vstack(node_counts_all) if node_counts_all else np.zeros((1, n_classes))
    return feature, threshold, left, right, counts_arr


class TreeModel(TrainedLearner):
    kind = "tree"

    def __init__(self, feature, threshold, left, right, counts, feature_dim: int):
        counts = np.asarray(counts, dtype=np.float64)
        super().__init__(feature_dim=feature_dim, n_classes=counts.shape[1])
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.counts = counts

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    def leaf_ids(self, X) -> np.ndarray:
        X = as_csr(X, self.feature_dim)
        data, indices, indptr = _csr_arrays(X)
        return _apply_tree(data, indices, indptr, X.shape[0],
                           self.feature, self.threshold, self.left, self.right)

    def predict_proba(self, X) -> np.ndarray:
        leaves = self.leaf_ids(X)
        counts = self.counts[leaves]
        # Laplace-smoothed leaf distributions
        smoothed = counts + 1.0
        return smoothed / smoothed.sum(axis=1, keepdims=True)

    def to_state(self) -> dict:
        return {
            "kind": self.kind,
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left,
            "right": self.right,
            "counts": self.counts,
            "feature_dim": self.feature_dim,
        }

    @classmethod
    def from_state(cls, state: dict) -> "TreeModel":
        model = cls(state["feature"], state["threshold"], state["left"],
                    state["right"], state["counts"], int(state["feature_dim"]))
        return model


def tree_fit(X, y, config: TreeConfig = TreeConfig(), n_classes: int | None = None) -> TreeModel:
    X = as_csr(X)
    y, k = check_labels(y, n_classes)
    if X.shape[0] != y.shape[0]:
        raise LearnerError(f"X has {X.shape[0]} rows but y has {y.shape[0]} labels")
    feature, threshold, left, right, counts = grow_classification_tree(
        X.tocsc(), y, k, config.max_depth, config.min_samples_split, config.min_gain,
    )
    model = TreeModel(feature, threshold, left, right, counts, X.shape[1])
    model.fit_report = {"n_nodes": model.n_nodes, "n_train": int(X.shape[0])}
    return model
