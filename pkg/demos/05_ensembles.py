"""Voting, bagging, and stacking on a synthetic task with a train/test
split, mirroring how the ensembles combine the base learners.
"""

import numpy as np
import scipy.sparse as sp

from ekmanlab.ensembles import (
    BaggingConfig,
    StackingConfig,
    VotingConfig,
    stacking_oof_features,
)
from ekmanlab.learners import ForestConfig, GBTConfig, LogRegConfig, SVMConfig

rng = np.random.default_rng(500)
n, d, k = 600, 12, 3
X = np.abs(rng.normal(0, 1, (n, d)))
X[rng.random((n, d)) < 0.4] = 0.0
w = rng.normal(0, 1, (k, d))
y = np.argmax(X @ w.T + rng.normal(0, 0.5, (n, k)), axis=1)
Xs = sp.csr_matrix(X)
train, test = slice(0, 420), slice(420, n)

def acc(model):
    return (model.predict(Xs[test]) == y[test]).mean()

# -- voting: boosted trees + logistic + svm, soft vs hard -------------------

members = (GBTConfig(n_rounds=20, max_depth=3, seed=0), LogRegConfig(epochs=150),
           SVMConfig(epochs=10))
soft = VotingConfig(members=members, mode="soft").fit(Xs[train], y[train], k)
hard = VotingConfig(members=members, mode="hard").fit(Xs[train], y[train], k)
for name, model in [("member " + m.kind, m) for m in soft.members]:
    print(f"{name:<16} test acc {acc(model):.3f}")
print(f"{'soft voting':<16} test acc {acc(soft):.3f}")
print(f"{'hard voting':<16} test acc {acc(hard):.3f}")

# -- bagging: ten bootstrap copies of one learner ----------------------------

bagged = BaggingConfig(base=LogRegConfig(epochs=80), n_estimators=10, seed=1).fit(
    Xs[train], y[train], k
)
print(f"\n{'bagging logreg':<16} test acc {acc(bagged):.3f} "
      f"({len(bagged.members)} estimators)")

# -- stacking: out-of-fold meta-features, logistic meta-learner --------------

stack_cfg = StackingConfig(
    bases=(ForestConfig(n_trees=20, max_depth=8, seed=2),
           GBTConfig(n_rounds=20, max_depth=3, seed=2),
           SVMConfig(epochs=10)),
    meta=LogRegConfig(epochs=200),
    k_folds=5,
    seed=2,
)
meta_features, stratified = stacking_oof_features(Xs[train], y[train], stack_cfg, k)
print(f"\nstacking meta-feature matrix: {meta_features.shape} "
      f"(stratified folds: {stratified})")
print("each base block of a row sums to 1:",
      np.allclose(meta_features[:, :k].sum(axis=1), 1.0, atol=1e-6))

stack = stack_cfg.fit(Xs[train], y[train], k)
print(f"{'stacking':<16} test acc {acc(stack):.3f}")
