"""Fit all six base classifiers on a small 7-class synthetic problem and
compare their training behavior and probability outputs.
"""

import numpy as np
import scipy.sparse as sp

from ekmanlab.corpus import COARSE_NAMES
from ekmanlab.learners import (
    ForestConfig,
    GBTConfig,
    LogRegConfig,
    NBConfig,
    SVMConfig,
    TreeConfig,
)

rng = np.random.default_rng(7)
n_per, d, k = 30, 21, 7
blocks, labels = [], []
for c in range(k):
    block = np.zeros((n_per, d))
    block[:, 3 * c : 3 * c + 3] = rng.uniform(0.4, 1.4, (n_per, 3))
    block[np.arange(n_per), rng.integers(0, d, n_per)] += rng.uniform(0, 0.5, n_per)
    blocks.append(block)
    labels += [c] * n_per
X = sp.csr_matrix(np.vstack(blocks))
y = np.array(labels)

configs = {
    "naive bayes": NBConfig(),
    "logistic": LogRegConfig(epochs=150),
    "svm": SVMConfig(epochs=10),
    "tree": TreeConfig(max_depth=12),
    "forest": ForestConfig(n_trees=20, max_depth=10, seed=0),
    "gbt": GBTConfig(n_rounds=15, max_depth=3, seed=0),
}

print(f"{'model':<12} {'train acc':>9}   notes")
models = {}
for name, cfg in configs.items():
    model = cfg.fit(X, y, k)
    models[name] = model
    acc = (model.predict(X) == y).mean()
    note = ""
    if "final_loss" in model.fit_report:
        note = f"final loss {model.fit_report['final_loss']:.4f}"
    elif "n_nodes" in model.fit_report:
        note = f"{model.fit_report['n_nodes']} nodes"
    print(f"{name:<12} {acc:>9.3f}   {note}")

# Every learner emits a full distribution over the 7 emotions.
probe = X[0]  # first row belongs to class 0 (anger)
print("\nprobabilities for one class-0 input:")
for name, model in models.items():
    dist = model.predict_proba(probe)[0]
    top = COARSE_NAMES[int(np.argmax(dist))]
    print(f"  {name:<12} sum={dist.sum():.6f}  argmax={top}")

# The logistic gradient is exposed for verification against finite
# differences (the test suite automates this check).
from ekmanlab.learners import logreg_gradient, logreg_objective

W = rng.normal(0, 0.1, (k, d))
b = np.zeros(k)
dW, db = logreg_gradient(W, b, X, y, l2=0.01)
eps = 1e-6
Wp = W.copy(); Wp[0, 0] += eps
Wm = W.copy(); Wm[0, 0] -= eps
numeric = (logreg_objective(Wp, b, X, y, 0.01) - logreg_objective(Wm, b, X, y, 0.01)) / (2 * eps)
print(f"\ngradient check at W[0,0]: analytic {dW[0, 0]:.10f} vs numeric {numeric:.10f}")
