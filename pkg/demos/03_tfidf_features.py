"""TF-IDF vectorization on a toy corpus: document frequencies, idf weights,
L2-normalized sparse rows, and out-of-vocabulary behavior.
"""

import numpy as np

from ekmanlab.features import TfIdfConfig, fit, fit_transform, transform

docs = [
    ["happy", "day", "happy"],
    ["sad", "day"],
    ["happy", "night"],
    ["sad", "sad", "night", "day"],
    ["calm", "night", "calm", "calm", "day"],
]

model, X = fit_transform(docs, TfIdfConfig(min_df=1, max_features=None))

print("vocabulary (lexicographic):")
for term, idx in model.vocab.items():
    print(f"  {term:>6} -> col {idx}, df={model.df[idx]}, idf={model.idf[idx]:.4f}")

print("\nmatrix rows are L2-normalized:")
dense = X.toarray()
for i, row in enumerate(dense):
    print(f"  doc {i}: norm={np.linalg.norm(row):.12f}")

# "day" appears in 4 of 5 docs, so its idf is the smallest.
common = model.vocab["day"]
rare = model.vocab["calm"]
print(f"\nidf(day)={model.idf[common]:.4f} < idf(calm)={model.idf[rare]:.4f}")

# Transforming unseen documents: OOV terms are ignored.
vec = transform(model, ["happy", "dragons"])
print("\n['happy', 'dragons'] ->", dict(zip(vec.indices.tolist(), np.round(vec.values, 4))))
vec = transform(model, ["dragons"])
print("['dragons'] (all OOV) -> zero vector, nnz =", len(vec.indices))

# Document frequency filtering and vocabulary caps:
capped = fit(docs, TfIdfConfig(min_df=2, max_features=3))
print("\nmin_df=2, max_features=3 keeps:", list(capped.terms))
