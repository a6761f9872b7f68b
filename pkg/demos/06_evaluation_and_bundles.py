"""Evaluation reports, the model-comparison table, and saving/loading a
self-contained model bundle that predicts from raw text.
"""

import tempfile
from pathlib import Path

import numpy as np

from ekmanlab import features, metrics, modelstore, textnorm
from ekmanlab.learners import LogRegConfig, NBConfig
from ekmanlab.pipeline import EmotionPipeline

# A tiny labeled text corpus (label indices follow the 7-class order).
texts = {
    0: ["this makes me furious", "absolutely enraging behavior", "so annoying honestly"],
    1: ["that is disgusting", "gross and vile stuff", "nasty slimy mess"],
    2: ["i am terrified", "so scared of the dark", "nervous and afraid"],
    3: ["i love this so much", "what a wonderful day", "great news everyone"],
    4: ["i am heartbroken", "such a sad loss", "tears and sorrow"],
    5: ["wow i did not expect that", "what a twist", "really unexpected turn"],
    6: ["the meeting is at noon", "the table is wooden", "it has ten pages"],
}

res = textnorm.load_default_resources()
docs, y = [], []
for label, examples in texts.items():
    for t in examples:
        docs.append(textnorm.normalize_full(t, res).tokens)
        y.append(label)
y = np.array(y)

tfidf = features.fit(docs, features.TfIdfConfig(min_df=1, max_features=None))
X = tfidf.transform(docs)

# -- evaluate two models and compare -----------------------------------------

reports = []
for name, cfg in [("nb", NBConfig()), ("logreg", LogRegConfig(epochs=200))]:
    model = cfg.fit(X, y, 7)
    report = metrics.evaluate(model, X, y, model_name=name, split_name="train")
    reports.append(report)
    print(report.to_text())
    print()

table = metrics.compare(reports)
print(metrics.comparison_text(table))
print()
print(metrics.comparison_csv(table))

# -- bundle the better model and predict from raw text ------------------------

best = LogRegConfig(epochs=200).fit(X, y, 7)
bundle = modelstore.ModelBundle(
    pipeline_mode="full",
    tfidf=tfidf,
    model=best,
    resources=res,
    metadata={"model_name": "logreg-demo", "trained_at": 0},
)
path = Path(tempfile.mkdtemp()) / "demo.emb"
modelstore.save(bundle, path)
print(f"bundle written: {path} ({path.stat().st_size} bytes)")

pipeline = EmotionPipeline(modelstore.load(path))
for text in ("I can't believe how wonderful this is!", "that gross vile mess again"):
    out = pipeline.predict_text(text)
    print(f"  {text!r} -> {out['label']} {out['emoji']}")
