"""Start the HTTP prediction service on a trained bundle and exercise its
three endpoints the way the web client does.
"""

import json
import tempfile
import urllib.request
from pathlib import Path

import numpy as np

from ekmanlab import features, modelstore, textnorm
from ekmanlab.learners import LogRegConfig
from ekmanlab.pipeline import EmotionPipeline
from ekmanlab.service import PredictionService

# train a small bundle (see demo 06 for the full walkthrough)
res = textnorm.load_default_resources()
corpus = {
    3: ["i love this", "wonderful day", "great news"],
    0: ["this is infuriating", "absolutely furious", "so annoying"],
    6: ["meeting at noon", "the report has ten pages", "it is a table"],
}
docs, y = [], []
for label, examples in corpus.items():
    for t in examples:
        docs.append(textnorm.normalize_full(t, res).tokens)
        y.append(label)
tfidf = features.fit(docs, features.TfIdfConfig(min_df=1, max_features=None))
model = LogRegConfig(epochs=200).fit(tfidf.transform(docs), np.array(y), 7)
bundle = modelstore.ModelBundle(
    pipeline_mode="full", tfidf=tfidf, model=model, resources=res,
    metadata={"model_name": "demo", "trained_at": 0},
)
path = Path(tempfile.mkdtemp()) / "demo.emb"
modelstore.save(bundle, path)

service = PredictionService(EmotionPipeline(modelstore.load(path)), quiet=True)
port = service.start(port=0)
base = f"http://127.0.0.1:{port}"
print("serving on", base)

def get(route):
    with urllib.request.urlopen(f"{base}{route}", timeout=10) as r:
        return json.loads(r.read())

def post(route, payload):
    req = urllib.request.Request(
        f"{base}{route}", data=json.dumps(payload).encode(),
        headers={"Content-Type": "application/json"}, method="POST",
    )
    try:
        with urllib.request.urlopen(req, timeout=10) as r:
            return r.status, json.loads(r.read())
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read())

print("\nGET /api/health ->", get("/api/health"))
print("GET /api/model  ->", get("/api/model"))

status, body = post("/api/predict", {"text": "I love how this turned out"})
print(f"\nPOST /api/predict -> {status}")
print(f"  label: {body['label']} {body['emoji']}  ({body['elapsed_ms']:.1f} ms)")
for name, p in body["probabilities"].items():
    print(f"    {name:>9}: {'#' * int(40 * p):<40} {p:.3f}")

status, body = post("/api/predict", {})
print(f"\nPOST /api/predict with no text -> {status} {body['error']['code']}")

service.stop()
print("\nservice stopped cleanly")
print("To serve a CLI-trained bundle instead:  ekmanlab serve --bundle out/stacking.emb --port 8080")
print("Then open frontend/index.html (see frontend/README note in the main README).")
