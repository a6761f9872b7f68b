"""End-to-end text prediction: normalization -> TF-IDF -> model."""

from __future__ import annotations

import numpy as np

from .corpus import COARSE_NAMES
from .modelstore import ModelBundle
from .textnorm import normalize_full, tokenize_raw

# Fixed label-to-emoji table; override per pipeline when needed.
DEFAULT_EMOJI_TABLE = {
    "anger": "\U0001F620",
    "disgust": "\U0001F922",
    "fear": "\U0001F628",
    "joy": "\U0001F604",
    "sadness": "\U0001F622",
    "surprise": "\U0001F62E",
    "neutral": "\U0001F610",
}


class EmotionPipeline:
    """A loaded bundle plus the label/emoji vocabulary around it."""

    def __init__(self, bundle: ModelBundle, emoji_table: dict[str, str] | None = None):
        self.bundle = bundle
        self.emoji_table = dict(DEFAULT_EMOJI_TABLE if emoji_table is None else emoji_table)
        self.label_names = COARSE_NAMES

    @property
    def model_name(self) -> str:
        return self.bundle.metadata.get("model_name", self.bundle.model.kind)

    def tokenize(self, text: str):
        if self.bundle.pipeline_mode == "full":
            return normalize_full(text, self.bundle.resources, self.bundle.repeat_cap)
        return tokenize_raw(text)

    def predict_dist(self, text: str) -> np.ndarray:
        doc = self.tokenize(text)
        vec = self.bundle.tfidf.transform_one(doc)
        return np.asarray(self.bundle.model.predict_proba(vec))[0]

    def predict_text(self, text: str) -> dict:
        """The JSON-ready prediction payload shared by CLI and service."""
        dist = self.predict_dist(text)
        label_idx = int(np.argmax(dist))
        label = self.label_names[label_idx]
        payload = {
            "text": text,
            "label": label,
            "emoji": self.emoji_table[label],
            "probabilities": {
                name: float(dist[i]) for i, name in enumerate(self.label_names)
            },
            "model_name": self.model_name,
        }
        if not text.strip():
            payload["empty_input"] = True
        return payload
