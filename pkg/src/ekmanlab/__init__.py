"""ekmanlab: emotion detection on Reddit comments.

Corpus preparation with Ekman mapping, text normalization, TF-IDF features,
from-scratch classifiers and ensembles, a reproducible evaluation harness,
and an HTTP prediction service.
"""

from . import (
    cli,
    corpus,
    ensembles,
    features,
    learners,
    metrics,
    modelstore,
    pipeline,
    service,
    textnorm,
)
from .corpus import COARSE_NAMES, CoarseLabel

__version__ = "0.1.0"

__all__ = [
    "COARSE_NAMES",
    "CoarseLabel",
    "cli",
    "corpus",
    "ensembles",
    "features",
    "learners",
    "metrics",
    "modelstore",
    "pipeline",
    "service",
    "textnorm",
    "__version__",
]
