"""Shared fixtures: synthetic GoEmotions-format data and toy matrices."""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
import pytest
import scipy.sparse as sp

from ekmanlab import textnorm
from ekmanlab.corpus import CoarseLabel

# Fine-label ids per coarse family (canonical GoEmotions id order) and seed
# phrases used to synthesize corpus files with a learnable signal.
_FAMILIES = {
    CoarseLabel.ANGER: ([2, 3, 10], ["furious rage boils over", "so annoying ugh", "i strongly disapprove"]),
    CoarseLabel.DISGUST: ([11], ["that is gross and disgusting", "ew nasty vile"]),
    CoarseLabel.FEAR: ([14, 19], ["i am terrified and scared", "nervous and afraid now"]),
    CoarseLabel.JOY: ([17, 1, 15, 18], ["i love this wonderful day", "haha hilarious fun", "thank you so much friend", "great awesome amazing"]),
    CoarseLabel.SADNESS: ([25, 9, 16], ["i am heartbroken and sad", "such a disappointing loss", "grief and sorrow linger"]),
    CoarseLabel.SURPRISE: ([26, 22, 6], ["wow totally unexpected twist", "wait what really happened", "confusing and puzzling turn"]),
    CoarseLabel.NEUTRAL: ([27], ["the meeting starts at noon", "it is a wooden table", "the report has ten pages"]),
}
_FILLERS = ["honestly", "today", "right", "still", "maybe", "always", "little", "nearby", "again", "quietly"]


def synth_lines(n: int, seed: int, tag: str) -> list[str]:
    rng = np.random.default_rng(seed)
    labels = list(_FAMILIES)
    lines = []
    for i in range(n):
        coarse = labels[int(rng.integers(0, len(labels)))]
        ids, seeds = _FAMILIES[coarse]
        base = seeds[int(rng.integers(0, len(seeds)))]
        extra = " ".join(rng.choice(_FILLERS, size=int(rng.integers(0, 4))))
        text = (base + " " + extra).strip()
        fine = ids[int(rng.integers(0, len(ids)))]
        lines.append(f"{text}\t{fine}\t{tag}{i}")
    return lines


@pytest.fixture(scope="session")
def synth_data_dir(tmp_path_factory) -> Path:
    """A synthetic corpus in the GoEmotions simplified split format."""
    root = tmp_path_factory.mktemp("synthdata")
    (root / "train.tsv").write_text("\n".join(synth_lines(400, 11, "tr")) + "\n")
    (root / "dev.tsv").write_text("\n".join(synth_lines(80, 12, "dv")) + "\n")
    (root / "test.tsv").write_text("\n".join(synth_lines(80, 13, "te")) + "\n")
    return root


@pytest.fixture(scope="session")
def resources() -> textnorm.NormResources:
    return textnorm.load_default_resources()


@pytest.fixture(scope="session")
def toy_binary():
    """Linearly separable 2-class set, 10 points in 2 features."""
    rng = np.random.default_rng(42)
    X = np.vstack([rng.normal(-2.0, 0.3, (5, 2)), rng.normal(2.0, 0.3, (5, 2))])
    y = np.array([0] * 5 + [1] * 5)
    return sp.csr_matrix(X), y


@pytest.fixture(scope="session")
def toy_multiclass():
    """Separable 7-class blobs on sparse non-negative features."""
    rng = np.random.default_rng(7)
    n_per, d, k = 20, 21, 7
    rows = []
    labels = []
    for c in range(k):
        block = np.zeros((n_per, d))
        block[:, 3 * c : 3 * c + 3] = rng.uniform(0.5, 1.5, (n_per, 3))
        noise_col = rng.integers(0, d, n_per)
        block[np.arange(n_per), noise_col] += rng.uniform(0, 0.3, n_per)
        rows.append(block)
        labels += [c] * n_per
    X = sp.csr_matrix(np.vstack(rows))
    return X, np.array(labels)


def real_data_dir() -> Path | None:
    """Locate the real GoEmotions splits if present."""
    candidates = []
    env = os.environ.get("EKMANLAB_DATA_DIR")
    if env:
        candidates.append(Path(env))
    candidates.append(Path(__file__).resolve().parent.parent / "data" / "goemotions")
    for base in candidates:
        if all((base / f).exists() for f in ("train.tsv", "dev.tsv", "test.tsv")):
            return base
    return None


def require_real_data() -> Path:
    base = real_data_dir()
    if base is None:
        pytest.skip(
            "real GoEmotions splits not found; set EKMANLAB_DATA_DIR or place "
            "train.tsv/dev.tsv/test.tsv under data/goemotions/"
        )
    return base
