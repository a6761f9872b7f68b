"""TF-IDF vectorization over tokenized documents.

Fitting builds a vocabulary of terms (and n-grams) with document frequencies
from training documents; transforming produces L2-normalized sparse vectors
with smoothed idf weights: idf(t) = ln((1 + n_docs) / (1 + df(t))) + 1.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .textnorm import TokenizedDoc


class FitError(Exception):
    """Vectorizer cannot be fitted on the given documents."""


@dataclass(frozen=True)
class TfIdfConfig:
    min_df: int = 2
    max_features: int | None = 50000
    ngram_max: int = 1

    def __post_init__(self):
        if self.min_df < 1:
            raise ValueError("min_df must be >= 1")
        if self.max_features is not None and self.max_features < 1:
            raise ValueError("max_features must be >= 1 when set")
        if self.ngram_max < 1:
            raise ValueError("ngram_max must be >= 1")


@dataclass(frozen=True)
class SparseVector:
    """One document as (strictly increasing indices, values, dimension)."""

    indices: np.ndarray
    values: np.ndarray
    dim: int

    def to_csr(self) -> sp.csr_matrix:
        indptr = np.array([0, len(self.indices)])
        return sp.csr_matrix(
            (self.values.astype(np.float64), self.indices.astype(np.int32), indptr),
            shape=(1, self.dim),
        )

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(self.values**2)))


def _doc_tokens(doc) -> Sequence[str]:
    if isinstance(doc, TokenizedDoc):
        return doc.tokens
    return doc


def _terms(tokens: Sequence[str], ngram_max: int) -> Iterable[str]:
    if ngram_max == 1:
        yield from tokens
        return
    n = len(tokens)
    for size in range(1, ngram_max + 1):
        for i in range(n - size + 1):
            yield " ".join(tokens[i : i + size])


class TfIdfModel:
    """Fitted vocabulary with document frequencies and idf weights."""

    def __init__(self, terms: Sequence[str], df: Sequence[int], n_docs: int, config: TfIdfConfig):
        self.terms: tuple[str, ...] = tuple(terms)
        self.vocab: dict[str, int] = {t: i for i, t in enumerate(self.terms)}
        self.df = np.asarray(df, dtype=np.int64)
        self.n_docs = int(n_docs)
        self.config = config
        self.idf = np.log((1.0 + self.n_docs) / (1.0 + self.df)) + 1.0

    @property
    def dim(self) -> int:
        return len(self.terms)

    def transform_one(self, doc) -> SparseVector:
        tokens = _doc_tokens(doc)
        counts: Counter[int] = Counter()
        for term in _terms(tokens, self.config.ngram_max):
            idx = self.vocab.get(term)
            if idx is not None:
                counts[idx] += 1
        if not counts:
            return SparseVector(
                indices=np.empty(0, dtype=np.int32),
                values=np.empty(0, dtype=np.float64),
                dim=self.dim,
            )
        indices = np.array(sorted(counts), dtype=np.int32)
        values = np.array([counts[i] for i in indices], dtype=np.float64)
        values *= self.idf[indices]
        norm = math.sqrt(float(np.sum(values**2)))
        if norm > 0.0:
            values /= norm
        return SparseVector(indices=indices, values=values, dim=self.dim)

    def transform(self, docs: Sequence) -> sp.csr_matrix:
        """Transform many documents into one CSR matrix, row per document."""
        indptr = [0]
        indices: list[np.ndarray] = []
        data: list[np.ndarray] = []
        for doc in docs:
            vec = self.transform_one(doc)
            indices.append(vec.indices)
            data.append(vec.values)
            indptr.append(indptr[-1] + len(vec.indices))
        if not docs:
            return sp.csr_matrix((0, self.dim), dtype=np.float64)
        return sp.csr_matrix(
            (
                np.concatenate(data) if data else np.empty(0),
                np.concatenate(indices) if indices else np.empty(0, dtype=np.int32),
                np.asarray(indptr, dtype=np.int64),
            ),
            shape=(len(docs), self.dim),
        )


def fit(docs: Sequence, config: TfIdfConfig = TfIdfConfig()) -> TfIdfModel:
    """Fit a vocabulary on training documents.

    Terms with df below ``min_df`` are dropped; when ``max_features`` is set
    only the highest-df terms are kept (ties broken lexicographically), and
    the surviving vocabulary is indexed in lexicographic order.
    """
    if not docs:
        raise FitError("cannot fit TF-IDF on an empty document list")
    df_counter: Counter[str] = Counter()
    for doc in docs:
        seen = set(_terms(_doc_tokens(doc), config.ngram_max))
        df_counter.update(seen)

    kept = [(t, c) for t, c in df_counter.items() if c >= config.min_df]
    if config.max_features is not None and len(kept) > config.max_features:
        kept.sort(key=lambda tc: (-tc[1], tc[0]))
        kept = kept[: config.max_features]
    kept.sort(key=lambda tc: tc[0])
    if not kept:
        raise FitError("vocabulary is empty after document-frequency filtering")
    terms = [t for t, _ in kept]
    df = [c for _, c in kept]
    return TfIdfModel(terms=terms, df=df, n_docs=len(docs), config=config)


def transform(model: TfIdfModel, doc) -> SparseVector:
    return model.transform_one(doc)


def fit_transform(docs: Sequence, config: TfIdfConfig = TfIdfConfig()):
    model = fit(docs, config)
    return model, model.transform(docs)


def export_coo(matrix: sp.csr_matrix) -> str:
    """Coordinate-format text dump (row col value), one entry per line."""
    coo = matrix.tocoo()
    lines = [
        f"{r} {c} {v:.12g}"
        for r, c, v in sorted(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()))
    ]
    return "\n".join(lines)
