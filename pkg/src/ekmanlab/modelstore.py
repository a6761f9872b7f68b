"""Versioned single-file serialization of the full inference pipeline.

Container layout: 4-byte magic, little-endian uint32 header length, a JSON
header, then the binary payload of length-prefixed array sections.  The
header carries a CRC-32 over the whole payload, so any payload corruption is
rejected at load time.  Identical bundles serialize to identical bytes.

A bundle is self-contained: it embeds the normalization resources, the
fitted TF-IDF model and the trained model, so a saved file can serve
predictions anywhere the package is installed.
"""

from __future__ import annotations

import hashlib
import json
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ensembles import BaggingModel, StackingModel, VotingModel
from .features import TfIdfConfig, TfIdfModel
from .learners.base import TrainedLearner
from .learners.boosting import GBTModel
from .learners.forest import ForestModel
from .learners.logistic import LogRegModel
from .learners.naive_bayes import NaiveBayesModel
from .learners.svm import SVMModel
from .learners.tree import TreeModel
from .textnorm import NormResources

MAGIC = b"EKMB"
FORMAT_VERSION = 1
FILE_EXTENSION = ".emb"

_MODEL_CLASSES: dict[str, type] = {
    cls.kind: cls
    for cls in (
        NaiveBayesModel, LogRegModel, SVMModel, TreeModel, ForestModel,
        GBTModel, VotingModel, BaggingModel, StackingModel,
    )
}


class StoreError(Exception):
    pass


class ChecksumError(StoreError):
    pass


class VersionError(StoreError):
    pass


def model_from_state(state: dict) -> TrainedLearner:
    kind = state.get("kind")
    cls = _MODEL_CLASSES.get(kind)
    if cls is None:
        raise StoreError(f"unknown model kind: {kind!r}")
    return cls.from_state(state)


@dataclass
class ModelBundle:
    pipeline_mode: str  # "raw" | "full"
    tfidf: TfIdfModel
    model: TrainedLearner
    resources: NormResources
    metadata: dict = field(default_factory=dict)
    repeat_cap: int = 2
    format_version: int = FORMAT_VERSION

    def __post_init__(self):
        if self.pipeline_mode not in ("raw", "full"):
            raise StoreError(f"unknown pipeline mode: {self.pipeline_mode!r}")
        if self.tfidf.dim != self.model.feature_dim:
            raise StoreError(
                f"TF-IDF dimension {self.tfidf.dim} does not match "
                f"model feature_dim {self.model.feature_dim}"
            )

    @property
    def norm_resources_digest(self) -> str:
        return resources_digest(self.resources)


def _canonical_json(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def resources_digest(resources: NormResources) -> str:
    blob = _canonical_json(
        {
            "emoji": dict(resources.emoji_lexicon),
            "contractions": dict(resources.contractions),
            "abbreviations": dict(resources.abbreviations),
            "stopwords": sorted(resources.stopwords),
            "lemma_exceptions": dict(resources.lemma_exceptions),
        }
    )
    return hashlib.sha256(blob).hexdigest()


class _SectionWriter:
    def __init__(self):
        self.chunks: list[bytes] = []
        self.table: list[dict] = []
        self.offset = 0

    def add_array(self, arr: np.ndarray) -> int:
        arr = np.ascontiguousarray(arr)
        dtype = arr.dtype.newbyteorder("<")
        raw = arr.astype(dtype, copy=False).tobytes()
        index = len(self.table)
        self.table.append(
            {
                "offset": self.offset,
                "length": len(raw),
                "dtype": dtype.str,
                "shape": list(arr.shape),
            }
        )
        self.chunks.append(raw)
        self.offset += len(raw)
        return index

    def add_text(self, text: str) -> int:
        return self.add_array(np.frombuffer(text.encode("utf-8"), dtype=np.uint8))


def _encode_structure(obj, writer: _SectionWriter):
    if isinstance(obj, np.ndarray):
        return {"__array__": writer.add_array(obj)}
    if isinstance(obj, dict):
        return {key: _encode_structure(value, writer) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode_structure(value, writer) for value in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    raise StoreError(f"cannot serialize value of type {type(obj).__name__}")


def _decode_structure(obj, sections: list[np.ndarray]):
    if isinstance(obj, dict):
        if "__array__" in obj and len(obj) == 1:
            return sections[obj["__array__"]]
        return {key: _decode_structure(value, sections) for key, value in obj.items()}
    if isinstance(obj, list):
        return [_decode_structure(value, sections) for value in obj]
    return obj


def _text_from_array(arr: np.ndarray) -> str:
    return arr.tobytes().decode("utf-8")


def save(bundle: ModelBundle, path: str | Path) -> None:
    """Write a bundle as one self-contained .emb file."""
    writer = _SectionWriter()

    tfidf_struct = {
        "terms": {"__array__": writer.add_text("\n".join(bundle.tfidf.terms))},
        "df": {"__array__": writer.add_array(bundle.tfidf.df)},
        "n_docs": bundle.tfidf.n_docs,
        "min_df": bundle.tfidf.config.min_df,
        "max_features": bundle.tfidf.config.max_features,
        "ngram_max": bundle.tfidf.config.ngram_max,
    }
    resources_struct = {
        "emoji": {"__array__": writer.add_text(_canonical_json(dict(bundle.resources.emoji_lexicon)).decode())},
        "contractions": {"__array__": writer.add_text(_canonical_json(dict(bundle.resources.contractions)).decode())},
        "abbreviations": {"__array__": writer.add_text(_canonical_json(dict(bundle.resources.abbreviations)).decode())},
        "stopwords": {"__array__": writer.add_text("\n".join(sorted(bundle.resources.stopwords)))},
        "lemma_exceptions": {"__array__": writer.add_text(_canonical_json(dict(bundle.resources.lemma_exceptions)).decode())},
    }
    model_struct = _encode_structure(bundle.model.to_state(), writer)

    payload = b"".join(writer.chunks)
    header = {
        "format_version": bundle.format_version,
        "pipeline_mode": bundle.pipeline_mode,
        "repeat_cap": bundle.repeat_cap,
        "model_kind": bundle.model.kind,
        "norm_resources_digest": bundle.norm_resources_digest,
        "metadata": bundle.metadata,
        "payload_checksum": zlib.crc32(payload),
        "payload_length": len(payload),
        "sections": writer.table,
        "tfidf": tfidf_struct,
        "resources": resources_struct,
        "model": model_struct,
    }
    header_bytes = _canonical_json(header)
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(len(header_bytes).to_bytes(4, "little"))
        fh.write(header_bytes)
        fh.write(payload)


def read_header(path: str | Path) -> dict:
    """Parse and return the JSON header without loading the payload."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise StoreError(f"{path}: not a model bundle (bad magic)")
        raw_len = fh.read(4)
        if len(raw_len) != 4:
            raise StoreError(f"{path}: truncated header length")
        header_len = int.from_bytes(raw_len, "little")
        header_bytes = fh.read(header_len)
        if len(header_bytes) != header_len:
            raise StoreError(f"{path}: truncated header")
        try:
            return json.loads(header_bytes.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise StoreError(f"{path}: corrupt header: {exc}") from exc


def load(path: str | Path) -> ModelBundle:
    """Load and verify a bundle; checksum and version mismatches raise."""
    path = Path(path)
    header = read_header(path)
    version = header.get("format_version")
    if version != FORMAT_VERSION:
        raise VersionError(f"{path}: unsupported format version {version}")

    with open(path, "rb") as fh:
        fh.seek(4)
        header_len = int.from_bytes(fh.read(4), "little")
        fh.seek(8 + header_len)
        payload = fh.read()
    if len(payload) != header["payload_length"]:
        raise StoreError(
            f"{path}: payload truncated ({len(payload)} of {header['payload_length']} bytes)"
        )
    if zlib.crc32(payload) != header["payload_checksum"]:
        raise ChecksumError(f"{path}: payload checksum mismatch")

    sections: list[np.ndarray] = []
    for entry in header["sections"]:
        start = entry["offset"]
        end = start + entry["length"]
        arr = np.frombuffer(payload[start:end], dtype=np.dtype(entry["dtype"]))
        sections.append(arr.reshape(entry["shape"]).copy())

    tfidf_struct = _decode_structure(header["tfidf"], sections)
    terms = _text_from_array(tfidf_struct["terms"]).split("\n")
    config = TfIdfConfig(
        min_df=tfidf_struct["min_df"],
        max_features=tfidf_struct["max_features"],
        ngram_max=tfidf_struct["ngram_max"],
    )
    tfidf = TfIdfModel(terms=terms, df=tfidf_struct["df"],
                       n_docs=tfidf_struct["n_docs"], config=config)

    res_struct = _decode_structure(header["resources"], sections)
    resources = NormResources(
        emoji_lexicon=json.loads(_text_from_array(res_struct["emoji"])),
        contractions=json.loads(_text_from_array(res_struct["contractions"])),
        abbreviations=json.loads(_text_from_array(res_struct["abbreviations"])),
        stopwords=frozenset(_text_from_array(res_struct["stopwords"]).split("\n")),
        lemma_exceptions=json.loads(_text_from_array(res_struct["lemma_exceptions"])),
    )

    model_state = _decode_structure(header["model"], sections)
    model = model_from_state(model_state)

    bundle = ModelBundle(
        pipeline_mode=header["pipeline_mode"],
        tfidf=tfidf,
        model=model,
        resources=resources,
        metadata=header.get("metadata", {}),
        repeat_cap=header.get("repeat_cap", 2),
        format_version=version,
    )
    stored_digest = header.get("norm_resources_digest")
    if stored_digest != bundle.norm_resources_digest:
        raise ChecksumError(f"{path}: normalization resources digest mismatch")
    return bundle
