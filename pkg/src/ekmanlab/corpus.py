"""GoEmotions corpus handling: split loading, Ekman mapping, label resolution.

The simplified GoEmotions split files are tab-separated with three fields per
line: comment text, comma-separated fine-label ids, and a record id.  Fine
labels (27 emotions + neutral) are collapsed onto six coarse Ekman categories
plus neutral through an external mapping file, multi-label comments are
resolved to a single coarse label, and duplicates are dropped per split.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from enum import IntEnum
from importlib import resources as importlib_resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence


class CorpusError(Exception):
    """Base error for corpus loading and validation problems."""


class ParseError(CorpusError):
    """A split file line that does not follow the three-field format."""


class TaxonomyError(CorpusError):
    """A label id or name outside the fine-label taxonomy."""


class MappingError(CorpusError):
    """A fine-to-coarse mapping that is not a total, valid function."""


class CoarseLabel(IntEnum):
    """The six Ekman emotions plus neutral, in fixed index order."""

    ANGER = 0
    DISGUST = 1
    FEAR = 2
    JOY = 3
    SADNESS = 4
    SURPRISE = 5
    NEUTRAL = 6

    @property
    def label_name(self) -> str:
        return self.name.lower()

    @classmethod
    def from_name(cls, name: str) -> "CoarseLabel":
        try:
            return cls[name.upper()]
        except KeyError:
            raise MappingError(f"unknown coarse label name: {name!r}") from None


COARSE_NAMES: tuple[str, ...] = tuple(label.label_name for label in CoarseLabel)
N_COARSE = len(COARSE_NAMES)

# Fine-label names in canonical GoEmotions id order (0..27).
GOEMOTIONS_LABEL_NAMES: tuple[str, ...] = (
    "admiration", "amusement", "anger", "annoyance", "approval",
    "caring", "confusion", "curiosity", "desire", "disappointment",
    "disapproval", "disgust", "embarrassment", "excitement", "fear",
    "gratitude", "grief", "joy", "love", "nervousness",
    "optimism", "pride", "realization", "relief", "remorse",
    "sadness", "surprise", "neutral",
)


@dataclass(frozen=True)
class FineLabel:
    id: int
    name: str


class Taxonomy:
    """Contiguous bijection between fine-label ids and names."""

    def __init__(self, names: Sequence[str]):
        if len(set(names)) != len(names):
            raise TaxonomyError("fine label names must be unique")
        if "neutral" not in names:
            raise TaxonomyError("taxonomy must contain a 'neutral' label")
        self.labels: tuple[FineLabel, ...] = tuple(
            FineLabel(i, name) for i, name in enumerate(names)
        )
        self._by_name = {label.name: label for label in self.labels}

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def by_id(self, label_id: int) -> FineLabel:
        if not 0 <= label_id < len(self.labels):
            raise TaxonomyError(
                f"fine label id {label_id} outside 0..{len(self.labels) - 1}"
            )
        return self.labels[label_id]

    def by_name(self, name: str) -> FineLabel:
        try:
            return self._by_name[name]
        except KeyError:
            raise TaxonomyError(f"unknown fine label name: {name!r}") from None


DEFAULT_TAXONOMY = Taxonomy(GOEMOTIONS_LABEL_NAMES)


class EkmanMapping:
    """Total function from every fine label to a coarse label."""

    def __init__(self, table: Mapping[str, CoarseLabel], taxonomy: Taxonomy = DEFAULT_TAXONOMY):
        missing = [label.name for label in taxonomy if label.name not in table]
        if missing:
            raise MappingError(f"mapping is missing fine labels: {missing}")
        extra = [name for name in table if name not in {l.name for l in taxonomy}]
        if extra:
            raise MappingError(f"mapping has unknown fine labels: {extra}")
        if table["neutral"] != CoarseLabel.NEUTRAL:
            raise MappingError("'neutral' must map to the neutral coarse label")
        self.taxonomy = taxonomy
        self._by_name = dict(table)
        self._by_id = tuple(table[label.name] for label in taxonomy)

    def map_id(self, fine_id: int) -> CoarseLabel:
        self.taxonomy.by_id(fine_id)
        return self._by_id[fine_id]

    def map_name(self, name: str) -> CoarseLabel:
        return self.map_id(self.taxonomy.by_name(name).id)

    def as_dict(self) -> dict[str, str]:
        return {name: coarse.label_name for name, coarse in self._by_name.items()}

    @classmethod
    def from_file(cls, path: str | Path, taxonomy: Taxonomy = DEFAULT_TAXONOMY) -> "EkmanMapping":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise MappingError(f"cannot read mapping file {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise MappingError(f"mapping file {path} is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise MappingError(f"mapping file {path} must hold a JSON object")
        table = {name: CoarseLabel.from_name(coarse) for name, coarse in raw.items()}
        return cls(table, taxonomy)


def default_mapping() -> EkmanMapping:
    """The packaged GoEmotions fine-to-Ekman mapping."""
    ref = importlib_resources.files("ekmanlab.resources") / "ekman_mapping.json"
    raw = json.loads(ref.read_text(encoding="utf-8"))
    table = {name: CoarseLabel.from_name(coarse) for name, coarse in raw.items()}
    return EkmanMapping(table)


@dataclass(frozen=True)
class RawRecord:
    """One split-file line before label resolution."""

    text: str
    fine_label_ids: frozenset[int]
    example_id: str


@dataclass(frozen=True)
class Example:
    """One comment with its resolved coarse label."""

    text: str
    fine_label_ids: frozenset[int]
    coarse_label: CoarseLabel
    split_origin: str
    example_id: str = ""


@dataclass(frozen=True)
class ClassDistribution:
    counts: dict[CoarseLabel, int]
    proportions: dict[CoarseLabel, float]
    total: int
    empty: bool

    def to_json_dict(self) -> dict[str, int]:
        return {label.label_name: self.counts[label] for label in CoarseLabel}


@dataclass
class Corpus:
    train: list[Example]
    validation: list[Example]
    test: list[Example]
    taxonomy: Taxonomy
    mapping: EkmanMapping
    tie_priors: dict[CoarseLabel, int] = field(default_factory=dict)

    def split(self, name: str) -> list[Example]:
        if name not in ("train", "validation", "test"):
            raise CorpusError(f"unknown split name: {name!r}")
        return getattr(self, name)


def load_split(path: str | Path, taxonomy: Taxonomy = DEFAULT_TAXONOMY) -> list[RawRecord]:
    """Parse one simplified split file into raw records, order preserved."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise CorpusError(f"cannot read split file {path}: {exc}") from exc

    records: list[RawRecord] = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ParseError(
                f"{path}:{lineno}: expected 3 tab-separated fields, got {len(fields)}"
            )
        text, label_field, example_id = fields
        ids = set()
        for part in label_field.split(","):
            part = part.strip()
            if not part:
                raise ParseError(f"{path}:{lineno}: empty label id")
            try:
                label_id = int(part)
            except ValueError:
                raise ParseError(
                    f"{path}:{lineno}: label id {part!r} is not an integer"
                ) from None
            taxonomy.by_id(label_id)  # raises TaxonomyError when out of range
            ids.add(label_id)
        if not ids:
            raise ParseError(f"{path}:{lineno}: no label ids")
        records.append(RawRecord(text=text, fine_label_ids=frozenset(ids), example_id=example_id))
    return records


def resolve_single_label(
    fine_label_ids: Iterable[int],
    mapping: EkmanMapping,
    tie_priors: Mapping[CoarseLabel, int],
) -> CoarseLabel:
    """Pick the dominant coarse label for a fine-label set.

    Each fine label is mapped to its coarse category and the category with the
    highest multiplicity wins.  Multiplicity ties fall back to the higher
    ``tie_priors`` count, then to the lower coarse index, so the result is
    deterministic and independent of input order.
    """
    ids = list(fine_label_ids)
    if not ids:
        raise CorpusError("resolve_single_label requires a non-empty label set")
    for label in CoarseLabel:
        if label not in tie_priors:
            raise CorpusError(f"tie_priors missing coarse label {label.label_name}")
    multiplicity = Counter(mapping.map_id(i) for i in ids)
    return min(
        multiplicity,
        key=lambda label: (-multiplicity[label], -tie_priors[label], int(label)),
    )


def deduplicate(examples: Sequence[Example]) -> list[Example]:
    """Drop repeated (text, coarse_label) pairs, keeping first occurrences."""
    seen: set[tuple[str, CoarseLabel]] = set()
    kept: list[Example] = []
    for example in examples:
        key = (example.text, example.coarse_label)
        if key in seen:
            continue
        seen.add(key)
        kept.append(example)
    return kept


def class_distribution(examples: Sequence[Example]) -> ClassDistribution:
    counts = {label: 0 for label in CoarseLabel}
    for example in examples:
        counts[example.coarse_label] += 1
    total = len(examples)
    if total == 0:
        proportions = {label: 0.0 for label in CoarseLabel}
        return ClassDistribution(counts=counts, proportions=proportions, total=0, empty=True)
    proportions = {label: counts[label] / total for label in CoarseLabel}
    return ClassDistribution(counts=counts, proportions=proportions, total=total, empty=False)


def _coarse_frequencies(records: Sequence[RawRecord], mapping: EkmanMapping) -> dict[CoarseLabel, int]:
    """Corpus-wide coarse counts over all fine annotations (tie priors)."""
    counts = {label: 0 for label in CoarseLabel}
    for record in records:
        for fine_id in record.fine_label_ids:
            counts[mapping.map_id(fine_id)] += 1
    return counts


def _resolve_records(
    records: Sequence[RawRecord],
    mapping: EkmanMapping,
    tie_priors: Mapping[CoarseLabel, int],
    split_origin: str,
) -> list[Example]:
    out = []
    for record in records:
        text = record.text.strip()
        if not text:
            continue
        coarse = resolve_single_label(record.fine_label_ids, mapping, tie_priors)
        out.append(
            Example(
                text=record.text,
                fine_label_ids=record.fine_label_ids,
                coarse_label=coarse,
                split_origin=split_origin,
                example_id=record.example_id,
            )
        )
    return out


def build_corpus(
    train_path: str | Path,
    validation_path: str | Path,
    test_path: str | Path,
    mapping_path: str | Path | None = None,
    taxonomy: Taxonomy = DEFAULT_TAXONOMY,
) -> Corpus:
    """Load the three splits, resolve labels, and deduplicate each split.

    Tie priors for multi-label resolution come from the coarse-label
    frequencies of the training split, so resolution is reproducible from the
    data alone.
    """
    mapping = EkmanMapping.from_file(mapping_path, taxonomy) if mapping_path else default_mapping()
    raw_train = load_split(train_path, taxonomy)
    if not raw_train:
        raise CorpusError(f"training split {train_path} is empty")
    raw_validation = load_split(validation_path, taxonomy)
    raw_test = load_split(test_path, taxonomy)

    id_sets = [
        {record.example_id for record in records}
        for records in (raw_train, raw_validation, raw_test)
    ]
    for i in range(3):
        for j in range(i + 1, 3):
            overlap = id_sets[i] & id_sets[j]
            if overlap:
                sample = sorted(overlap)[:3]
                raise CorpusError(
                    f"splits share example ids (e.g. {sample}); splits must be disjoint"
                )

    tie_priors = _coarse_frequencies(raw_train, mapping)
    splits = {
        "train": _resolve_records(raw_train, mapping, tie_priors, "train"),
        "validation": _resolve_records(raw_validation, mapping, tie_priors, "validation"),
        "test": _resolve_records(raw_test, mapping, tie_priors, "test"),
    }
    return Corpus(
        train=deduplicate(splits["train"]),
        validation=deduplicate(splits["validation"]),
        test=deduplicate(splits["test"]),
        taxonomy=taxonomy,
        mapping=mapping,
        tie_priors=tie_priors,
    )


def distribution_report(corpus: Corpus) -> dict[str, dict[str, int]]:
    """Per-split class counts, the data behind the distribution figure."""
    return {
        name: class_distribution(corpus.split(name)).to_json_dict()
        for name in ("train", "validation", "test")
    }
