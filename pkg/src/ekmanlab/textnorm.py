"""Text normalization for the two dataset variants.

The raw variant only applies Unicode NFC normalization and whitespace
cleanup.  The full variant runs the complete cleaning pipeline used for the
feature-based models: lowercasing, emoji-to-text conversion, contraction and
abbreviation expansion, repeated-letter condensing, punctuation spacing,
rule-based lemmatization and stopword removal.

Stage order in :func:`normalize_full` is fixed; every stage feeds the next.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources as importlib_resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

# Words that flip emotional polarity; they must never appear in a stopword
# list used by this pipeline.
NEGATIONS = frozenset({"no", "not", "never", "nor", "none"})

# Punctuation kept (and spaced) by the full pipeline; everything else that is
# neither a word character nor whitespace is dropped as extraneous.
RETAINED_PUNCTUATION = ".,!?"

DEFAULT_REPEAT_CAP = 2

_VOWELS = "aeiou"

# Codepoint ranges treated as emoji-like for the "unmatched emoji are
# dropped" policy of emoji_to_text.
_EMOJI_RANGES = (
    (0x1F000, 0x1FAFF),  # pictographs, emoticons, symbols, flags
    (0x2600, 0x27BF),    # misc symbols and dingbats
    (0x2B00, 0x2BFF),    # misc symbols and arrows (stars)
    (0xFE00, 0xFE0F),    # variation selectors
    (0x200D, 0x200D),    # zero-width joiner
    (0x20E3, 0x20E3),    # combining keycap
    (0xE0020, 0xE007F),  # tag characters
)


class ResourceError(Exception):
    """A normalization resource file failed validation."""


@dataclass(frozen=True)
class NormResources:
    """Lexicons backing the full normalization pipeline."""

    emoji_lexicon: Mapping[str, str]
    contractions: Mapping[str, str]
    abbreviations: Mapping[str, str]
    stopwords: frozenset[str]
    lemma_exceptions: Mapping[str, str]

    def __post_init__(self):
        bad = self.stopwords & NEGATIONS
        if bad:
            raise ResourceError(f"stopword list contains negations: {sorted(bad)}")
        for name, table in (
            ("emoji_lexicon", self.emoji_lexicon),
            ("contractions", self.contractions),
            ("abbreviations", self.abbreviations),
            ("lemma_exceptions", self.lemma_exceptions),
        ):
            for value in table.values():
                if value != value.lower():
                    raise ResourceError(f"{name} value {value!r} is not lowercase")


@dataclass(frozen=True)
class TokenizedDoc:
    tokens: tuple[str, ...]
    source_mode: str  # "raw" | "full"

    @property
    def is_empty(self) -> bool:
        return not self.tokens


def _read_json(path) -> dict:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise ResourceError(f"{path} must hold a JSON object")
    return raw


def _read_lines(path) -> frozenset[str]:
    words = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        word = line.strip()
        if word and not word.startswith("#"):
            words.append(word)
    return frozenset(words)


def load_resources(
    emoji_path=None,
    contractions_path=None,
    abbreviations_path=None,
    stopwords_path=None,
    lemma_exceptions_path=None,
) -> NormResources:
    """Load resources, falling back to the packaged defaults per file."""
    pkg = importlib_resources.files("ekmanlab.resources")

    def pick(path, default_name):
        return Path(path) if path is not None else pkg / default_name

    return NormResources(
        emoji_lexicon=_read_json(pick(emoji_path, "emoji.json")),
        contractions=_read_json(pick(contractions_path, "contractions.json")),
        abbreviations=_read_json(pick(abbreviations_path, "abbreviations.json")),
        stopwords=_read_lines(pick(stopwords_path, "stopwords.txt")),
        lemma_exceptions=_read_json(pick(lemma_exceptions_path, "lemma_exceptions.json")),
    )


def load_default_resources() -> NormResources:
    return load_resources()


# ---------------------------------------------------------------------------
# Pipeline stages
# ---------------------------------------------------------------------------

_WS_RE = re.compile(r"\s+")


def normalize_minimal(text: str) -> str:
    """NFC normalization, whitespace collapse and trim; nothing else."""
    return _WS_RE.sub(" ", unicodedata.normalize("NFC", text)).strip()


def _is_emoji_char(ch: str) -> bool:
    cp = ord(ch)
    for lo, hi in _EMOJI_RANGES:
        if lo <= cp <= hi:
            return True
    return False


@lru_cache(maxsize=8)
def _emoji_index(items: tuple[tuple[str, str], ...]) -> dict[str, list[str]]:
    """Lexicon keys grouped by first character, longest key first."""
    index: dict[str, list[str]] = {}
    for key, _ in items:
        if key:
            index.setdefault(key[0], []).append(key)
    for keys in index.values():
        keys.sort(key=len, reverse=True)
    return index


def emoji_to_text(text: str, emoji_lexicon: Mapping[str, str]) -> str:
    """Replace emoji with descriptive text, longest match first.

    Emoji-range characters without a lexicon entry are dropped.
    """
    items = tuple(sorted(emoji_lexicon.items()))
    index = _emoji_index(items)
    lexicon = dict(items)
    out: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        matched = None
        for key in index.get(ch, ()):
            if text.startswith(key, i):
                matched = key
                break
        if matched is not None:
            out.append(f" {lexicon[matched]} ")
            i += len(matched)
        elif _is_emoji_char(ch):
            out.append(" ")
            i += 1
        else:
            out.append(ch)
            i += 1
    return _WS_RE.sub(" ", "".join(out)).strip()


@lru_cache(maxsize=8)
def _table_pattern(keys: tuple[str, ...]) -> re.Pattern:
    """Whole-token alternation: keys must not touch adjacent word characters
    or apostrophes, so substrings and possessives never match."""
    alternation = "|".join(re.escape(k) for k in sorted(keys, key=len, reverse=True))
    return re.compile(rf"(?<![\w'])(?:{alternation})(?![\w'])")


def _replace_tokens(text: str, table: Mapping[str, str]) -> str:
    if not table:
        return text
    pattern = _table_pattern(tuple(sorted(table)))
    return pattern.sub(lambda m: table[m.group(0)], text)


def expand_contractions(text: str, contractions: Mapping[str, str]) -> str:
    """Expand contractions at token boundaries; expects lowercased text."""
    return _replace_tokens(text, contractions)


def expand_abbreviations(text: str, abbreviations: Mapping[str, str]) -> str:
    """Expand slang abbreviations as whole tokens; expects lowercased text."""
    return _replace_tokens(text, abbreviations)


@lru_cache(maxsize=8)
def _repeat_pattern(cap: int) -> re.Pattern:
    # A letter followed by >= cap copies of itself; digits and punctuation
    # are exempt.
    return re.compile(rf"([^\W\d_])\1{{{cap},}}", re.UNICODE)


def condense_repeats(text: str, cap: int = DEFAULT_REPEAT_CAP) -> str:
    """Shorten letter runs longer than ``cap`` to exactly ``cap``."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    return _repeat_pattern(cap).sub(lambda m: m.group(1) * cap, text)


def space_punctuation(text: str) -> str:
    """Space retained punctuation (. , ! ?); drop other symbols."""
    out = []
    for ch in text:
        if ch in RETAINED_PUNCTUATION:
            out.append(f" {ch} ")
        elif ch.isalnum() or ch.isspace():
            out.append(ch)
        else:
            out.append(" ")
    return _WS_RE.sub(" ", "".join(out)).strip()


def _is_vowel(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return True
    # y acts as a vowel after a consonant ("try", "crying")
    return ch == "y" and i > 0 and not _is_vowel(word, i - 1)


def _measure(word: str) -> int:
    """Number of vowel-consonant sequences (Porter's m)."""
    seq = []
    for i in range(len(word)):
        tag = "v" if _is_vowel(word, i) else "c"
        if not seq or seq[-1] != tag:
            seq.append(tag)
    return "".join(seq).count("vc")


def _ends_cvc(word: str) -> bool:
    if len(word) < 3:
        return False
    return (
        not _is_vowel(word, len(word) - 3)
        and _is_vowel(word, len(word) - 2)
        and not _is_vowel(word, len(word) - 1)
        and word[-1] not in "wxy"
    )


# Doubled finals undone after stripping -ing/-ed ("stopp" -> "stop").
# Letters that legitimately end words doubled (ll, ss, ff, zz, ee, oo)
# are excluded.
_UNDOUBLE = "bdgkmnprt"


def _fix_stripped_base(base: str) -> str:
    if len(base) >= 3 and base[-1] == base[-2] and base[-1] in _UNDOUBLE:
        return base[:-1]
    if _measure(base) == 1 and _ends_cvc(base):
        return base + "e"
    return base


def _lemmatize_once(token: str, exceptions: Mapping[str, str]) -> str:
    if token in exceptions:
        return exceptions[token]
    if len(token) <= 2:
        return token
    # plurals
    if token.endswith("ies"):
        if len(token) > 4:
            return token[:-3] + "y"
        return token[:-1]
    if token.endswith(("sses", "zzes")):
        return token[:-2]
    if token.endswith(("ches", "shes", "xes")):
        return token[:-2]
    if token.endswith("s") and not token.endswith(("ss", "us", "is")) and len(token) > 3:
        return token[:-1]
    # progressive
    if token.endswith("ing") and len(token) >= 6:
        return _fix_stripped_base(token[:-3])
    # past tense
    if token.endswith("ied") and len(token) > 4:
        return token[:-3] + "y"
    if token.endswith("eed"):
        return token[:-1] if len(token) > 4 else token
    if token.endswith("ed") and len(token) > 4:
        return _fix_stripped_base(token[:-2])
    return token


def lemmatize(token: str, lemma_exceptions: Mapping[str, str]) -> str:
    """Reduce a lowercase token to a base form.

    The exception table wins over the suffix rules; rules are applied to a
    fixpoint so the operation is idempotent.  Never returns an empty string.
    """
    current = token
    for _ in range(5):
        step = _lemmatize_once(current, lemma_exceptions)
        if step == current or not step:
            break
        current = step
    return current if current else token


def remove_stopwords(tokens: Iterable[str], stopwords: frozenset[str] | set[str]) -> list[str]:
    """Order-preserving stopword filter."""
    return [t for t in tokens if t not in stopwords]


def tokenize(text: str) -> list[str]:
    """Whitespace tokenization; never yields empty tokens."""
    return text.split()


def tokenize_raw(text: str, lowercase: bool = True) -> TokenizedDoc:
    """Raw-mode tokenization: minimal normalization, then whitespace split.

    Tokens are lowercased so both modes feed case-insensitive vocabularies;
    the minimal string normalization itself preserves case.
    """
    tokens = tokenize(normalize_minimal(text))
    if lowercase:
        tokens = [t.lower() for t in tokens]
    return TokenizedDoc(tokens=tuple(tokens), source_mode="raw")


def normalize_full(
    text: str,
    resources: NormResources,
    repeat_cap: int = DEFAULT_REPEAT_CAP,
) -> TokenizedDoc:
    """Run the complete normalization pipeline on one text.

    Stage order: minimal normalization, lowercase, emoji to text, contraction
    expansion, abbreviation expansion, repeat condensing, punctuation spacing,
    tokenization, per-token lemmatization, stopword removal.  An empty result
    is legal; check :attr:`TokenizedDoc.is_empty`.
    """
    s = normalize_minimal(text)
    s = s.lower()
    s = emoji_to_text(s, resources.emoji_lexicon)
    s = expand_contractions(s, resources.contractions)
    s = expand_abbreviations(s, resources.abbreviations)
    s = condense_repeats(s, repeat_cap)
    s = space_punctuation(s)
    tokens = [lemmatize(t, resources.lemma_exceptions) for t in tokenize(s)]
    tokens = remove_stopwords(tokens, resources.stopwords)
    return TokenizedDoc(tokens=tuple(tokens), source_mode="full")


def normalize_corpus(
    texts: Sequence[str],
    resources: NormResources,
    mode: str = "full",
    repeat_cap: int = DEFAULT_REPEAT_CAP,
) -> list[TokenizedDoc]:
    """Normalize many texts in one mode."""
    if mode == "full":
        return [normalize_full(t, resources, repeat_cap) for t in texts]
    if mode == "raw":
        return [tokenize_raw(t) for t in texts]
    raise ValueError(f"unknown mode: {mode!r}")
