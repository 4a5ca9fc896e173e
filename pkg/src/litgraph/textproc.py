"""Deterministic text processing: cleaning, keyword extraction, classification.

Replaces the pipeline's NLP stage with reproducible rules: text is
cleaned against a versioned stopword list, related keywords are scored
with degree/frequency co-occurrence statistics (RAKE-style), and the
field of application is chosen by weighted indicator phrases from a
taxonomy.  All of it sits behind :class:`Enricher` so a learned model
can be swapped in without touching downstream contracts.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Protocol, Sequence

from .acquisition import PublicationRecord

_SENTENCE_ENDS = frozenset(".!?")


def _load_default_stopwords() -> frozenset[str]:
    text = (
        resources.files("litgraph").joinpath("data/stopwords.txt").read_text("utf-8")
    )
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


STOPWORDS: frozenset[str] = _load_default_stopwords()


@dataclass(frozen=True)
class CleanedText:
    """Cleaned token stream.

    ``sentence_breaks`` are indices where a new sentence starts (a
    ``. ! ?`` fell just before that token).  ``phrase_breaks`` is the
    superset of positions a candidate keyword may not span: sentence
    breaks plus every position where a stopword or letterless token was
    removed.
    """

    tokens: tuple[str, ...] = ()
    sentence_breaks: tuple[int, ...] = ()
    phrase_breaks: tuple[int, ...] = ()

    def joined(self) -> str:
        return " ".join(self.tokens)


def clean_text(text: str, stopwords: frozenset[str] = STOPWORDS) -> CleanedText:
    """Lowercase, strip excluded characters, and drop stopwords.

    Excluded characters (anything that is not alphanumeric, whitespace,
    or an intra-word hyphen) are deleted in place; only whitespace
    separates tokens.  Tokens without any letter (bare numbers, stripped
    math) are dropped.  Sentence boundaries at ``. ! ?`` are recorded
    before stripping.  Cleaning its own output is a no-op.
    """
    text = text.lower()
    tokens: list[str] = []
    sentence_breaks: set[int] = set()
    phrase_breaks: set[int] = set()
    buf: list[str] = []
    n = len(text)

    def flush():
        if not buf:
            return
        token = "".join(buf)
        buf.clear()
        if not any(c.isalpha() for c in token) or token in stopwords:
            phrase_breaks.add(len(tokens))
            return
        tokens.append(token)

    for i, ch in enumerate(text):
        if ch.isalnum():
            buf.append(ch)
        elif ch == "-" and 0 < i < n - 1 and text[i - 1].isalnum() and text[i + 1].isalnum():
            buf.append(ch)
        elif ch in _SENTENCE_ENDS:
            flush()
            sentence_breaks.add(len(tokens))
            phrase_breaks.add(len(tokens))
        elif ch.isspace():
            flush()
        # any other character is stripped in place
    flush()

    inner = lambda breaks: tuple(sorted(b for b in breaks if 0 < b < len(tokens)))
    return CleanedText(tuple(tokens), inner(sentence_breaks), inner(phrase_breaks))


def clean_parts(parts: Sequence[str], stopwords: frozenset[str] = STOPWORDS) -> CleanedText:
    """Clean each part separately and concatenate with breaks at the seams."""
    tokens: list[str] = []
    sentence_breaks: set[int] = set()
    phrase_breaks: set[int] = set()
    for part in parts:
        cleaned = clean_text(part, stopwords)
        if tokens and cleaned.tokens:
            sentence_breaks.add(len(tokens))
            phrase_breaks.add(len(tokens))
        offset = len(tokens)
        tokens.extend(cleaned.tokens)
        sentence_breaks.update(offset + b for b in cleaned.sentence_breaks)
        phrase_breaks.update(offset + b for b in cleaned.phrase_breaks)
    return CleanedText(
        tuple(tokens), tuple(sorted(sentence_breaks)), tuple(sorted(phrase_breaks))
    )


@dataclass(frozen=True)
class ScoredPhrase:
    phrase: str
    score: float


def _candidate_runs(cleaned: CleanedText) -> list[tuple[str, ...]]:
    runs: list[tuple[str, ...]] = []
    bounds = [0, *cleaned.phrase_breaks, len(cleaned.tokens)]
    for start, end in zip(bounds, bounds[1:]):
        if end > start:
            runs.append(cleaned.tokens[start:end])
    return runs


def extract_keywords(cleaned: CleanedText, k: int) -> list[ScoredPhrase]:
    """Top-k candidate phrases by summed degree/frequency word scores.

    Candidates are maximal token runs between phrase breaks; each member
    word contributes degree(word)/frequency(word) computed over the
    document's own candidate set.  Ties break lexicographically.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    runs = _candidate_runs(cleaned)
    if not runs:
        return []
    freq: Counter[str] = Counter()
    degree: Counter[str] = Counter()
    for run in runs:
        for word in run:
            freq[word] += 1
            degree[word] += len(run)
    scores: dict[str, float] = {}
    for run in runs:
        phrase = " ".join(run)
        if phrase not in scores:
            scores[phrase] = sum(degree[w] / freq[w] for w in run)
    ranked = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
    return [ScoredPhrase(phrase, score) for phrase, score in ranked[:k]]


# --- taxonomy and classification ---


class TaxonomyError(ValueError):
    """Base class for taxonomy file problems."""


class TaxonomyParseError(TaxonomyError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


class DuplicateLabelError(TaxonomyError):
    def __init__(self, label: str):
        super().__init__(f"duplicate taxonomy label: {label!r}")
        self.label = label


class NonPositiveWeightError(TaxonomyError):
    def __init__(self, label: str, phrase: str, weight: float):
        super().__init__(
            f"indicator weight must be > 0: {label!r}/{phrase!r} has {weight}"
        )
        self.label = label
        self.phrase = phrase
        self.weight = weight


@dataclass(frozen=True)
class Indicator:
    phrase: str
    weight: float


@dataclass(frozen=True)
class TaxonomyField:
    label: str
    indicators: tuple[Indicator, ...]


DEFAULT_LABEL = "unclassified"


@dataclass(frozen=True)
class Taxonomy:
    """Field-of-application labels with weighted indicator phrases."""

    fields: tuple[TaxonomyField, ...] = ()
    default_label: str = DEFAULT_LABEL

    def __post_init__(self):
        seen = set()
        for fld in self.fields:
            if fld.label in seen:
                raise DuplicateLabelError(fld.label)
            seen.add(fld.label)
            for ind in fld.indicators:
                if not ind.phrase.strip():
                    raise TaxonomyError(f"empty indicator phrase under {fld.label!r}")
                if ind.weight <= 0:
                    raise NonPositiveWeightError(fld.label, ind.phrase, ind.weight)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(fld.label for fld in self.fields)


def load_taxonomy(path: str | Path) -> Taxonomy:
    """Load a taxonomy from its JSON file.

    Schema: ``{"default_label": str?, "fields": [{"label": str,
    "indicators": [{"phrase": str, "weight": number}, ...]}, ...]}``.
    """
    raw_text = Path(path).read_text("utf-8")
    try:
        data = json.loads(raw_text)
    except json.JSONDecodeError as exc:
        raise TaxonomyParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
    if not isinstance(data, dict) or not isinstance(data.get("fields"), list):
        raise TaxonomyParseError("taxonomy must be an object with a 'fields' list")
    fields = []
    for entry in data["fields"]:
        if not isinstance(entry, dict) or "label" not in entry:
            raise TaxonomyParseError(f"malformed field entry: {entry!r}")
        indicators = tuple(
            Indicator(str(ind["phrase"]), float(ind["weight"]))
            for ind in entry.get("indicators", [])
        )
        fields.append(TaxonomyField(str(entry["label"]), indicators))
    return Taxonomy(tuple(fields), str(data.get("default_label", DEFAULT_LABEL)))


@dataclass(frozen=True)
class FieldAssignment:
    label: str
    score: float


def _count_occurrences(haystack: tuple[str, ...], needle: tuple[str, ...]) -> int:
    if not needle or len(needle) > len(haystack):
        return 0
    return sum(
        1
        for i in range(len(haystack) - len(needle) + 1)
        if haystack[i : i + len(needle)] == needle
    )


def classify_field(
    record: PublicationRecord,
    taxonomy: Taxonomy,
    stopwords: frozenset[str] = STOPWORDS,
) -> FieldAssignment:
    """Assign the field whose indicators occur most, weighted.

    Indicator phrases are cleaned with the same rules as the document,
    then counted over the cleaned title, abstract, and each keyword
    (occurrences never span those units).  Score is sum of
    weight x count; ties go to the lexicographically smallest label and
    an all-zero score yields the taxonomy's default label.
    """
    units = [
        clean_text(record.title, stopwords).tokens,
        clean_text(record.abstract, stopwords).tokens,
        *(clean_text(kw, stopwords).tokens for kw in record.keywords),
    ]
    scores: dict[str, float] = {}
    for fld in taxonomy.fields:
        total = 0.0
        for ind in fld.indicators:
            needle = clean_text(ind.phrase, stopwords).tokens
            count = sum(_count_occurrences(unit, needle) for unit in units)
            total += ind.weight * count
        scores[fld.label] = total
    if not scores:
        return FieldAssignment(taxonomy.default_label, 0.0)
    best_label = min(scores, key=lambda lbl: (-scores[lbl], lbl))
    if scores[best_label] == 0.0:
        return FieldAssignment(taxonomy.default_label, 0.0)
    return FieldAssignment(best_label, scores[best_label])


# --- enrichment ---


@dataclass(frozen=True)
class Enrichment:
    """Per-publication output of the text stage."""

    related_keywords: tuple[ScoredPhrase, ...]
    field_label: str
    field_score: float = 0.0


class Enricher(Protocol):
    """Anything that turns a record into an Enrichment."""

    def enrich(self, record: PublicationRecord) -> Enrichment: ...


@dataclass(frozen=True)
class KeywordTaxonomyEnricher:
    """The deterministic default: RAKE-style keywords + taxonomy labels."""

    taxonomy: Taxonomy = field(default_factory=Taxonomy)
    top_k: int = 5
    stopwords: frozenset[str] = STOPWORDS

    def enrich(self, record: PublicationRecord) -> Enrichment:
        cleaned = clean_parts(
            [record.title, record.abstract, *record.keywords], self.stopwords
        )
        keywords = extract_keywords(cleaned, self.top_k)
        assignment = classify_field(record, self.taxonomy, self.stopwords)
        return Enrichment(tuple(keywords), assignment.label, assignment.score)
