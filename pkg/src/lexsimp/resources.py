"""Loaders for the three ranking knowledge sources: word vectors, word
frequencies on the Zipf scale, and paraphrase pairs."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)


class ResourceFormatError(ValueError):
    """Raised when a resource file cannot be parsed; carries the line number."""

    def __init__(self, path: str | Path, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no


@dataclass(frozen=True)
class EmbeddingStore:
    dimension: int
    vectors: dict[str, np.ndarray]

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.vectors

    def get(self, word: str) -> np.ndarray | None:
        return self.vectors.get(word.lower())


@dataclass(frozen=True)
class FrequencyStore:
    counts: dict[str, int]
    total_tokens: int

    def count(self, word: str) -> int:
        return self.counts.get(word.lower(), 0)

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.counts


@dataclass(frozen=True)
class ParaphraseStore:
    pairs: frozenset[tuple[str, str]]


def load_embeddings(path: str | Path) -> EmbeddingStore:
    """Parse a text vector file: optional "count dim" header, then one
    word followed by its space-separated float components per line.

    Duplicate words keep the last row (a warning is logged). Ragged or
    non-numeric rows raise ResourceFormatError with the line number.
    """
    vectors: dict[str, np.ndarray] = {}
    dimension = 0
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            parts = line.rstrip("\n").split(" ")
            parts = [p for p in parts if p]
            if not parts:
                continue
            if line_no == 1 and len(parts) == 2:
                try:
                    _, dimension = int(parts[0]), int(parts[1])
                    continue
                except ValueError:
                    pass  # not a header; fall through to data parsing
            word = parts[0].lower()
            try:
                vec = np.array([float(x) for x in parts[1:]], dtype=np.float64)
            except ValueError:
                raise ResourceFormatError(path, line_no, "non-numeric vector component")
            if dimension == 0:
                dimension = vec.size
            if vec.size != dimension:
                raise ResourceFormatError(
                    path, line_no, f"expected {dimension} components, got {vec.size}"
                )
            if word in vectors:
                logger.warning("duplicate embedding row for %r, keeping last", word)
            vectors[word] = vec
    return EmbeddingStore(dimension=dimension, vectors=vectors)


def cosine(store: EmbeddingStore, a: str, b: str) -> float:
    """Cosine similarity of two words; 0.0 when either is out of vocabulary
    or has a zero vector."""
    va, vb = store.get(a), store.get(b)
    if va is None or vb is None:
        logger.debug("cosine: OOV lookup (%r, %r)", a, b)
        return 0.0
    norm = float(np.linalg.norm(va) * np.linalg.norm(vb))
    if norm == 0.0:
        return 0.0
    return float(np.dot(va, vb) / norm)


def load_frequencies(path: str | Path) -> FrequencyStore:
    """Parse a TSV of "word<TAB>count" rows headed by "#total<TAB>N"."""
    counts: dict[str, int] = {}
    total = 0
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if line_no == 1:
                if len(fields) != 2 or fields[0] != "#total":
                    raise ResourceFormatError(
                        path, line_no, 'first line must be "#total<TAB>N"'
                    )
                try:
                    total = int(fields[1])
                except ValueError:
                    raise ResourceFormatError(path, line_no, "total is not an integer")
                if total <= 0:
                    raise ResourceFormatError(path, line_no, "total must be positive")
                continue
            if len(fields) != 2:
                raise ResourceFormatError(path, line_no, "expected word<TAB>count")
            try:
                count = int(fields[1])
            except ValueError:
                raise ResourceFormatError(path, line_no, "count is not an integer")
            if count < 0:
                raise ResourceFormatError(path, line_no, "count must be non-negative")
            if count > total:
                raise ResourceFormatError(path, line_no, "count exceeds total")
            counts[fields[0].lower()] = count
    if total == 0:
        raise ResourceFormatError(path, 1, 'missing "#total<TAB>N" header')
    return FrequencyStore(counts=counts, total_tokens=total)


def zipf(store: FrequencyStore, word: str) -> float:
    """Zipf value: base-10 log of occurrences per billion corpus tokens.
    Out-of-vocabulary words get 0.0."""
    count = store.count(word)
    if count < 1:
        return 0.0
    return math.log10(count / store.total_tokens * 1e9)


def _normalize_pair(a: str, b: str) -> tuple[str, str]:
    a, b = a.lower(), b.lower()
    return (a, b) if a <= b else (b, a)


def load_paraphrases(path: str | Path) -> ParaphraseStore:
    """Parse a TSV of "word_a<TAB>word_b" paraphrase pairs; membership is
    stored symmetrically."""
    pairs: set[tuple[str, str]] = set()
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 2 or not fields[0] or not fields[1]:
                raise ResourceFormatError(path, line_no, "expected word_a<TAB>word_b")
            pairs.add(_normalize_pair(fields[0], fields[1]))
    return ParaphraseStore(pairs=frozenset(pairs))


def contains_pair(store: ParaphraseStore, a: str, b: str) -> bool:
    return _normalize_pair(a, b) in store.pairs
