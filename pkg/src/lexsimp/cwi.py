"""Complex word identification: per-token complexity scores, threshold
selection, and the ignore list (named entities, already-simplified words)."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Protocol

from .core import TokenizedSentence, is_numeric, is_punctuation
from .resources import FrequencyStore, zipf

logger = logging.getLogger(__name__)

_TERMINAL_PUNCT = {".", "!", "?"}


@dataclass(frozen=True)
class ComplexityAnnotation:
    """One complexity score per token plus the positions exempt from
    simplification."""

    scores: tuple[float, ...]
    ignored: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if any(not 0.0 <= s <= 1.0 for s in self.scores):
            raise ValueError("complexity scores must lie in [0, 1]")
        if any(i < 0 or i >= len(self.scores) for i in self.ignored):
            raise ValueError("ignored index out of range")


class ComplexityScorer(Protocol):
    def score(self, sentence: TokenizedSentence) -> list[float]:
        """Return one raw complexity score per token."""
        ...


class FrequencyComplexityScorer:
    """Default scorer: p = clamp(1 - zipf(word)/7, 0, 1).

    The Zipf scale spans roughly [0, 7], so rare words approach 1 and
    ubiquitous words approach 0; out-of-vocabulary words score 1.0.
    """

    def __init__(self, frequency: FrequencyStore):
        self.frequency = frequency

    def score(self, sentence: TokenizedSentence) -> list[float]:
        return [
            min(1.0, max(0.0, 1.0 - zipf(self.frequency, tok.surface) / 7.0))
            for tok in sentence.tokens
        ]


class EntityRecognizer(Protocol):
    def spans(self, tokens: list[str]) -> list[tuple[int, int]]:
        """Return entity spans as (start, end) index pairs, end exclusive."""
        ...


def _is_title_cased(surface: str) -> bool:
    return surface[:1].isupper() and (len(surface) == 1 or surface[1:].islower())


class CapitalizationEntityRecognizer:
    """Heuristic recognizer keeping tests offline.

    A title-cased token that is not sentence-initial is an entity. A
    sentence-initial title-cased token is an entity unless it can be shown
    to be a common word: its lowercase form occurs elsewhere in the token
    list, or a frequency store says it is frequent (zipf >= common_zipf).
    Reappearing title-cased elsewhere marks it an entity regardless.
    """

    def __init__(
        self, frequency: FrequencyStore | None = None, common_zipf: float = 4.0
    ):
        self.frequency = frequency
        self.common_zipf = common_zipf

    def spans(self, tokens: list[str]) -> list[tuple[int, int]]:
        initial = self._sentence_initial_indices(tokens)
        flags = [self._is_entity(tokens, i, i in initial) for i in range(len(tokens))]
        spans: list[tuple[int, int]] = []
        i = 0
        while i < len(flags):
            if flags[i]:
                j = i
                while j + 1 < len(flags) and flags[j + 1]:
                    j += 1
                spans.append((i, j + 1))
                i = j + 1
            else:
                i += 1
        return spans

    @staticmethod
    def _sentence_initial_indices(tokens: list[str]) -> set[int]:
        initial = set()
        expect_start = True
        for i, tok in enumerate(tokens):
            if is_punctuation(tok):
                if tok in _TERMINAL_PUNCT:
                    expect_start = True
                continue
            if expect_start:
                initial.add(i)
                expect_start = False
        return initial

    def _is_entity(self, tokens: list[str], i: int, sentence_initial: bool) -> bool:
        surface = tokens[i]
        if not _is_title_cased(surface) or is_punctuation(surface):
            return False
        if not sentence_initial:
            return True
        for j, other in enumerate(tokens):
            if j == i:
                continue
            if other == surface:
                return True
            if other == surface.lower():
                return False
        if self.frequency is not None:
            return zipf(self.frequency, surface) < self.common_zipf
        return True


def score_complexity(
    sentence: TokenizedSentence,
    scorer: ComplexityScorer,
    ignored: frozenset[int] = frozenset(),
) -> ComplexityAnnotation:
    """Run the scorer and normalize its output: clamp to [0, 1] and force
    punctuation and numeric tokens to 0 (they are never targets)."""
    raw = scorer.score(sentence)
    if len(raw) != len(sentence.tokens):
        raise ValueError("scorer must return one score per token")
    scores = []
    for tok, value in zip(sentence.tokens, raw):
        if is_punctuation(tok.surface) or is_numeric(tok.surface):
            scores.append(0.0)
        else:
            scores.append(min(1.0, max(0.0, float(value))))
    return ComplexityAnnotation(scores=tuple(scores), ignored=ignored)


def select_complex_words(
    annotation: ComplexityAnnotation, threshold: float
) -> list[int]:
    """Indices scoring strictly above the threshold and not ignored, most
    complex first; ties go to the leftmost position."""
    eligible = [
        (score, i)
        for i, score in enumerate(annotation.scores)
        if score > threshold and i not in annotation.ignored
    ]
    eligible.sort(key=lambda pair: (-pair[0], pair[1]))
    return [i for _, i in eligible]


def detect_entities(
    sentence: TokenizedSentence, recognizer: EntityRecognizer
) -> set[int]:
    """Flatten the recognizer's spans into a set of protected token indices.
    Recognizer failures degrade to an empty set with a warning."""
    try:
        spans = recognizer.spans(sentence.surfaces())
    except Exception:
        logger.warning(
            "entity recognizer failed; simplification proceeds without "
            "entity protection",
            exc_info=True,
        )
        return set()
    indices: set[int] = set()
    for start, end in spans:
        for i in range(start, end):
            if 0 <= i < len(sentence.tokens):
                indices.add(i)
    return indices
