"""Substitute candidate generation.

Builds the masked query for a complex word (by default a sentence pair:
the original sentence plus a copy with the target masked, so predictions
see both the context and the word being replaced) and turns the
backend's predictions into a filtered candidate set.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .core import GenerationMode, PipelineConfig, TokenizedSentence, is_punctuation
from .mlm_backend import MASK, MlmBackend, MlmQuery
from .stemming import porter_stem


def is_morphological_derivation(a: str, b: str) -> bool:
    """True when the two words reduce to the same stem."""
    if not a or not b:
        raise ValueError("words must be non-empty")
    return porter_stem(a) == porter_stem(b)


@dataclass(frozen=True)
class Candidate:
    surface: str
    probability: float
    prediction_rank: int


@dataclass(frozen=True)
class CandidateSet:
    """Ordered substitute candidates for one complex word occurrence.

    filter_fallback is set by the frequency filter when every candidate
    fell below the Zipf floor and the unfiltered set was kept instead.
    """

    complex_word: str
    position: int
    candidates: tuple[Candidate, ...]
    filter_fallback: bool = field(default=False)

    def __post_init__(self) -> None:
        if self.position < 0:
            raise ValueError("position must be non-negative")
        if not self.complex_word:
            raise ValueError("complex_word must be non-empty")
        previous = 1.0
        for expected_rank, cand in enumerate(self.candidates, start=1):
            if cand.prediction_rank != expected_rank:
                raise ValueError(
                    f"prediction ranks must be 1..n without gaps; got "
                    f"{cand.prediction_rank} at slot {expected_rank}"
                )
            if not 0.0 < cand.probability <= 1.0:
                raise ValueError(f"probability {cand.probability} outside (0, 1]")
            if cand.probability > previous:
                raise ValueError("probabilities must be non-increasing")
            previous = cand.probability
            if cand.surface.lower() == self.complex_word.lower():
                raise ValueError(f"candidate {cand.surface!r} equals the complex word")
            if is_morphological_derivation(cand.surface, self.complex_word):
                raise ValueError(
                    f"candidate {cand.surface!r} is a derivation of "
                    f"{self.complex_word!r}"
                )

    def surfaces(self) -> list[str]:
        return [cand.surface for cand in self.candidates]

    def __len__(self) -> int:
        return len(self.candidates)

    def to_dict(self) -> dict:
        return {
            "complex_word": self.complex_word,
            "position": self.position,
            "filter_fallback": self.filter_fallback,
            "candidates": [
                {
                    "surface": cand.surface,
                    "probability": cand.probability,
                    "prediction_rank": cand.prediction_rank,
                }
                for cand in self.candidates
            ],
        }


def _context_rng(config: PipelineConfig, position: int) -> random.Random:
    # Per-call stream: independent of call order and of PYTHONHASHSEED.
    return random.Random(config.rng_seed * 1_000_003 + position * 7919)


def build_mask_input(
    sentence: TokenizedSentence, position: int, config: PipelineConfig
) -> MlmQuery:
    """Encode the generation query for the token at ``position``."""
    surfaces = sentence.surfaces()
    if not 0 <= position < len(surfaces):
        raise IndexError(f"position {position} out of range")
    if config.generation_mode is GenerationMode.SENTENCE_PAIR:
        segment_a = list(surfaces)
        if config.context_mask_prob > 0.0:
            rng = _context_rng(config, position)
            for i, surface in enumerate(segment_a):
                if i == position or is_punctuation(surface):
                    continue
                if rng.random() < config.context_mask_prob:
                    segment_a[i] = MASK
        segment_b = list(surfaces)
        segment_b[position] = MASK
        return MlmQuery(
            segment_a=tuple(segment_a),
            segment_b=tuple(segment_b),
            mask_position=(1, position),
        )
    segment = list(surfaces)
    if config.generation_mode is GenerationMode.SINGLE_MASKED:
        segment[position] = MASK
    return MlmQuery(
        segment_a=tuple(segment), segment_b=None, mask_position=(0, position)
    )


def generate_candidates(
    sentence: TokenizedSentence,
    position: int,
    config: PipelineConfig,
    backend: MlmBackend,
) -> CandidateSet:
    """Top-k whole-word substitutes for the token at ``position``,
    excluding the word itself and its morphological derivations."""
    complex_word = sentence.tokens[position].surface.lower()
    query = build_mask_input(sentence, position, config)
    # Over-fetch so exclusions do not eat into the requested k.
    fetch = max(2 * config.top_k, config.top_k + 10)
    prediction = backend.predict_masked(query, fetch)
    kept: list[Candidate] = []
    seen: set[str] = set()
    for surface, probability in prediction.entries:
        word = surface.lower()
        if word in seen:
            continue
        if word == complex_word or is_morphological_derivation(word, complex_word):
            continue
        seen.add(word)
        kept.append(
            Candidate(surface=word, probability=probability, prediction_rank=len(kept) + 1)
        )
        if len(kept) == config.top_k:
            break
    return CandidateSet(
        complex_word=complex_word, position=position, candidates=tuple(kept)
    )
