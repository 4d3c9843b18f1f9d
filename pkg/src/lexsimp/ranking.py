"""Substitute ranking: frequency filter, five feature scores, and
rank-average aggregation.

Each feature scores every candidate, scores become ranks (ties get the
mean of the positions they straddle), and the candidate with the lowest
average rank wins. The paraphrase-database feature is special: its rule
already produces a rank, so it skips the score-to-rank conversion.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Mapping, Sequence

from .core import TokenizedSentence
from .generation import Candidate, CandidateSet
from .mlm_backend import MlmBackend
from .resources import (
    EmbeddingStore,
    FrequencyStore,
    ParaphraseStore,
    contains_pair,
    cosine,
    zipf,
)

#: Feature names in canonical order; "higher" marks features where a
#: larger raw score is better.
FEATURES = ("bert_order", "lm_loss", "similarity", "frequency", "ppdb")
_HIGHER_IS_BETTER = {"bert_order": False, "lm_loss": False, "similarity": True,
                     "frequency": True, "ppdb": False}
#: ppdb raw values are used as ranks directly instead of being re-ranked.
_RULE_RANKED = frozenset({"ppdb"})


def filter_by_frequency(
    candidates: CandidateSet, store: FrequencyStore, min_zipf: float
) -> CandidateSet:
    """Drop candidates whose Zipf frequency falls below ``min_zipf``.

    If that would drop everything, the input set is returned unchanged
    with filter_fallback set, so the caller still has candidates."""
    kept = [c for c in candidates.candidates if zipf(store, c.surface) >= min_zipf]
    if not kept and candidates.candidates:
        return dataclasses.replace(candidates, filter_fallback=True)
    renumbered = tuple(
        Candidate(surface=c.surface, probability=c.probability, prediction_rank=i + 1)
        for i, c in enumerate(kept)
    )
    return dataclasses.replace(candidates, candidates=renumbered)


def feature_bert_order(candidates: CandidateSet) -> list[float]:
    return [float(c.prediction_rank) for c in candidates.candidates]


def feature_lm_loss(
    sentence: TokenizedSentence,
    position: int,
    candidate: str,
    backend: MlmBackend,
    window: int,
) -> float:
    """Mean masked-LM cross-entropy over a window around ``position``
    with ``candidate`` substituted in. Lower means the substitute fits
    the context better. Passing the original word gives the baseline the
    acceptance condition compares against."""
    if window < 1:
        raise ValueError("window must be >= 1")
    surfaces = sentence.surfaces()
    if not 0 <= position < len(surfaces):
        raise IndexError(f"position {position} out of range")
    lo = max(0, position - window)
    hi = min(len(surfaces), position + window + 1)
    segment = surfaces[lo:hi]
    segment[position - lo] = candidate
    losses = [
        backend.token_loss(segment, j, segment[j]) for j in range(len(segment))
    ]
    return sum(losses) / len(losses)


def feature_similarity(
    complex_word: str, candidate: str, embeddings: EmbeddingStore
) -> float:
    return cosine(embeddings, complex_word, candidate)


def feature_frequency(candidate: str, store: FrequencyStore) -> float:
    return zipf(store, candidate)


def feature_ppdb(
    complex_word: str, candidate: str, store: ParaphraseStore, n: int
) -> float:
    """Rule-assigned rank: 1 when the pair is a known paraphrase, n/3
    otherwise (floored at 1 so tiny candidate sets stay sensible)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if contains_pair(store, complex_word, candidate):
        return 1.0
    return max(1.0, n / 3)


def mean_ranks(scores: Sequence[float], higher_is_better: bool) -> list[float]:
    """Competition-style ranks with ties averaged: 1 + the number of
    strictly better scores + half the number of equal ones."""
    ranks = []
    for i, score in enumerate(scores):
        better = 0
        equal = 0
        for j, other in enumerate(scores):
            if j == i:
                continue
            if other == score:
                equal += 1
            elif (other > score) if higher_is_better else (other < score):
                better += 1
        ranks.append(1.0 + better + equal / 2.0)
    return ranks


@dataclass(frozen=True)
class RankingTable:
    """Per-feature raw scores and ranks plus the aggregated outcome."""

    candidates: tuple[str, ...]
    features: dict[str, tuple[tuple[float, ...], tuple[float, ...]]]
    average_rank: tuple[float, ...]
    best: int

    def best_candidate(self) -> str:
        return self.candidates[self.best]

    def to_dict(self) -> dict:
        return {
            "candidates": list(self.candidates),
            "features": {
                name: {"raw": list(raw), "ranks": list(ranks)}
                for name, (raw, ranks) in self.features.items()
            },
            "average_rank": list(self.average_rank),
            "best": self.best,
        }


def aggregate(
    candidates: Sequence[str], raw_scores: Mapping[str, Sequence[float]]
) -> RankingTable:
    """Combine per-feature scores into one ranking by averaging ranks.

    ``raw_scores`` holds one score list per enabled feature; disabled
    features are simply absent. Best is the argmin of the average rank,
    ties broken by the model-prediction-order rank, then alphabetically.
    """
    if not candidates:
        raise ValueError("cannot rank an empty candidate list")
    unknown = set(raw_scores) - set(FEATURES)
    if unknown:
        raise ValueError(f"unknown features: {sorted(unknown)}")
    if not raw_scores:
        raise ValueError("at least one feature must be enabled")
    features: dict[str, tuple[tuple[float, ...], tuple[float, ...]]] = {}
    for name in FEATURES:
        if name not in raw_scores:
            continue
        scores = [float(s) for s in raw_scores[name]]
        if len(scores) != len(candidates):
            raise ValueError(f"feature {name} has {len(scores)} scores for "
                             f"{len(candidates)} candidates")
        if name in _RULE_RANKED:
            ranks = list(scores)
        else:
            ranks = mean_ranks(scores, _HIGHER_IS_BETTER[name])
        features[name] = (tuple(scores), tuple(ranks))
    count = len(features)
    average = [
        sum(ranks[i] for _, ranks in features.values()) / count
        for i in range(len(candidates))
    ]

    def sort_key(i: int):
        bert_rank = features["bert_order"][1][i] if "bert_order" in features else 0.0
        return (average[i], bert_rank, candidates[i])

    best = min(range(len(candidates)), key=sort_key)
    return RankingTable(
        candidates=tuple(candidates),
        features=features,
        average_rank=tuple(average),
        best=best,
    )
