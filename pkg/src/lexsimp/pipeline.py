"""End-to-end sentence simplification.

Entities are protected once up front; then the loop repeatedly scores
the current sentence, picks the most complex remaining word, generates
and ranks substitutes, and replaces the word only when the winner is
more frequent or fits the context better than the original. Every
decision (accept or reject) retires its position, so the loop always
terminates within one pass over the tokens.
"""

from __future__ import annotations

import concurrent.futures
import logging
from dataclasses import dataclass

from .core import (
    PipelineConfig,
    SimplificationTrace,
    StepReason,
    TokenizedSentence,
    TraceStep,
    match_case,
    replace_token,
    tokenize,
)
from .cwi import (
    CapitalizationEntityRecognizer,
    ComplexityScorer,
    EntityRecognizer,
    FrequencyComplexityScorer,
    detect_entities,
    score_complexity,
    select_complex_words,
)
from .generation import generate_candidates
from .mlm_backend import MlmBackend
from .ranking import (
    FEATURES,
    aggregate,
    feature_bert_order,
    feature_frequency,
    feature_lm_loss,
    feature_ppdb,
    feature_similarity,
    filter_by_frequency,
)
from .resources import EmbeddingStore, FrequencyStore, ParaphraseStore, zipf

logger = logging.getLogger(__name__)


@dataclass
class Resources:
    """The knowledge sources the pipeline consults.

    Scorer and recognizer default to the frequency-based implementations
    when not supplied."""

    embeddings: EmbeddingStore
    frequency: FrequencyStore
    paraphrases: ParaphraseStore
    scorer: ComplexityScorer | None = None
    recognizer: EntityRecognizer | None = None

    def __post_init__(self) -> None:
        if self.scorer is None:
            self.scorer = FrequencyComplexityScorer(self.frequency)
        if self.recognizer is None:
            self.recognizer = CapitalizationEntityRecognizer(self.frequency)


@dataclass(frozen=True)
class SimplifiedResult:
    original: TokenizedSentence
    simplified: TokenizedSentence
    trace: SimplificationTrace
    iterations: int

    def __post_init__(self) -> None:
        if self.iterations > len(self.original.tokens):
            raise ValueError("iterations exceed the token count")

    def to_dict(self) -> dict:
        return {
            "original": self.original.text,
            "simplified": self.simplified.text,
            "iterations": self.iterations,
            "trace": self.trace.to_dict(),
        }


def _raw_feature_scores(
    sentence: TokenizedSentence,
    position: int,
    candidate_set,
    config: PipelineConfig,
    resources: Resources,
    backend: MlmBackend,
    features: tuple[str, ...],
) -> dict[str, list[float]]:
    word = candidate_set.complex_word
    surfaces = candidate_set.surfaces()
    n = len(surfaces)
    raw: dict[str, list[float]] = {}
    if "bert_order" in features:
        raw["bert_order"] = feature_bert_order(candidate_set)
    if "lm_loss" in features:
        raw["lm_loss"] = [
            feature_lm_loss(sentence, position, c, backend, config.lm_window)
            for c in surfaces
        ]
    if "similarity" in features:
        raw["similarity"] = [
            feature_similarity(word, c, resources.embeddings) for c in surfaces
        ]
    if "frequency" in features:
        raw["frequency"] = [
            feature_frequency(c, resources.frequency) for c in surfaces
        ]
    if "ppdb" in features:
        raw["ppdb"] = [
            feature_ppdb(word, c, resources.paraphrases, n) for c in surfaces
        ]
    return raw


def simplify_word(
    sentence: TokenizedSentence,
    position: int,
    config: PipelineConfig,
    resources: Resources,
    backend: MlmBackend,
    features: tuple[str, ...] = FEATURES,
    always_accept: bool = False,
) -> tuple[str | None, TraceStep]:
    """Decide a replacement for one token. Returns the accepted substitute
    (lowercased) or None, plus the trace step recording why."""
    original = sentence.tokens[position].surface
    candidate_set = generate_candidates(sentence, position, config, backend)
    if not candidate_set.candidates:
        step = TraceStep(
            position=position,
            original=original,
            candidates=candidate_set,
            ranking=None,
            chosen=None,
            accepted=False,
            reason=StepReason.NO_CANDIDATES,
        )
        return None, step
    candidate_set = filter_by_frequency(
        candidate_set, resources.frequency, config.zipf_filter_min
    )
    raw = _raw_feature_scores(
        sentence, position, candidate_set, config, resources, backend, features
    )
    table = aggregate(candidate_set.surfaces(), raw)
    top = table.best_candidate()

    accepted = always_accept
    if not accepted:
        # fre(top) > fre(w) or loss(top) < loss(w)
        if zipf(resources.frequency, top) > zipf(resources.frequency, original):
            accepted = True
        else:
            if "lm_loss" in raw:
                top_loss = raw["lm_loss"][table.best]
            else:
                top_loss = feature_lm_loss(
                    sentence, position, top, backend, config.lm_window
                )
            original_loss = feature_lm_loss(
                sentence, position, original, backend, config.lm_window
            )
            accepted = top_loss < original_loss
    step = TraceStep(
        position=position,
        original=original,
        candidates=candidate_set,
        ranking=table,
        chosen=top if accepted else None,
        accepted=accepted,
        reason=StepReason.REPLACED if accepted else StepReason.REJECTED_BY_CONDITION,
    )
    return (top if accepted else None), step


def simplify_sentence(
    text: str,
    config: PipelineConfig,
    resources: Resources,
    backend: MlmBackend,
    features: tuple[str, ...] = FEATURES,
    always_accept: bool = False,
) -> SimplifiedResult:
    original = tokenize(text)
    sentence = original
    ignore = detect_entities(sentence, resources.recognizer)
    steps: list[TraceStep] = []
    while True:
        annotation = score_complexity(
            sentence, resources.scorer, ignored=frozenset(ignore)
        )
        complex_positions = select_complex_words(
            annotation, config.complexity_threshold
        )
        if not complex_positions:
            break
        position = complex_positions[0]
        chosen, step = simplify_word(
            sentence,
            position,
            config,
            resources,
            backend,
            features=features,
            always_accept=always_accept,
        )
        steps.append(step)
        # Accepted or not, the position is settled; this is what bounds
        # the loop by the token count.
        ignore.add(position)
        if chosen is not None:
            replacement = match_case(step.original, chosen)
            sentence = replace_token(sentence, position, replacement)
    return SimplifiedResult(
        original=original,
        simplified=sentence,
        trace=SimplificationTrace(steps=tuple(steps)),
        iterations=len(steps),
    )


def simplify_batch(
    lines: list[str],
    config: PipelineConfig,
    resources: Resources,
    backend: MlmBackend,
    features: tuple[str, ...] = FEATURES,
    workers: int = 1,
    errors: list | None = None,
) -> list[SimplifiedResult]:
    """Order-preserving map of simplify_sentence over lines.

    A failing line yields an identity result (output = input, empty
    trace); the exception is logged and appended to ``errors`` when a
    list is supplied, so one bad line never sinks a corpus run."""

    def one(index_line: tuple[int, str]) -> SimplifiedResult:
        index, line = index_line
        try:
            return simplify_sentence(
                line, config, resources, backend, features=features
            )
        except Exception as exc:
            logger.warning("line %d failed: %s", index, exc)
            if errors is not None:
                errors.append((index, exc))
            passthrough = tokenize(line)
            return SimplifiedResult(
                original=passthrough,
                simplified=passthrough,
                trace=SimplificationTrace(),
                iterations=0,
            )

    items = list(enumerate(lines))
    if workers <= 1:
        return [one(item) for item in items]
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, items))
