"""Masked language model abstraction.

Two implementations of the same narrow interface: a deterministic mock
driven by a lookup table (for offline tests) and an adapter around a
pretrained transformer encoder.
"""

from __future__ import annotations

import json
import logging
import math
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

logger = logging.getLogger(__name__)

MASK = "[MASK]"

#: Fallback vocabulary the mock answers unconfigured queries with.
TOY_VOCABULARY = (
    "time", "people", "way", "water", "day", "thing", "man", "world",
    "life", "hand", "part", "child", "eye", "woman", "place", "work",
)


class MlmBackendError(RuntimeError):
    pass


class SequenceTooLongError(MlmBackendError):
    """The encoded input exceeds the model's maximum length; the caller
    should truncate its context window."""


@dataclass(frozen=True)
class MlmQuery:
    """A single-mask query over one sentence or a sentence pair."""

    segment_a: tuple[str, ...]
    segment_b: tuple[str, ...] | None
    mask_position: tuple[int, int]

    def __post_init__(self) -> None:
        seg_id, index = self.mask_position
        if seg_id not in (0, 1):
            raise ValueError("mask segment id must be 0 or 1")
        if seg_id == 1 and self.segment_b is None:
            raise ValueError("mask addresses segment_b but segment_b is absent")
        segment = self.segment_a if seg_id == 0 else self.segment_b
        if not 0 <= index < len(segment):
            raise ValueError("mask position out of range")

    def fingerprint(self) -> str:
        """Join the token streams into the lookup key used by the mock."""
        key = " ".join(self.segment_a)
        if self.segment_b is not None:
            key += " [SEP] " + " ".join(self.segment_b)
        return key


@dataclass(frozen=True)
class MlmPrediction:
    """Ranked whole-word predictions for a masked slot."""

    entries: tuple[tuple[str, float], ...]

    def __post_init__(self) -> None:
        prev = 1.0
        seen = set()
        for word, prob in self.entries:
            if not 0.0 < prob <= 1.0:
                raise ValueError(f"probability {prob} outside (0, 1]")
            if prob > prev:
                raise ValueError("probabilities must be non-increasing")
            if word in seen:
                raise ValueError(f"duplicate prediction {word!r}")
            seen.add(word)
            prev = prob

    def words(self) -> list[str]:
        return [word for word, _ in self.entries]


@dataclass(frozen=True)
class TokenLossResult:
    nats: float
    used_subwords: bool


def is_whole_word(token: str) -> bool:
    """Filter predicate: drop subword continuations, special tokens, and
    punctuation-only vocabulary items."""
    if token.startswith("##"):
        return False
    if token.startswith("[") and token.endswith("]"):
        return False
    return any(ch.isalpha() or ch.isdigit() for ch in token)


class MlmBackend(Protocol):
    def predict_masked(self, query: MlmQuery, k: int) -> MlmPrediction: ...

    def token_loss(self, tokens: Sequence[str], position: int, target: str) -> float: ...


class MockMlmBackend:
    """Lookup-table backend: a fingerprint either hits a configured
    prediction list or falls back to a uniform distribution over a fixed
    toy vocabulary, so pipeline tests never fail on coverage gaps.
    """

    def __init__(
        self,
        table: dict[str, list[tuple[str, float]]] | None = None,
        fallback_vocabulary: Sequence[str] = TOY_VOCABULARY,
        miss_probability: float = 1e-3,
    ):
        self.table = {key: [(w, float(p)) for w, p in rows] for key, rows in (table or {}).items()}
        self.fallback_vocabulary = tuple(fallback_vocabulary)
        self.miss_probability = miss_probability

    @classmethod
    def from_json(cls, path: str | Path) -> "MockMlmBackend":
        with open(path, encoding="utf-8") as handle:
            raw = json.load(handle)
        table = {key: [(str(w), float(p)) for w, p in rows] for key, rows in raw.items()}
        return cls(table=table)

    def _distribution(self, fingerprint: str) -> list[tuple[str, float]]:
        hit = self.table.get(fingerprint)
        if hit is not None:
            return hit
        uniform = 1.0 / len(self.fallback_vocabulary)
        return [(word, uniform) for word in self.fallback_vocabulary]

    def predict_masked(self, query: MlmQuery, k: int) -> MlmPrediction:
        if k < 1:
            raise ValueError("k must be >= 1")
        rows = self._distribution(query.fingerprint())
        entries = [(w, p) for w, p in rows if is_whole_word(w)][:k]
        return MlmPrediction(entries=tuple(entries))

    def token_loss(self, tokens: Sequence[str], position: int, target: str) -> float:
        return self.token_loss_detailed(tokens, position, target).nats

    def token_loss_detailed(
        self, tokens: Sequence[str], position: int, target: str
    ) -> TokenLossResult:
        if not 0 <= position < len(tokens):
            raise ValueError("position out of range")
        if not target:
            raise ValueError("target must be non-empty")
        masked = list(tokens)
        masked[position] = MASK
        query = MlmQuery(
            segment_a=tuple(masked), segment_b=None, mask_position=(0, position)
        )
        dist = dict(self._distribution(query.fingerprint()))
        prob = dist.get(target, dist.get(target.lower(), self.miss_probability))
        return TokenLossResult(nats=-math.log(prob), used_subwords=False)


class TransformerMlmBackend:
    """Adapter around a pretrained masked-LM encoder (loaded with the
    ``transformers`` library; install the "transformer" extra).

    The mask slot is encoded as a single mask token; predictions that are
    subword continuations or special tokens are dropped before the top-k
    cut. A multi-subword target in token_loss is scored as the mean of its
    subword cross-entropies. Queries are serialized on an internal lock;
    callers get thread safety, not parallel speedup.
    """

    #: How many raw predictions are scanned per requested whole word.
    SCAN_FACTOR = 5

    def __init__(self, model_id: str, max_length: int = 512, device: str = "cpu"):
        try:
            import torch
            from transformers import AutoModelForMaskedLM, AutoTokenizer
        except ImportError as exc:  # pragma: no cover - extra not installed
            raise MlmBackendError(
                "the transformer backend needs the optional dependencies: "
                "pip install 'lexsimp[transformer]'"
            ) from exc
        self._torch = torch
        self.model_id = model_id
        self.max_length = max_length
        self.device = device
        self.tokenizer = AutoTokenizer.from_pretrained(model_id)
        self.model = AutoModelForMaskedLM.from_pretrained(model_id)
        self.model.to(device)
        self.model.eval()
        self._lock = threading.Lock()

    @classmethod
    def from_loaded(cls, tokenizer, model, max_length: int = 512, device: str = "cpu"):
        """Wrap an already-constructed tokenizer/model pair (used by tests
        and callers that manage model loading themselves)."""
        import torch

        backend = cls.__new__(cls)
        backend._torch = torch
        backend.model_id = getattr(model.config, "name_or_path", "<in-memory>")
        backend.max_length = max_length
        backend.device = device
        backend.tokenizer = tokenizer
        backend.model = model.to(device)
        backend.model.eval()
        backend._lock = threading.Lock()
        return backend

    def _pieces(self, word: str) -> list[str]:
        if word == MASK:
            return [self.tokenizer.mask_token]
        pieces = self.tokenizer.tokenize(word)
        return pieces if pieces else [self.tokenizer.unk_token]

    def _encode(
        self, query: MlmQuery, mask_pieces: int = 1
    ) -> tuple[list[int], list[int], int]:
        """Build input ids and type ids; returns the piece index at which
        the addressed word starts. When the addressed token is the mask
        sentinel it expands to ``mask_pieces`` mask tokens; otherwise the
        word stays in place and predictions are read at its first piece.
        """
        tok = self.tokenizer
        pieces: list[str] = [tok.cls_token]
        type_ids: list[int] = [0]
        mask_piece_index = -1
        segments = [self.segment_tokens(query, 0)]
        if query.segment_b is not None:
            segments.append(self.segment_tokens(query, 1))
        for seg_id, words in enumerate(segments):
            for index, word in enumerate(words):
                if (seg_id, index) == query.mask_position:
                    mask_piece_index = len(pieces)
                    if word == MASK:
                        word_pieces = [tok.mask_token] * mask_pieces
                    else:
                        word_pieces = self._pieces(word)
                else:
                    word_pieces = self._pieces(word)
                pieces.extend(word_pieces)
                type_ids.extend([seg_id] * len(word_pieces))
            pieces.append(tok.sep_token)
            type_ids.append(seg_id)
        if len(pieces) > self.max_length:
            raise SequenceTooLongError(
                f"encoded length {len(pieces)} exceeds max_length "
                f"{self.max_length}; truncate the context window"
            )
        return tok.convert_tokens_to_ids(pieces), type_ids, mask_piece_index

    @staticmethod
    def segment_tokens(query: MlmQuery, seg_id: int) -> tuple[str, ...]:
        return query.segment_a if seg_id == 0 else query.segment_b

    def _forward(self, input_ids: list[int], type_ids: list[int]):
        torch = self._torch
        with self._lock, torch.no_grad():
            output = self.model(
                input_ids=torch.tensor([input_ids], device=self.device),
                token_type_ids=torch.tensor([type_ids], device=self.device),
            )
        return output.logits[0]

    def predict_masked(self, query: MlmQuery, k: int) -> MlmPrediction:
        if k < 1:
            raise ValueError("k must be >= 1")
        input_ids, type_ids, mask_index = self._encode(query, mask_pieces=1)
        logits = self._forward(input_ids, type_ids)
        probs = self._torch.softmax(logits[mask_index], dim=-1)
        scan = min(self.SCAN_FACTOR * k, probs.shape[-1])
        top = self._torch.topk(probs, scan)
        entries: list[tuple[str, float]] = []
        seen: set[str] = set()
        for prob, token_id in zip(top.values.tolist(), top.indices.tolist()):
            token = self.tokenizer.convert_ids_to_tokens(token_id)
            if not is_whole_word(token) or token in seen:
                continue
            seen.add(token)
            entries.append((token, prob))
            if len(entries) == k:
                break
        if len(entries) < k:
            raise MlmBackendError(
                f"only {len(entries)} whole-word predictions found in the "
                f"top {scan}; cannot fill k={k}"
            )
        return MlmPrediction(entries=tuple(entries))

    def token_loss(self, tokens: Sequence[str], position: int, target: str) -> float:
        return self.token_loss_detailed(tokens, position, target).nats

    def token_loss_detailed(
        self, tokens: Sequence[str], position: int, target: str
    ) -> TokenLossResult:
        if not 0 <= position < len(tokens):
            raise ValueError("position out of range")
        if not target:
            raise ValueError("target must be non-empty")
        target_pieces = self._pieces(target)
        masked = list(tokens)
        masked[position] = MASK
        query = MlmQuery(
            segment_a=tuple(masked), segment_b=None, mask_position=(0, position)
        )
        input_ids, type_ids, mask_index = self._encode(
            query, mask_pieces=len(target_pieces)
        )
        logits = self._forward(input_ids, type_ids)
        piece_ids = self.tokenizer.convert_tokens_to_ids(target_pieces)
        log_probs = self._torch.log_softmax(
            logits[mask_index : mask_index + len(piece_ids)], dim=-1
        )
        losses = [
            -float(log_probs[offset, piece_id])
            for offset, piece_id in enumerate(piece_ids)
        ]
        if len(losses) > 1:
            logger.debug(
                "token_loss for %r used %d subword pieces", target, len(losses)
            )
        return TokenLossResult(
            nats=sum(losses) / len(losses), used_subwords=len(losses) > 1
        )
