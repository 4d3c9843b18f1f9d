"""Shared domain types: tokenized sentences, pipeline configuration, traces."""

from __future__ import annotations

import enum
import re
import unicodedata
from dataclasses import dataclass, field

_CHUNK_RE = re.compile(r"\S+")


def is_punctuation(surface: str) -> bool:
    """True if every character of the token is Unicode punctuation."""
    return len(surface) > 0 and all(
        unicodedata.category(ch).startswith("P") for ch in surface
    )


def is_numeric(surface: str) -> bool:
    """True for number-like tokens (digits with optional separators/sign)."""
    if not any(ch.isdigit() for ch in surface):
        return False
    return all(ch.isdigit() or ch in ".,-+%/:" for ch in surface)


@dataclass(frozen=True)
class Token:
    surface: str
    char_start: int
    char_end: int


@dataclass(frozen=True)
class TokenizedSentence:
    """A sentence plus its tokens with character offsets into ``text``.

    Tokens are non-overlapping, ordered, and each surface is exactly
    ``text[char_start:char_end]``, so the original string (including all
    whitespace) can always be reconstructed.
    """

    text: str
    tokens: tuple[Token, ...]

    def __post_init__(self) -> None:
        prev_end = 0
        for tok in self.tokens:
            if tok.char_start < prev_end:
                raise ValueError(f"overlapping or unordered token at {tok.char_start}")
            if self.text[tok.char_start : tok.char_end] != tok.surface:
                raise ValueError(f"token surface mismatch at {tok.char_start}")
            prev_end = tok.char_end

    def __len__(self) -> int:
        return len(self.tokens)

    def surfaces(self) -> list[str]:
        return [tok.surface for tok in self.tokens]


def tokenize(text: str) -> TokenizedSentence:
    """Split ``text`` on whitespace, peeling leading/trailing punctuation
    into separate tokens. Case and all whitespace are preserved via offsets.
    """
    tokens: list[Token] = []
    for match in _CHUNK_RE.finditer(text):
        chunk = match.group()
        start = match.start()
        lo, hi = 0, len(chunk)
        leading: list[tuple[str, int]] = []
        trailing: list[tuple[str, int]] = []
        while lo < hi and is_punctuation(chunk[lo]):
            leading.append((chunk[lo], start + lo))
            lo += 1
        while hi > lo and is_punctuation(chunk[hi - 1]):
            trailing.append((chunk[hi - 1], start + hi - 1))
            hi -= 1
        for ch, pos in leading:
            tokens.append(Token(ch, pos, pos + 1))
        if hi > lo:
            tokens.append(Token(chunk[lo:hi], start + lo, start + hi))
        for ch, pos in reversed(trailing):
            tokens.append(Token(ch, pos, pos + 1))
    return TokenizedSentence(text=text, tokens=tuple(tokens))


def tokenize_whitespace(text: str) -> TokenizedSentence:
    """Whitespace-only tokenization: every non-space chunk is one token.

    Benchmark files ship pre-tokenized sentences whose target indices
    address ``str.split()`` positions, so no punctuation peeling here."""
    tokens = tuple(
        Token(match.group(), match.start(), match.end())
        for match in _CHUNK_RE.finditer(text)
    )
    return TokenizedSentence(text=text, tokens=tokens)


def detokenize(sentence: TokenizedSentence) -> str:
    """Reconstruct the original text byte-for-byte."""
    return sentence.text


def replace_token(
    sentence: TokenizedSentence, position: int, replacement: str
) -> TokenizedSentence:
    """Return a new sentence with only the token at ``position`` replaced.

    Surrounding whitespace and punctuation are untouched; offsets of the
    following tokens are shifted by the length difference.
    """
    if not 0 <= position < len(sentence.tokens):
        raise IndexError(f"token position {position} out of range")
    if not replacement or any(ch.isspace() for ch in replacement):
        raise ValueError("replacement must be non-empty and whitespace-free")
    target = sentence.tokens[position]
    new_text = (
        sentence.text[: target.char_start]
        + replacement
        + sentence.text[target.char_end :]
    )
    delta = len(replacement) - (target.char_end - target.char_start)
    new_tokens = list(sentence.tokens[:position])
    new_tokens.append(
        Token(replacement, target.char_start, target.char_start + len(replacement))
    )
    for tok in sentence.tokens[position + 1 :]:
        new_tokens.append(Token(tok.surface, tok.char_start + delta, tok.char_end + delta))
    return TokenizedSentence(text=new_text, tokens=tuple(new_tokens))


def match_case(original: str, replacement: str) -> str:
    """Transfer the original token's capitalization pattern onto the
    replacement (title-case and all-caps patterns are inherited)."""
    if original.isupper() and len(original) > 1:
        return replacement.upper()
    if original[:1].isupper():
        return replacement[:1].upper() + replacement[1:]
    return replacement


class GenerationMode(str, enum.Enum):
    SENTENCE_PAIR = "sentence_pair"
    SINGLE_MASKED = "single_masked"
    SINGLE_UNMASKED = "single_unmasked"


@dataclass(frozen=True)
class PipelineConfig:
    """Knobs shared by the whole simplification pipeline."""

    complexity_threshold: float = 0.5
    top_k: int = 10
    zipf_filter_min: float = 3.0
    lm_window: int = 5
    context_mask_prob: float = 0.0
    rng_seed: int = 42
    generation_mode: GenerationMode = GenerationMode.SENTENCE_PAIR

    def __post_init__(self) -> None:
        if not 0.0 <= self.complexity_threshold <= 1.0:
            raise ValueError("complexity_threshold must be in [0, 1]")
        if self.top_k < 1:
            raise ValueError("top_k must be a positive integer")
        if self.lm_window < 1:
            raise ValueError("lm_window must be a positive integer")
        if not 0.0 <= self.context_mask_prob <= 1.0:
            raise ValueError("context_mask_prob must be in [0, 1]")
        if not isinstance(self.generation_mode, GenerationMode):
            object.__setattr__(
                self, "generation_mode", GenerationMode(self.generation_mode)
            )


class StepReason(str, enum.Enum):
    REPLACED = "replaced"
    REJECTED_BY_CONDITION = "rejected_by_condition"
    NO_CANDIDATES = "no_candidates"


@dataclass(frozen=True)
class TraceStep:
    """One replacement decision for one token position."""

    position: int
    original: str
    candidates: "object"  # CandidateSet; untyped here to avoid an import cycle
    ranking: "object | None"  # RankingTable or None
    chosen: str | None
    accepted: bool
    reason: StepReason

    def to_dict(self) -> dict:
        return {
            "position": self.position,
            "original": self.original,
            "candidates": (
                self.candidates.to_dict() if self.candidates is not None else None
            ),
            "ranking": self.ranking.to_dict() if self.ranking is not None else None,
            "chosen": self.chosen,
            "accepted": self.accepted,
            "reason": self.reason.value,
        }


@dataclass(frozen=True)
class SimplificationTrace:
    """Ordered record of every decision taken while rewriting one sentence."""

    steps: tuple[TraceStep, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        positions = [step.position for step in self.steps]
        if len(positions) != len(set(positions)):
            raise ValueError("a token position may be simplified at most once")

    def to_dict(self) -> dict:
        return {"steps": [step.to_dict() for step in self.steps]}
