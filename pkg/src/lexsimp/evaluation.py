"""Benchmark loading and metrics.

Covers both evaluation granularities: word level (precision/recall/F1
of generated substitutes against human gold lists, and precision/
accuracy of the final replacement) and sentence level (SARI against
reference simplifications, Flesch reading ease for readability).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .resources import ResourceFormatError


@dataclass(frozen=True)
class GoldInstance:
    """One benchmark item: a sentence, the complex word in it, and the
    human-ranked substitutions."""

    sentence: str
    target: str
    target_index: int
    gold: tuple[tuple[int, str], ...]

    def __post_init__(self) -> None:
        tokens = self.sentence.split()
        if not 0 <= self.target_index < len(tokens):
            raise ValueError(f"target index {self.target_index} out of range")
        if tokens[self.target_index].lower() != self.target.lower():
            raise ValueError(
                f"token at index {self.target_index} is "
                f"{tokens[self.target_index]!r}, not {self.target!r}"
            )
        if not self.gold:
            raise ValueError("gold substitutions must be non-empty")
        for rank, substitution in self.gold:
            if rank < 1:
                raise ValueError(f"gold rank {rank} must be positive")
            if not substitution:
                raise ValueError("empty gold substitution")

    def gold_words(self) -> set[str]:
        return {substitution.lower() for _, substitution in self.gold}


@dataclass(frozen=True)
class TsInstance:
    source: str
    references: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.references:
            raise ValueError("at least one reference is required")


def load_ls_dataset(path: str | Path) -> list[GoldInstance]:
    """Parse the TSV benchmark format:
    sentence<TAB>target<TAB>index<TAB>rank:substitution[<TAB>rank:substitution...]

    Duplicate substitutions keep their best (lowest) rank. Malformed
    lines fail loudly with their line number."""
    instances: list[GoldInstance] = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) < 4:
                raise ResourceFormatError(
                    path, line_no,
                    f"expected at least 4 tab-separated fields, got {len(fields)}",
                )
            sentence, target, index_text = fields[0], fields[1], fields[2]
            try:
                target_index = int(index_text)
            except ValueError:
                raise ResourceFormatError(
                    path, line_no, f"target index {index_text!r} is not an integer"
                ) from None
            best: dict[str, int] = {}
            for field in fields[3:]:
                if not field.strip():
                    continue
                rank_text, sep, substitution = field.partition(":")
                substitution = substitution.strip()
                if not sep or not substitution:
                    raise ResourceFormatError(
                        path, line_no, f"substitution field {field!r} is not rank:word"
                    )
                try:
                    rank = int(rank_text)
                except ValueError:
                    raise ResourceFormatError(
                        path, line_no, f"rank {rank_text!r} is not an integer"
                    ) from None
                key = substitution.lower()
                if key not in best or rank < best[key]:
                    best[key] = rank
            gold = tuple(sorted(
                ((rank, word) for word, rank in best.items()),
                key=lambda pair: (pair[0], pair[1]),
            ))
            try:
                instances.append(GoldInstance(
                    sentence=sentence, target=target,
                    target_index=target_index, gold=gold,
                ))
            except ValueError as exc:
                raise ResourceFormatError(path, line_no, str(exc)) from None
    return instances


def eval_sg(generated: Sequence[str], gold: set[str]) -> tuple[float, float, float]:
    """Precision, recall, F1 of generated substitutes against the gold
    set; case-insensitive exact match, set semantics."""
    produced = {word.lower() for word in generated}
    reference = {word.lower() for word in gold}
    overlap = len(produced & reference)
    precision = overlap / len(produced) if produced else 0.0
    recall = overlap / len(reference) if reference else 0.0
    if precision + recall == 0.0:
        return precision, recall, 0.0
    f1 = 2 * precision * recall / (precision + recall)
    return precision, recall, f1


def eval_sg_corpus(
    pairs: Iterable[tuple[Sequence[str], set[str]]]
) -> tuple[float, float, float]:
    """Corpus scores are means of per-instance scores."""
    rows = [eval_sg(generated, gold) for generated, gold in pairs]
    if not rows:
        raise ValueError("no instances to evaluate")
    count = len(rows)
    return tuple(sum(row[i] for row in rows) / count for i in range(3))


def eval_pipeline(
    replacement: str, original: str, gold: set[str]
) -> tuple[bool, bool]:
    """Per-instance hits for full-pipeline precision and accuracy.

    Keeping the original word is precision-safe but never accurate;
    changing it scores only when the new word is in the gold set."""
    produced = replacement.lower()
    kept = produced == original.lower()
    in_gold = produced in {word.lower() for word in gold}
    pre_hit = kept or in_gold
    acc_hit = (not kept) and in_gold
    return pre_hit, acc_hit


def eval_pipeline_corpus(
    triples: Iterable[tuple[str, str, set[str]]]
) -> tuple[float, float]:
    rows = [eval_pipeline(r, o, g) for r, o, g in triples]
    if not rows:
        raise ValueError("no instances to evaluate")
    count = len(rows)
    pre = sum(1 for hit, _ in rows if hit) / count
    acc = sum(1 for _, hit in rows if hit) / count
    return pre, acc


def _ngrams(tokens: list[str], n: int) -> list[tuple[str, ...]]:
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def _sari_ngram(
    source: list[tuple[str, ...]],
    output: list[tuple[str, ...]],
    references: list[list[tuple[str, ...]]],
    numref: int,
) -> tuple[float, float, float]:
    ref_counter: Counter = Counter()
    for ref in references:
        ref_counter.update(ref)
    src_rep = Counter({g: c * numref for g, c in Counter(source).items()})
    out_rep = Counter({g: c * numref for g, c in Counter(output).items()})

    # Keep: n-grams present in both source and output, credited when the
    # references keep them too. Counts are fractional per distinct gram.
    keep_rep = src_rep & out_rep
    keep_good = keep_rep & ref_counter
    keep_all = src_rep & ref_counter
    keep_p = sum(keep_good[g] / keep_rep[g] for g in keep_good)
    keep_r = sum(keep_good[g] / keep_all[g] for g in keep_good)
    keep_precision = keep_p / len(keep_rep) if keep_rep else 0.0
    keep_recall = keep_r / len(keep_all) if keep_all else 0.0
    keep_score = 0.0
    if keep_precision > 0 or keep_recall > 0:
        keep_score = (
            2 * keep_precision * keep_recall / (keep_precision + keep_recall)
        )

    # Deletion: precision only, by convention of the reference metric.
    del_rep = src_rep - out_rep
    del_good = del_rep - ref_counter
    del_p = sum(del_good[g] / del_rep[g] for g in del_good)
    del_precision = del_p / len(del_rep) if del_rep else 0.0

    # Addition: set semantics.
    add = set(out_rep) - set(src_rep)
    add_good = add & set(ref_counter)
    add_all = set(ref_counter) - set(src_rep)
    add_precision = len(add_good) / len(add) if add else 0.0
    add_recall = len(add_good) / len(add_all) if add_all else 0.0
    add_score = 0.0
    if add_precision > 0 or add_recall > 0:
        add_score = 2 * add_precision * add_recall / (add_precision + add_recall)

    return keep_score, del_precision, add_score


def sari(source: str, output: str, references: Sequence[str]) -> float:
    """SARI in [0, 100]: how well the output keeps, deletes, and adds
    n-grams (n = 1..4) relative to the source, judged by the references."""
    if not references:
        raise ValueError("at least one reference is required")
    numref = len(references)
    src = source.lower().split()
    out = output.lower().split()
    refs = [ref.lower().split() for ref in references]
    keep_total = del_total = add_total = 0.0
    for n in range(1, 5):
        keep, delete, add = _sari_ngram(
            _ngrams(src, n),
            _ngrams(out, n),
            [_ngrams(ref, n) for ref in refs],
            numref,
        )
        keep_total += keep
        del_total += delete
        add_total += add
    return 100.0 * (keep_total / 4 + del_total / 4 + add_total / 4) / 3


_VOWELS = set("aeiouy")


def count_syllables(word: str) -> int:
    """Vowel-run heuristic: count maximal vowel groups, drop a silent
    final 'e' when another vowel group exists, floor at 1."""
    word = word.lower()
    groups = 0
    prev_vowel = False
    for ch in word:
        vowel = ch in _VOWELS
        if vowel and not prev_vowel:
            groups += 1
        prev_vowel = vowel
    if groups > 1 and word.endswith("e") and word[-2] not in _VOWELS:
        groups -= 1
    return max(1, groups)


def _count_sentences(text: str) -> int:
    count = 0
    in_terminal = False
    for ch in text:
        if ch in ".!?":
            if not in_terminal:
                count += 1
            in_terminal = True
        else:
            in_terminal = False
    return max(1, count)


def fres(text: str) -> float:
    """Flesch reading ease: higher is easier to read."""
    words = [w for w in text.split() if any(ch.isalnum() for ch in w)]
    if not words:
        raise ValueError("text contains no words")
    sentences = _count_sentences(text)
    syllables = sum(count_syllables(w) for w in words)
    return (
        206.835
        - 1.015 * (len(words) / sentences)
        - 84.6 * (syllables / len(words))
    )
