"""Shared fixtures: a small deterministic world for offline tests.

total_tokens is 1e9 so zipf(word) is simply log10(count); the counts
below are chosen to make complexity scores and filter outcomes easy to
reason about by hand.
"""

import json
import math

import pytest

from lexsimp import (
    EmbeddingStore,
    FrequencyStore,
    MockMlmBackend,
    ParaphraseStore,
    Resources,
)

TOTAL_TOKENS = 10**9

COUNTS = {
    # function words and easy words: zipf 7 -> complexity 0
    "the": 10**7, "on": 10**7, "to": 10**7, "is": 10**7, "very": 10**7,
    # common words: zipf 6
    "cat": 10**6, "sat": 10**6, "dog": 10**6, "big": 10**6, "hard": 10**6,
    "wrote": 10**6,
    # mid-frequency: zipf 5
    "mat": 10**5, "tough": 10**5, "entrance": 10**5, "access": 10**5,
    "extremely": 10**5, "poems": 10**4,
    # rarer: zipf 4
    "seated": 10**4, "hopped": 10**4, "admission": 10**4,
    # rare: zipf 3 and below (complexity > 0.5)
    "composed": 10**3, "verses": 10**3,
    "perched": 10**2, "exceedingly": 10**2, "competitive": 10**2,
    "abstruse": 10**2,
}


def _vec(degrees):
    rad = math.radians(degrees)
    return (math.cos(rad), math.sin(rad))


# Cosine similarity between two of these is the cosine of their angle
# difference, so similarity orderings are chosen by placing words on the
# unit circle.
VECTORS = {
    "perched": _vec(0), "sat": _vec(5), "seated": _vec(12), "hopped": _vec(80),
    "exceedingly": _vec(100), "extremely": _vec(110), "very": _vec(125),
    "competitive": _vec(200), "tough": _vec(215), "hard": _vec(230),
    "admission": _vec(300), "entrance": _vec(310), "access": _vec(320),
    "composed": _vec(40), "wrote": _vec(48),
}

PPDB_PAIRS = [
    ("perched", "sat"),
    ("exceedingly", "very"),
    ("competitive", "tough"),
    ("admission", "entrance"),
]

# Scripted sentence-pair predictions. Keys are the mock fingerprints:
# segment_a, " [SEP] ", segment_b with the target masked. Everything not
# listed here falls back to the uniform toy vocabulary.
CAT_SENTENCE = "the cat perched on the mat ."
MOCK_TABLE = {
    # cat scenario: one complex word
    "the cat perched on the mat . [SEP] the cat [MASK] on the mat .": [
        ("sat", 0.5), ("perched", 0.2), ("seated", 0.1),
        ("perches", 0.05), ("hopped", 0.02),
    ],
    # admission scenario: three replacements, processed most-complex-first,
    # each key reflects the sentence state when the query is made
    "Admission to Tsinghua is exceedingly competitive . [SEP] "
    "Admission to Tsinghua is [MASK] competitive .": [
        ("very", 0.6), ("extremely", 0.2),
    ],
    "Admission to Tsinghua is very competitive . [SEP] "
    "Admission to Tsinghua is very [MASK] .": [
        ("tough", 0.5), ("hard", 0.3),
    ],
    "Admission to Tsinghua is very tough . [SEP] "
    "[MASK] to Tsinghua is very tough .": [
        ("entrance", 0.7), ("access", 0.2),
    ],
}


@pytest.fixture
def frequency_store():
    return FrequencyStore(counts=dict(COUNTS), total_tokens=TOTAL_TOKENS)


@pytest.fixture
def embedding_store():
    return EmbeddingStore(dimension=2, vectors={w: v for w, v in VECTORS.items()})


@pytest.fixture
def paraphrase_store():
    pairs = set()
    for a, b in PPDB_PAIRS:
        key = (min(a, b), max(a, b))
        pairs.add(key)
    return ParaphraseStore(pairs=frozenset(pairs))


@pytest.fixture
def mock_backend():
    return MockMlmBackend(table={k: list(v) for k, v in MOCK_TABLE.items()})


@pytest.fixture
def resources(embedding_store, frequency_store, paraphrase_store):
    return Resources(
        embeddings=embedding_store,
        frequency=frequency_store,
        paraphrases=paraphrase_store,
    )


@pytest.fixture(scope="session")
def world_files(tmp_path_factory):
    """The same fixture world, serialized in the on-disk formats the CLI
    loads from."""
    root = tmp_path_factory.mktemp("world")
    embeddings = root / "vectors.txt"
    embeddings.write_text(
        "".join(f"{w} {v[0]} {v[1]}\n" for w, v in VECTORS.items()),
        encoding="utf-8",
    )
    frequency = root / "frequency.tsv"
    frequency.write_text(
        f"#total\t{TOTAL_TOKENS}\n"
        + "".join(f"{w}\t{c}\n" for w, c in COUNTS.items()),
        encoding="utf-8",
    )
    ppdb = root / "ppdb.tsv"
    ppdb.write_text(
        "".join(f"{a}\t{b}\n" for a, b in PPDB_PAIRS), encoding="utf-8"
    )
    mock = root / "mock.json"
    mock.write_text(
        json.dumps({
            key: [[w, p] for w, p in rows] for key, rows in MOCK_TABLE.items()
        }),
        encoding="utf-8",
    )
    return {
        "embeddings": str(embeddings),
        "frequency": str(frequency),
        "ppdb": str(ppdb),
        "mock": str(mock),
    }
