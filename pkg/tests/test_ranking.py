import math
import random

import pytest

from lexsimp import (
    FEATURES,
    Candidate,
    CandidateSet,
    MockMlmBackend,
    RankingTable,
    aggregate,
    feature_bert_order,
    feature_frequency,
    feature_lm_loss,
    feature_ppdb,
    feature_similarity,
    filter_by_frequency,
    mean_ranks,
    tokenize,
    zipf,
)


def make_set(words, complex_word="perched"):
    probs = [0.5 / (i + 1) for i in range(len(words))]
    return CandidateSet(
        complex_word=complex_word,
        position=0,
        candidates=tuple(
            Candidate(w, p, i + 1) for i, (w, p) in enumerate(zip(words, probs))
        ),
    )


class TestFrequencyFilter:
    def test_drops_rare_words_and_renumbers(self, frequency_store):
        cands = make_set(["abstruse", "sat"])
        out = filter_by_frequency(cands, frequency_store, 3.0)
        assert out.surfaces() == ["sat"]
        assert out.candidates[0].prediction_rank == 1
        assert out.filter_fallback is False

    def test_zero_floor_keeps_everything(self, frequency_store):
        cands = make_set(["abstruse", "sat", "zzzunknown"])
        out = filter_by_frequency(cands, frequency_store, 0.0)
        assert out.surfaces() == ["abstruse", "sat", "zzzunknown"]

    def test_all_below_floor_falls_back(self, frequency_store):
        cands = make_set(["abstruse", "zzzunknown"])
        out = filter_by_frequency(cands, frequency_store, 3.0)
        assert out.filter_fallback is True
        assert out.surfaces() == ["abstruse", "zzzunknown"]

    def test_empty_set_stays_empty_without_fallback(self, frequency_store):
        cands = CandidateSet(complex_word="perched", position=0, candidates=())
        out = filter_by_frequency(cands, frequency_store, 3.0)
        assert len(out) == 0
        assert out.filter_fallback is False

    def test_survivors_meet_floor_unless_fallback(self, frequency_store):
        words = ["sat", "cat", "mat", "poems", "composed", "perches",
                 "abstruse", "zzzunknown", "qqq"]
        rng = random.Random(11)
        for _ in range(100):
            picked = rng.sample(words, rng.randint(1, len(words)))
            out = filter_by_frequency(
                make_set(picked, complex_word="target"), frequency_store, 3.0
            )
            if out.filter_fallback:
                assert all(
                    zipf(frequency_store, w) < 3.0 for w in out.surfaces()
                )
            else:
                assert all(
                    zipf(frequency_store, w) >= 3.0 for w in out.surfaces()
                )


class TestFeatures:
    def test_bert_order_is_prediction_rank(self):
        cands = make_set(["sat", "seated", "hopped"])
        assert feature_bert_order(cands) == [1.0, 2.0, 3.0]

    def test_similarity_reads_embeddings(self, embedding_store):
        got = feature_similarity("perched", "sat", embedding_store)
        assert got == pytest.approx(math.cos(math.radians(5.0)), abs=1e-9)
        assert feature_similarity("perched", "qqq", embedding_store) == 0.0

    def test_frequency_is_zipf(self, frequency_store):
        assert feature_frequency("sat", frequency_store) == pytest.approx(6.0)
        assert feature_frequency("qqq", frequency_store) == 0.0

    def test_ppdb_rule(self, paraphrase_store):
        assert feature_ppdb("perched", "sat", paraphrase_store, 5) == 1.0
        assert feature_ppdb("sat", "perched", paraphrase_store, 5) == 1.0
        assert feature_ppdb("perched", "hopped", paraphrase_store, 9) == 3.0
        assert feature_ppdb("perched", "hopped", paraphrase_store, 10) == (
            pytest.approx(10 / 3)
        )
        assert feature_ppdb("perched", "hopped", paraphrase_store, 1) == 1.0
        assert feature_ppdb("perched", "hopped", paraphrase_store, 2) == 1.0
        with pytest.raises(ValueError):
            feature_ppdb("perched", "hopped", paraphrase_store, 0)

    def test_lm_loss_uniform_fallback_exact(self):
        backend = MockMlmBackend(table={})
        sentence = tokenize("man qqq")
        got = feature_lm_loss(sentence, 0, "work", backend, window=1)
        # "work" sits in the toy vocabulary (p = 1/16); "qqq" does not
        # and takes the miss probability (1e-3).
        want = (math.log(16.0) + math.log(1000.0)) / 2.0
        assert got == pytest.approx(want, abs=1e-12)

    def test_lm_loss_window_shape_at_boundary(self):
        calls = []

        class Recorder:
            def token_loss(self, tokens, position, target):
                calls.append((tuple(tokens), position, target))
                return 1.0

            def predict_masked(self, query, k):
                raise AssertionError("not used here")

        sentence = tokenize("the cat perched on the mat .")
        got = feature_lm_loss(sentence, 0, "a", Recorder(), window=5)
        assert got == 1.0
        # position 0 with window 5 spans tokens [0, 6): six calls,
        # each on the same substituted segment
        expected_segment = ("a", "cat", "perched", "on", "the", "mat")
        assert len(calls) == 6
        for j, (segment, position, target) in enumerate(calls):
            assert segment == expected_segment
            assert position == j
            assert target == expected_segment[j]

    def test_lm_loss_rejects_bad_args(self, mock_backend):
        sentence = tokenize("the cat perched on the mat .")
        with pytest.raises(ValueError):
            feature_lm_loss(sentence, 0, "a", mock_backend, window=0)
        with pytest.raises(IndexError):
            feature_lm_loss(sentence, 99, "a", mock_backend, window=2)


class TestMeanRanks:
    def test_plain_ordering(self):
        assert mean_ranks([3.0, 1.0, 2.0], higher_is_better=False) == [3, 1, 2]
        assert mean_ranks([3.0, 1.0, 2.0], higher_is_better=True) == [1, 3, 2]

    def test_ties_take_mean_position(self):
        assert mean_ranks([1.0, 1.0, 2.0], higher_is_better=False) == [1.5, 1.5, 3]
        assert mean_ranks([5.0, 5.0, 1.0], higher_is_better=True) == [1.5, 1.5, 3]
        assert mean_ranks([2.0, 2.0, 2.0], higher_is_better=False) == [2, 2, 2]

    def test_rank_sum_invariant(self):
        rng = random.Random(5)
        for _ in range(200):
            n = rng.randint(1, 8)
            scores = [rng.choice([0.0, 0.25, 0.5, 1.0, rng.random()])
                      for _ in range(n)]
            for flag in (False, True):
                ranks = mean_ranks(scores, flag)
                assert sum(ranks) == pytest.approx(n * (n + 1) / 2)
                assert all(1.0 <= r <= n for r in ranks)


def oracle_ranks(scores, higher_is_better):
    """Block-sort reference: rank = mean of 1-based sorted positions."""
    order = sorted(range(len(scores)), key=lambda i: scores[i],
                   reverse=higher_is_better)
    ranks = [0.0] * len(scores)
    pos = 0
    while pos < len(order):
        end = pos
        while (end + 1 < len(order)
               and scores[order[end + 1]] == scores[order[pos]]):
            end += 1
        block = order[pos:end + 1]
        mean_pos = sum(range(pos + 1, end + 2)) / len(block)
        for i in block:
            ranks[i] = mean_pos
        pos = end + 1
    return ranks


def oracle_best(candidates, raw_scores):
    enabled = [f for f in FEATURES if f in raw_scores]
    per_feature = {}
    for name in enabled:
        if name == "ppdb":
            per_feature[name] = [float(s) for s in raw_scores[name]]
        else:
            per_feature[name] = oracle_ranks(
                raw_scores[name], name in ("similarity", "frequency")
            )
    averages = [
        sum(per_feature[name][i] for name in enabled) / len(enabled)
        for i in range(len(candidates))
    ]
    bert = per_feature.get("bert_order", [0.0] * len(candidates))
    best = min(range(len(candidates)),
               key=lambda i: (averages[i], bert[i], candidates[i]))
    return averages, best


class TestAggregate:
    def test_hand_worked_table(self):
        table = aggregate(
            ["a", "b", "c"],
            {
                "bert_order": [1, 2, 3],
                "lm_loss": [0.4, 0.2, 0.9],
                "similarity": [0.9, 0.1, 0.5],
                "frequency": [4.0, 6.0, 2.0],
                "ppdb": [1.0, 1.0, 1.0],
            },
        )
        assert table.features["bert_order"][1] == (1.0, 2.0, 3.0)
        assert table.features["lm_loss"][1] == (2.0, 1.0, 3.0)
        assert table.features["similarity"][1] == (1.0, 3.0, 2.0)
        assert table.features["frequency"][1] == (2.0, 1.0, 3.0)
        assert table.features["ppdb"][1] == (1.0, 1.0, 1.0)
        assert table.average_rank == pytest.approx((1.4, 1.6, 2.4))
        assert table.best == 0
        assert table.best_candidate() == "a"

    def test_ppdb_raw_is_used_as_rank(self):
        table = aggregate(["a", "b"], {"ppdb": [2.0, 1.0]})
        assert table.features["ppdb"][1] == (2.0, 1.0)
        assert table.average_rank == (2.0, 1.0)
        assert table.best == 1

    def test_tie_breaks_on_bert_order(self):
        table = aggregate(
            ["x", "y"],
            {"bert_order": [2, 1], "lm_loss": [0.1, 0.2]},
        )
        assert table.average_rank == (1.5, 1.5)
        assert table.best == 1  # y holds the better prediction rank

    def test_tie_breaks_lexicographically_without_bert(self):
        table = aggregate(["zeta", "alpha"], {"ppdb": [2.0, 2.0]})
        assert table.average_rank == (2.0, 2.0)
        assert table.best_candidate() == "alpha"

    def test_single_candidate(self):
        table = aggregate(["only"], {"bert_order": [1], "ppdb": [1.0]})
        assert table.best == 0
        assert table.average_rank == (1.0,)

    def test_validation(self):
        with pytest.raises(ValueError):
            aggregate([], {"bert_order": []})
        with pytest.raises(ValueError):
            aggregate(["a"], {})
        with pytest.raises(ValueError):
            aggregate(["a"], {"nonsense": [1.0]})
        with pytest.raises(ValueError):
            aggregate(["a", "b"], {"bert_order": [1.0]})

    def test_matches_brute_force_oracle(self):
        rng = random.Random(99)
        names = ["able", "baker", "charlie", "dog", "easy", "fox"]
        for _ in range(300):
            n = rng.randint(1, 6)
            candidates = names[:n]
            enabled = rng.sample(FEATURES, rng.randint(1, len(FEATURES)))
            raw = {}
            for name in enabled:
                if name == "bert_order":
                    raw[name] = [float(i + 1) for i in range(n)]
                elif name == "ppdb":
                    raw[name] = [
                        rng.choice([1.0, max(1.0, n / 3)]) for _ in range(n)
                    ]
                else:
                    raw[name] = [
                        rng.choice([0.0, 0.5, 1.0, round(rng.random(), 2)])
                        for _ in range(n)
                    ]
            table = aggregate(candidates, raw)
            averages, best = oracle_best(candidates, raw)
            assert list(table.average_rank) == pytest.approx(averages)
            assert table.best == best

    def test_scale_invariance_of_ranked_features(self):
        raw = {"lm_loss": [0.4, 0.2, 0.9], "similarity": [0.9, 0.1, 0.5]}
        scaled = {
            "lm_loss": [s * 100 for s in raw["lm_loss"]],
            "similarity": [s * 0.01 for s in raw["similarity"]],
        }
        a = aggregate(["a", "b", "c"], raw)
        b = aggregate(["a", "b", "c"], scaled)
        assert a.average_rank == b.average_rank
        assert a.best == b.best

    def test_to_dict_round_trip_shape(self):
        table = aggregate(["a", "b"], {"bert_order": [1, 2]})
        d = table.to_dict()
        assert d["candidates"] == ["a", "b"]
        assert d["features"]["bert_order"]["ranks"] == [1.0, 2.0]
        assert d["best"] == 0
        assert isinstance(table, RankingTable)
