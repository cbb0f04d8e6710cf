"""Scoring methods: frozen values, cross-checks and ranking rules."""

from __future__ import annotations

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from rankterms import (
    RankingMethod,
    Vocabulary,
    import_model,
    method_scores,
    rerank_all,
    rerank_topic,
    score_idf,
    score_norm,
    score_orig,
    score_tfidf,
)

LN2 = math.log(2.0)


@pytest.fixture
def two_topic_model():
    # column 0 probabilities differ by exactly 2x, making logs exact
    phi = np.array([
        [0.4, 0.35, 0.25],
        [0.2, 0.35, 0.45],
    ])
    theta = np.array([[0.5, 0.5]] * 4)
    return import_model(phi, theta)


@pytest.fixture
def two_topic_vocab():
    return Vocabulary(words=["alpha", "beta", "gamma"], doc_freq=[2, 4, 1],
                      num_docs=4)


def random_model(rng, num_topics=6, vocab_size=40):
    phi = rng.dirichlet(np.ones(vocab_size), size=num_topics)
    phi = np.maximum(phi, 1e-12)
    phi /= phi.sum(axis=1, keepdims=True)
    theta = rng.dirichlet(np.ones(num_topics), size=5)
    return import_model(phi, theta)


def random_vocab(rng, vocab_size, num_docs=50):
    words = [f"w{i:03d}x".replace("0", "o").replace("1", "l").replace("2", "z")
             .replace("3", "e").replace("4", "a").replace("5", "s")
             .replace("6", "g").replace("7", "t").replace("8", "b")
             .replace("9", "q") for i in range(vocab_size)]
    df = [int(rng.integers(1, num_docs + 1)) for _ in range(vocab_size)]
    return Vocabulary(words=words, doc_freq=df, num_docs=num_docs)


class TestScalarScores:
    def test_orig_is_probability(self, two_topic_model):
        assert score_orig(two_topic_model, 0, 0) == 0.4
        assert score_orig(two_topic_model, 1, 2) == 0.45

    def test_norm_fraction_of_column(self, two_topic_model):
        # column 0 sums to 0.6
        assert_allclose(score_norm(two_topic_model, 0, 0), 0.4 / 0.6, atol=1e-15)
        assert_allclose(score_norm(two_topic_model, 1, 0), 0.2 / 0.6, atol=1e-15)
        assert_allclose(score_norm(two_topic_model, 0, 1), 0.5, atol=1e-15)

    def test_norm_sums_to_one_over_topics(self, two_topic_model):
        for w in range(3):
            total = sum(score_norm(two_topic_model, t, w) for t in range(2))
            assert_allclose(total, 1.0, atol=1e-12)

    def test_tfidf_frozen_value(self, two_topic_model):
        # 0.4 * (ln 0.4 - (ln 0.4 + ln 0.2) / 2) = 0.2 * ln 2
        assert_allclose(score_tfidf(two_topic_model, 0, 0), 0.2 * LN2, atol=1e-15)
        assert_allclose(score_tfidf(two_topic_model, 1, 0), -0.1 * LN2, atol=1e-15)
        # equal probability in both topics scores exactly zero
        assert score_tfidf(two_topic_model, 0, 1) == 0.0

    def test_idf_frozen_value(self, two_topic_model, two_topic_vocab):
        # word 0: df 2 of 4 docs
        assert_allclose(score_idf(two_topic_model, two_topic_vocab, 0, 0),
                        0.4 * LN2, atol=1e-15)
        # word 1 appears everywhere: idf factor is exactly zero
        assert score_idf(two_topic_model, two_topic_vocab, 0, 1) == 0.0

    def test_out_of_range_indices(self, two_topic_model, two_topic_vocab):
        with pytest.raises(IndexError):
            score_orig(two_topic_model, 2, 0)
        with pytest.raises(IndexError):
            score_norm(two_topic_model, 0, 3)
        with pytest.raises(IndexError):
            score_idf(two_topic_model, two_topic_vocab, -1, 0)

    def test_tfidf_rejects_nonpositive_probability(self):
        phi = np.array([[0.5, 0.5], [0.5, 0.5]])
        theta = np.array([[0.5, 0.5]])
        model = import_model(phi, theta)
        model.phi[1, 0] = 0.0  # poke a hole past import validation
        with pytest.raises(ValueError, match="nonpositive"):
            score_tfidf(model, 0, 0)


class TestMethodScores:
    def test_matches_scalar_functions(self):
        rng = np.random.default_rng(21)
        model = random_model(rng)
        vocab = random_vocab(rng, model.vocab_size)
        scalar = {
            RankingMethod.ORIG: lambda t, w: score_orig(model, t, w),
            RankingMethod.NORM: lambda t, w: score_norm(model, t, w),
            RankingMethod.TFIDF: lambda t, w: score_tfidf(model, t, w),
            RankingMethod.IDF: lambda t, w: score_idf(model, vocab, t, w),
        }
        for method, fn in scalar.items():
            for t in range(model.num_topics):
                vec = method_scores(model, vocab, t, method)
                expected = [fn(t, w) for w in range(model.vocab_size)]
                assert_allclose(vec, expected, atol=1e-12)

    def test_tfidf_matches_geometric_mean_form(self):
        # independent oracle: p * ln(p / geometric mean of the column)
        rng = np.random.default_rng(22)
        model = random_model(rng, num_topics=4, vocab_size=30)
        vocab = random_vocab(rng, 30)
        for t in range(4):
            vec = method_scores(model, vocab, t, RankingMethod.TFIDF)
            gmean = np.exp(np.log(model.phi).mean(axis=0))
            expected = model.phi[t] * np.log(model.phi[t] / gmean)
            assert_allclose(vec, expected, atol=1e-12)

    def test_vocab_size_mismatch_rejected(self, two_topic_model):
        small = Vocabulary(words=["a"], doc_freq=[1], num_docs=2)
        with pytest.raises(ValueError, match="vocabulary"):
            method_scores(two_topic_model, small, 0, RankingMethod.ORIG)


class TestRerankTopic:
    def test_ties_break_by_ascending_word_id(self):
        phi = np.array([[0.3, 0.3, 0.2, 0.2]])
        theta = np.array([[1.0]])
        model = import_model(phi, theta)
        vocab = Vocabulary(words=["a", "b", "c", "d"], doc_freq=[1, 1, 1, 1],
                           num_docs=2)
        ranked = rerank_topic(model, vocab, 0, RankingMethod.ORIG, 4)
        assert [e.word_id for e in ranked.entries] == [0, 1, 2, 3]

    def test_orders_by_descending_score(self, two_topic_model, two_topic_vocab):
        ranked = rerank_topic(two_topic_model, two_topic_vocab, 0,
                              RankingMethod.ORIG, 3)
        assert ranked.words == ["alpha", "beta", "gamma"]
        scores = [e.score for e in ranked.entries]
        assert scores == sorted(scores, reverse=True)

    def test_n_larger_than_vocab_is_truncated(self, two_topic_model,
                                              two_topic_vocab):
        ranked = rerank_topic(two_topic_model, two_topic_vocab, 0,
                              RankingMethod.ORIG, 50)
        assert len(ranked.entries) == 3
        assert ranked.n == 50

    def test_n_below_one_rejected(self, two_topic_model, two_topic_vocab):
        with pytest.raises(ValueError):
            rerank_topic(two_topic_model, two_topic_vocab, 0,
                         RankingMethod.ORIG, 0)

    def test_single_topic_norm_and_tfidf_degenerate_to_id_order(self):
        rng = np.random.default_rng(30)
        phi = rng.dirichlet(np.ones(8), size=1)
        model = import_model(phi, np.array([[1.0], [1.0]]))
        vocab = random_vocab(rng, 8)
        # with one topic every norm score is 1 and every tfidf score is 0
        for method in (RankingMethod.NORM, RankingMethod.TFIDF):
            ranked = rerank_topic(model, vocab, 0, method, 8)
            assert [e.word_id for e in ranked.entries] == list(range(8))

    def test_constant_df_makes_idf_order_match_orig(self):
        rng = np.random.default_rng(31)
        model = random_model(rng, num_topics=3, vocab_size=20)
        vocab = Vocabulary(words=[f"w{chr(ord('a') + i)}" for i in range(20)],
                           doc_freq=[5] * 20, num_docs=50)
        for t in range(3):
            by_orig = rerank_topic(model, vocab, t, RankingMethod.ORIG, 20)
            by_idf = rerank_topic(model, vocab, t, RankingMethod.IDF, 20)
            assert [e.word_id for e in by_orig.entries] == \
                [e.word_id for e in by_idf.entries]

    def test_shared_filler_demoted_by_tfidf_and_idf(self):
        # a word prominent in every topic and every document tops the raw
        # ranking but must drop out under both discriminative scores
        specifics = np.array([0.24, 0.22, 0.2, 0.14])
        phi = np.zeros((2, 9))
        phi[0, :4] = specifics
        phi[1, 4:8] = specifics
        phi[:, 8] = 0.3  # filler word, strong everywhere
        phi = np.maximum(phi, 1e-12)
        phi /= phi.sum(axis=1, keepdims=True)
        model = import_model(phi, np.array([[0.5, 0.5]]))
        vocab = Vocabulary(words=list("abcdefgh") + ["filler"],
                           doc_freq=[10] * 8 + [40], num_docs=40)
        for t in range(2):
            orig_top = rerank_topic(model, vocab, t, RankingMethod.ORIG, 3).words
            assert "filler" in orig_top
            for method in (RankingMethod.TFIDF, RankingMethod.IDF):
                top = rerank_topic(model, vocab, t, method, 3).words
                assert "filler" not in top

    def test_rerank_all_covers_every_topic(self, two_topic_model,
                                           two_topic_vocab):
        ranked = rerank_all(two_topic_model, two_topic_vocab,
                            RankingMethod.NORM, 2)
        assert [r.topic_id for r in ranked] == [0, 1]
        assert all(r.method is RankingMethod.NORM for r in ranked)


class TestRankedTopicOutput:
    def test_to_dict_layout(self, two_topic_model, two_topic_vocab):
        ranked = rerank_topic(two_topic_model, two_topic_vocab, 1,
                              RankingMethod.IDF, 2)
        d = ranked.to_dict()
        assert d["topic_id"] == 1
        assert d["method"] == "idf"
        assert d["n"] == 2
        assert [w["word"] for w in d["words"]] == ranked.words
        assert all(isinstance(w["score"], float) for w in d["words"])

    def test_to_line_layout(self, two_topic_model, two_topic_vocab):
        ranked = rerank_topic(two_topic_model, two_topic_vocab, 0,
                              RankingMethod.ORIG, 2)
        assert ranked.to_line() == "0\torig\talpha beta"


class TestRankingMethod:
    def test_string_form(self):
        assert str(RankingMethod.ORIG) == "orig"
        assert RankingMethod("tfidf") is RankingMethod.TFIDF

    def test_declaration_order(self):
        assert [m.value for m in RankingMethod] == ["orig", "norm", "tfidf", "idf"]
