"""Co-occurrence counting, pairwise association metrics and topic selection."""

from __future__ import annotations

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

import rankterms.coherence as coherence_mod
from rankterms import (
    GibbsConfig,
    RawDocument,
    build_cooc,
    build_corpus,
    coherence_by_count,
    import_model,
    model_coherence,
    npmi,
    select_topic_count,
    topic_coherence,
    topic_coherences,
    uci_pmi,
)
from rankterms.coherence import CoocStats
from rankterms.corpus import Corpus, Document, Vocabulary


@pytest.fixture
def small_corpus():
    # vocabulary sorts to bird=0, cat=1, dog=2
    docs = [
        RawDocument("d0", "cat dog"),
        RawDocument("d1", "cat dog bird"),
        RawDocument("d2", "cat"),
    ]
    return build_corpus(docs, min_df=1, max_df_ratio=1.0)


def manual_stats(num_windows, singles, pairs):
    return CoocStats(
        window_size="document",
        num_windows=num_windows,
        single_counts=np.array(singles, dtype=np.int64),
        pair_counts=dict(pairs),
    )


class TestBuildCooc:
    def test_document_window_counts(self, small_corpus):
        stats = build_cooc(small_corpus)
        assert stats.num_windows == 3
        assert stats.single_counts.tolist() == [1, 3, 2]
        assert stats.pair_counts == {(0, 1): 1, (0, 2): 1, (1, 2): 2}

    def test_document_windows_include_empty_docs(self):
        docs = [RawDocument("a", "cat dog"), RawDocument("b", "the"),
                RawDocument("c", "cat")]
        corpus = build_corpus(docs, stopwords={"the"}, min_df=1, max_df_ratio=1.0)
        stats = build_cooc(corpus)
        assert stats.num_windows == 3

    def test_sliding_window_counts(self):
        # doc A has 4 tokens (3 windows of 2), doc B has 2 (one window),
        # doc C is empty (no windows)
        docs = [RawDocument("A", "aa bb cc dd"), RawDocument("B", "aa bb"),
                RawDocument("C", "")]
        corpus = build_corpus(docs, min_df=1, max_df_ratio=1.0)
        stats = build_cooc(corpus, window=2)
        assert stats.window_size == 2
        assert stats.num_windows == 4
        assert stats.single_counts.tolist() == [2, 3, 2, 1]
        assert stats.pair_counts == {(0, 1): 2, (1, 2): 1, (2, 3): 1}

    def test_short_document_is_one_window(self):
        docs = [RawDocument("a", "xx yy")]
        corpus = build_corpus(docs, min_df=1, max_df_ratio=1.0)
        stats = build_cooc(corpus, window=5)
        assert stats.num_windows == 1
        assert stats.pair_counts == {(0, 1): 1}

    def test_repeated_word_counts_once_per_window(self):
        docs = [RawDocument("a", "cat cat cat dog")]
        corpus = build_corpus(docs, min_df=1, max_df_ratio=1.0)
        stats = build_cooc(corpus)
        assert stats.single_counts.tolist() == [1, 1]
        assert stats.pair_counts == {(0, 1): 1}

    def test_window_validation(self, small_corpus):
        with pytest.raises(ValueError, match=">= 2"):
            build_cooc(small_corpus, window=1)
        with pytest.raises(ValueError):
            build_cooc(small_corpus, window=True)
        with pytest.raises(ValueError):
            build_cooc(small_corpus, window="paragraph")

    def test_zero_windows_rejected(self):
        corpus = Corpus(
            docs=[Document("a", [])],
            vocab=Vocabulary(words=["x"], doc_freq=[0], num_docs=1),
        )
        with pytest.raises(ValueError, match="zero windows"):
            build_cooc(corpus, window=2)


class TestCoocStats:
    def test_self_pair_equals_single(self, small_corpus):
        stats = build_cooc(small_corpus)
        assert stats.p_pair(1, 1) == stats.p_single(1)

    def test_pair_is_symmetric(self, small_corpus):
        stats = build_cooc(small_corpus)
        assert stats.p_pair(0, 2) == stats.p_pair(2, 0)

    def test_out_of_range_word(self, small_corpus):
        stats = build_cooc(small_corpus)
        with pytest.raises(IndexError):
            stats.p_single(3)
        with pytest.raises(IndexError):
            stats.p_pair(0, -1)


class TestMetrics:
    def test_independent_words_score_zero(self):
        # p1 = p2 = 1/2, p_pair = 1/4: exactly the independence point
        stats = manual_stats(4, [2, 2], {(0, 1): 1})
        assert_allclose(npmi(stats, 0, 1), 0.0, atol=1e-9)
        assert_allclose(uci_pmi(stats, 0, 1), 0.0, atol=1e-9)

    def test_perfect_cooccurrence_scores_one(self):
        stats = manual_stats(4, [2, 2], {(0, 1): 2})
        assert_allclose(npmi(stats, 0, 1), 1.0, atol=1e-9)
        assert_allclose(uci_pmi(stats, 0, 1), math.log(2), atol=1e-9)

    def test_never_together_with_ubiquitous_words_hits_floor(self):
        # both words in every window yet never the pair: the normalized
        # score lands exactly on the -1 clamp boundary
        stats = manual_stats(4, [4, 4], {})
        assert npmi(stats, 0, 1) == -1.0

    def test_disjoint_words_score_strongly_negative(self):
        stats = manual_stats(4, [2, 2], {})
        value = npmi(stats, 0, 1)
        assert -1.0 <= value < -0.9
        assert uci_pmi(stats, 0, 1) < -20  # raw log of epsilon over 1/4

    def test_hand_counted_corpus_values(self, small_corpus):
        stats = build_cooc(small_corpus)
        # bird and dog share 1 of 3 windows; p(bird)=1/3, p(dog)=2/3
        assert_allclose(uci_pmi(stats, 0, 2), math.log(1.5), atol=1e-9)
        assert_allclose(npmi(stats, 0, 2), math.log(1.5) / math.log(3), atol=1e-9)
        # cat occurs everywhere, so dog states nothing new: pmi 0
        assert_allclose(npmi(stats, 1, 2), 0.0, atol=1e-6)

    def test_npmi_is_clamped(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            n = int(rng.integers(2, 20))
            singles = rng.integers(1, n + 1, size=3)
            pair = int(rng.integers(0, min(singles[0], singles[1]) + 1))
            stats = manual_stats(n, singles, {(0, 1): pair} if pair else {})
            assert -1.0 <= npmi(stats, 0, 1) <= 1.0

    def test_missing_word_rejected(self):
        stats = manual_stats(4, [0, 2], {})
        with pytest.raises(ValueError, match="never occurs"):
            npmi(stats, 0, 1)


class TestTopicCoherence:
    def test_mean_over_unordered_pairs(self, small_corpus):
        stats = build_cooc(small_corpus)
        expected = (npmi(stats, 0, 1) + npmi(stats, 0, 2) + npmi(stats, 1, 2)) / 3
        assert topic_coherence(stats, [0, 1, 2]) == expected

    def test_duplicates_and_order_do_not_matter(self, small_corpus):
        stats = build_cooc(small_corpus)
        base = topic_coherence(stats, [0, 1, 2])
        assert topic_coherence(stats, [2, 0, 1, 0, 2]) == base

    def test_metric_selects_function(self, small_corpus):
        stats = build_cooc(small_corpus)
        expected = (uci_pmi(stats, 0, 1) + uci_pmi(stats, 0, 2)
                    + uci_pmi(stats, 1, 2)) / 3
        assert topic_coherence(stats, [0, 1, 2], metric="uci") == expected
        with pytest.raises(ValueError, match="metric"):
            topic_coherence(stats, [0, 1], metric="umass")

    def test_needs_two_distinct_words(self, small_corpus):
        stats = build_cooc(small_corpus)
        with pytest.raises(ValueError, match="distinct"):
            topic_coherence(stats, [1, 1])

    def test_theme_pure_set_beats_mixed_set(self):
        docs = [RawDocument(f"a{i}", "ant ape asp auk") for i in range(10)]
        docs += [RawDocument(f"b{i}", "bat bee boa bug") for i in range(10)]
        corpus = build_corpus(docs, min_df=1, max_df_ratio=1.0)
        stats = build_cooc(corpus)
        pure = topic_coherence(stats, [0, 1, 2, 3])
        mixed = topic_coherence(stats, [0, 1, 4, 5])
        assert pure > mixed
        assert_allclose(pure, 1.0, atol=1e-6)


class TestModelCoherence:
    def test_scores_top_words_by_probability(self, small_corpus):
        stats = build_cooc(small_corpus)
        # topic 0 tops out at (cat, dog); topic 1 at (bird, cat)
        phi = np.array([[0.1, 0.5, 0.4], [0.5, 0.3, 0.2]])
        model = import_model(phi, np.array([[0.5, 0.5]]))
        values = topic_coherences(model, stats, top_n=2)
        assert_allclose(values, [npmi(stats, 1, 2), npmi(stats, 0, 1)],
                        atol=1e-12)
        assert model_coherence(model, stats, top_n=2) == sum(values) / 2

    def test_top_n_validation(self, small_corpus):
        stats = build_cooc(small_corpus)
        model = import_model(np.array([[0.4, 0.3, 0.3]]), np.array([[1.0]]))
        with pytest.raises(ValueError, match="top_n"):
            topic_coherences(model, stats, top_n=1)


class TestTopicCountSelection:
    def test_two_clean_themes_prefer_two_topics(self):
        words_a = "ant ape asp auk axe ash awl aye arc arm"
        words_b = "bat bee boa bug bun bid bow bay bit bog"
        docs = [RawDocument(f"a{i}", words_a) for i in range(20)]
        docs += [RawDocument(f"b{i}", words_b) for i in range(20)]
        corpus = build_corpus(docs, min_df=1, max_df_ratio=1.0)
        cfg = GibbsConfig(num_topics=2, alpha=0.1, iterations=30, seed=0)
        scores = coherence_by_count(corpus, [2, 8], cfg, top_n=5)
        assert set(scores) == {2, 8}
        assert scores[2] > scores[8]
        assert select_topic_count(corpus, [2, 8], cfg, top_n=5) == 2

    def test_ties_go_to_smallest_candidate(self, small_corpus, monkeypatch):
        def fake_scores(corpus, candidate_ts, cfg_template, stats=None,
                        metric="npmi", top_n=10):
            return {2: 0.5, 5: 0.5, 10: 0.4}

        monkeypatch.setattr(coherence_mod, "coherence_by_count", fake_scores)
        cfg = GibbsConfig(num_topics=2)
        assert select_topic_count(small_corpus, [10, 5, 2], cfg) == 2

    def test_maximum_wins(self, small_corpus, monkeypatch):
        def fake_scores(corpus, candidate_ts, cfg_template, stats=None,
                        metric="npmi", top_n=10):
            return {2: 0.1, 5: 0.7, 10: 0.4}

        monkeypatch.setattr(coherence_mod, "coherence_by_count", fake_scores)
        cfg = GibbsConfig(num_topics=2)
        assert select_topic_count(small_corpus, [2, 5, 10], cfg) == 5

    def test_candidates_deduplicated(self, small_corpus):
        cfg = GibbsConfig(num_topics=2, iterations=2, seed=0)
        scores = coherence_by_count(small_corpus, [2, 3, 2], cfg, top_n=2)
        assert sorted(scores) == [2, 3]

    def test_empty_candidates_rejected(self, small_corpus):
        with pytest.raises(ValueError, match="candidate"):
            coherence_by_count(small_corpus, [], GibbsConfig(num_topics=2))
