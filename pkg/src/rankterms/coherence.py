"""Topic coherence from corpus co-occurrence statistics.

Coherence scores a topic's top words by how strongly they co-occur in the
reference collection, here the training corpus itself.  Two pairwise
association metrics are provided: NPMI (normalized into [-1, 1]) and the
un-normalized UCI PMI.  A topic's coherence is the mean over all unordered
pairs of its words; a model's coherence is the mean over its topics, each
represented by its top-n words under the plain probability ordering.  The
topic count can be selected by maximizing that mean across candidates.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .corpus import Corpus
from .model import GibbsConfig, TopicModel, train_lda

EPSILON = 1e-12  # keeps log arguments positive; preserves the -1 bound within 1e-6

METRICS = ("npmi", "uci")
DEFAULT_TOP_N = 10


@dataclass
class CoocStats:
    """Boolean occurrence counts over text windows.

    ``window_size`` is either the string ``"document"`` (each document is
    one window) or the sliding-window length used.  Probabilities are
    window counts divided by ``num_windows``.
    """

    window_size: int | str
    num_windows: int
    single_counts: np.ndarray  # (V,) windows containing each word
    pair_counts: dict[tuple[int, int], int]  # keyed (min_id, max_id)

    def _check(self, word: int) -> None:
        if not 0 <= word < self.single_counts.shape[0]:
            raise IndexError(
                f"word {word} out of range [0, {self.single_counts.shape[0]})"
            )

    def p_single(self, word: int) -> float:
        self._check(word)
        return float(self.single_counts[word]) / self.num_windows

    def p_pair(self, w1: int, w2: int) -> float:
        self._check(w1)
        self._check(w2)
        if w1 == w2:
            return self.p_single(w1)
        key = (w1, w2) if w1 < w2 else (w2, w1)
        return self.pair_counts.get(key, 0) / self.num_windows


def _windows(tokens: Sequence[int], size: int) -> Iterable[Sequence[int]]:
    if len(tokens) <= size:
        yield tokens
    else:
        for i in range(len(tokens) - size + 1):
            yield tokens[i : i + size]


def build_cooc(corpus: Corpus, window: int | str = "document") -> CoocStats:
    """Count word and word-pair occurrences over windows of the corpus.

    ``window="document"`` treats each document (empty ones included) as a
    single window.  An integer window slides over each document's token
    sequence; documents shorter than the window form one window, empty
    documents none.  Occurrence within a window is boolean.
    """
    vocab_size = len(corpus.vocab)
    single = np.zeros(vocab_size, dtype=np.int64)
    pairs: dict[tuple[int, int], int] = {}

    if window == "document":
        num_windows = corpus.num_docs
        windows: Iterable[Sequence[int]] = (d.tokens for d in corpus.docs)
    elif isinstance(window, int) and not isinstance(window, bool):
        if window < 2:
            raise ValueError(f"sliding window must be >= 2, got {window}")
        num_windows = sum(
            max(len(d.tokens) - window + 1, 1) if d.tokens else 0
            for d in corpus.docs
        )
        windows = (
            w for d in corpus.docs if d.tokens for w in _windows(d.tokens, window)
        )
    else:
        raise ValueError(f"window must be 'document' or an integer >= 2, got {window!r}")

    for win in windows:
        present = sorted(set(win))
        for i, w1 in enumerate(present):
            single[w1] += 1
            for w2 in present[i + 1 :]:
                key = (w1, w2)
                pairs[key] = pairs.get(key, 0) + 1

    if num_windows == 0:
        raise ValueError("corpus yields zero windows")
    return CoocStats(
        window_size=window,
        num_windows=num_windows,
        single_counts=single,
        pair_counts=pairs,
    )


def _checked_probs(stats: CoocStats, w1: int, w2: int) -> tuple[float, float, float]:
    p1 = stats.p_single(w1)
    p2 = stats.p_single(w2)
    if p1 == 0.0 or p2 == 0.0:
        missing = w1 if p1 == 0.0 else w2
        raise ValueError(f"word {missing} never occurs; probability undefined")
    return p1, p2, stats.p_pair(w1, w2)


def uci_pmi(stats: CoocStats, w1: int, w2: int) -> float:
    """Pointwise mutual information with epsilon smoothing inside the log."""
    p1, p2, pp = _checked_probs(stats, w1, w2)
    return math.log((pp + EPSILON) / (p1 * p2))


def npmi(stats: CoocStats, w1: int, w2: int) -> float:
    """PMI normalized by -ln p_pair, clamped into [-1, 1]."""
    p1, p2, pp = _checked_probs(stats, w1, w2)
    value = math.log((pp + EPSILON) / (p1 * p2)) / -math.log(pp + EPSILON)
    return max(-1.0, min(1.0, value))


_METRIC_FUNCS = {"npmi": npmi, "uci": uci_pmi}


def topic_coherence(stats: CoocStats, words: Sequence[int], metric: str = "npmi") -> float:
    """Mean pairwise association over all unordered pairs of distinct words."""
    if metric not in _METRIC_FUNCS:
        raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")
    ids = sorted(set(words))
    if len(ids) < 2:
        raise ValueError(f"need at least 2 distinct words, got {len(ids)}")
    func = _METRIC_FUNCS[metric]
    total = 0.0
    count = 0
    for i, w1 in enumerate(ids):
        for w2 in ids[i + 1 :]:
            total += func(stats, w1, w2)
            count += 1
    return total / count


def _top_words_by_probability(model: TopicModel, topic: int, top_n: int) -> list[int]:
    phi_t = model.phi[topic]
    order = np.lexsort((np.arange(phi_t.shape[0]), -phi_t))
    return [int(w) for w in order[:top_n]]


def topic_coherences(
    model: TopicModel,
    stats: CoocStats,
    top_n: int = DEFAULT_TOP_N,
    metric: str = "npmi",
) -> list[float]:
    """Per-topic coherence of each topic's top-n most probable words."""
    if top_n < 2:
        raise ValueError("top_n must be >= 2")
    return [
        topic_coherence(stats, _top_words_by_probability(model, t, top_n), metric)
        for t in range(model.num_topics)
    ]


def model_coherence(
    model: TopicModel,
    stats: CoocStats,
    top_n: int = DEFAULT_TOP_N,
    metric: str = "npmi",
) -> float:
    """Mean coherence over all topics."""
    values = topic_coherences(model, stats, top_n=top_n, metric=metric)
    return sum(values) / len(values)


def coherence_by_count(
    corpus: Corpus,
    candidate_ts: Sequence[int],
    cfg_template: GibbsConfig,
    stats: CoocStats | None = None,
    metric: str = "npmi",
    top_n: int = DEFAULT_TOP_N,
) -> dict[int, float]:
    """Train one model per candidate topic count and score each."""
    if not candidate_ts:
        raise ValueError("no candidate topic counts given")
    if stats is None:
        stats = build_cooc(corpus)
    result: dict[int, float] = {}
    for t in sorted(set(candidate_ts)):
        cfg = dataclasses.replace(cfg_template, num_topics=t)
        model = train_lda(corpus, cfg)
        result[t] = model_coherence(model, stats, top_n=top_n, metric=metric)
    return result


def select_topic_count(
    corpus: Corpus,
    candidate_ts: Sequence[int],
    cfg_template: GibbsConfig,
    stats: CoocStats | None = None,
    metric: str = "npmi",
    top_n: int = DEFAULT_TOP_N,
) -> int:
    """The candidate with maximal mean coherence; ties go to the smallest."""
    scores = coherence_by_count(corpus, candidate_ts, cfg_template, stats, metric, top_n)
    best_t, best_value = None, -math.inf
    for t in sorted(scores):  # ascending, so strict improvement keeps smallest tie
        if scores[t] > best_value:
            best_t, best_value = t, scores[t]
    assert best_t is not None
    return best_t
