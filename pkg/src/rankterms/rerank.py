"""Re-rank the words of a topic under four scoring methods.

Topic models order words by raw in-topic probability, which favors
corpus-wide frequent words.  The alternative scores penalize words that
score well in many topics (``norm``, ``tfidf``) or appear in many
documents (``idf``), so that topic-specific words rise to the top.

All logarithms are natural.  Ties are broken by ascending word id, which
makes every ranking deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .corpus import Vocabulary
from .model import TopicModel


class RankingMethod(Enum):
    # declaration order is the canonical report order
    ORIG = "orig"
    NORM = "norm"
    TFIDF = "tfidf"
    IDF = "idf"

    def __str__(self) -> str:
        return self.value


def _check_indices(model: TopicModel, topic: int, word: int) -> None:
    if not 0 <= topic < model.num_topics:
        raise IndexError(f"topic {topic} out of range [0, {model.num_topics})")
    if not 0 <= word < model.vocab_size:
        raise IndexError(f"word {word} out of range [0, {model.vocab_size})")


def score_orig(model: TopicModel, topic: int, word: int) -> float:
    """The word's probability under the topic, unchanged."""
    _check_indices(model, topic, word)
    return float(model.phi[topic, word])


def score_norm(model: TopicModel, topic: int, word: int) -> float:
    """In-topic probability as a fraction of the word's mass over all topics."""
    _check_indices(model, topic, word)
    column = model.phi[:, word]
    return float(model.phi[topic, word] / column.sum())


def score_tfidf(model: TopicModel, topic: int, word: int) -> float:
    """Probability times log-ratio to the word's geometric mean over topics.

    Computed in log space: p * (ln p - mean_j ln p_j).  Requires strictly
    positive probabilities, which smoothed estimates guarantee.
    """
    _check_indices(model, topic, word)
    column = model.phi[:, word]
    if np.any(column <= 0):
        raise ValueError(f"word {word} has nonpositive probability in some topic")
    p = float(model.phi[topic, word])
    return p * (math.log(p) - float(np.mean(np.log(column))))


def score_idf(model: TopicModel, vocab: Vocabulary, topic: int, word: int) -> float:
    """Probability times log inverse document frequency of the word."""
    _check_indices(model, topic, word)
    if not 0 <= word < len(vocab):
        raise IndexError(f"word {word} not in vocabulary of size {len(vocab)}")
    df = vocab.doc_freq[word]
    return float(model.phi[topic, word]) * math.log(vocab.num_docs / df)


def method_scores(
    model: TopicModel,
    vocab: Vocabulary,
    topic: int,
    method: RankingMethod,
) -> np.ndarray:
    """Scores of every vocabulary word for one topic, as a (V,) array."""
    if not 0 <= topic < model.num_topics:
        raise IndexError(f"topic {topic} out of range [0, {model.num_topics})")
    if len(vocab) != model.vocab_size:
        raise ValueError(
            f"vocabulary has {len(vocab)} words but model expects {model.vocab_size}"
        )
    phi_t = model.phi[topic]
    if method is RankingMethod.ORIG:
        return phi_t.copy()
    if method is RankingMethod.NORM:
        return phi_t / model.phi.sum(axis=0)
    if method is RankingMethod.TFIDF:
        logs = np.log(model.phi)
        return phi_t * (logs[topic] - logs.mean(axis=0))
    if method is RankingMethod.IDF:
        df = np.array(vocab.doc_freq, dtype=np.float64)
        return phi_t * np.log(vocab.num_docs / df)
    raise ValueError(f"unknown ranking method: {method!r}")


@dataclass(frozen=True)
class RankedWord:
    word_id: int
    word: str
    score: float


@dataclass(frozen=True)
class RankedTopic:
    topic_id: int
    method: RankingMethod
    n: int  # requested size; len(entries) == min(n, V)
    entries: tuple[RankedWord, ...]

    @property
    def words(self) -> list[str]:
        return [e.word for e in self.entries]

    def to_dict(self) -> dict:
        return {
            "topic_id": self.topic_id,
            "method": self.method.value,
            "n": self.n,
            "words": [{"word": e.word, "score": e.score} for e in self.entries],
        }

    def to_line(self) -> str:
        return f"{self.topic_id}\t{self.method.value}\t{' '.join(self.words)}"


def rerank_topic(
    model: TopicModel,
    vocab: Vocabulary,
    topic: int,
    method: RankingMethod,
    n: int,
) -> RankedTopic:
    """Top-n words of a topic under one method, ties broken by word id."""
    if n < 1:
        raise ValueError("n must be >= 1")
    scores = method_scores(model, vocab, topic, method)
    vocab_size = scores.shape[0]
    # lexsort's last key is primary: sort by -score, then ascending word id
    order = np.lexsort((np.arange(vocab_size), -scores))[: min(n, vocab_size)]
    entries = tuple(
        RankedWord(word_id=int(w), word=vocab.words[int(w)], score=float(scores[w]))
        for w in order
    )
    return RankedTopic(topic_id=topic, method=method, n=n, entries=entries)


def rerank_all(
    model: TopicModel,
    vocab: Vocabulary,
    method: RankingMethod,
    n: int,
) -> list[RankedTopic]:
    return [rerank_topic(model, vocab, t, method, n) for t in range(model.num_topics)]
