"""Inverted index with BM25 ranked retrieval.

The index maps word ids to postings lists of (document ordinal, term
frequency).  Scoring uses the BM25 variant with a nonnegative idf,
``ln(1 + (N - df + 0.5)/(df + 0.5))``, and defaults k1=1.2, b=0.75.
Queries are bags of distinct word ids; duplicate terms are collapsed and
terms outside the vocabulary are dropped, which can leave a query empty.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from math import log
from typing import IO, Sequence

from .corpus import Corpus, Vocabulary


@dataclass(frozen=True)
class BM25Params:
    k1: float = 1.2
    b: float = 0.75

    def __post_init__(self) -> None:
        if self.k1 < 0:
            raise ValueError("k1 must be >= 0")
        if not 0 <= self.b <= 1:
            raise ValueError("b must be in [0, 1]")


DEFAULT_PARAMS = BM25Params()
DEFAULT_DEPTH = 1000


@dataclass
class InvertedIndex:
    postings: dict[int, list[tuple[int, int]]]  # word id -> [(ordinal, tf)], sorted
    doc_len: list[int]
    avg_doc_len: float
    num_docs: int
    doc_ids: list[str]  # ordinal -> external document id

    def doc_freq(self, term: int) -> int:
        return len(self.postings.get(term, ()))


def build_index(corpus: Corpus) -> InvertedIndex:
    """Index every document, empty ones included (they affect avg_doc_len)."""
    postings: dict[int, list[tuple[int, int]]] = {}
    doc_len = []
    for ordinal, doc in enumerate(corpus.docs):
        doc_len.append(len(doc.tokens))
        counts: dict[int, int] = {}
        for t in doc.tokens:
            counts[t] = counts.get(t, 0) + 1
        for term in sorted(counts):
            postings.setdefault(term, []).append((ordinal, counts[term]))
    num_docs = corpus.num_docs
    return InvertedIndex(
        postings=postings,
        doc_len=doc_len,
        avg_doc_len=sum(doc_len) / num_docs,
        num_docs=num_docs,
        doc_ids=[d.id for d in corpus.docs],
    )


@dataclass(frozen=True)
class Query:
    """Distinct in-vocabulary word ids plus the ranking that produced them."""

    terms: tuple[int, ...]
    source: tuple[int, str, int] | None = None  # (topic_id, method, n)

    @property
    def is_empty(self) -> bool:
        return not self.terms

    @classmethod
    def from_terms(
        cls,
        terms: Sequence[int],
        vocab_size: int,
        source: tuple[int, str, int] | None = None,
    ) -> Query:
        kept: list[int] = []
        seen: set[int] = set()
        for t in terms:
            if 0 <= t < vocab_size and t not in seen:
                kept.append(t)
                seen.add(t)
        return cls(terms=tuple(kept), source=source)

    @classmethod
    def from_words(
        cls,
        words: Sequence[str],
        vocab: Vocabulary,
        source: tuple[int, str, int] | None = None,
    ) -> Query:
        ids = [vocab.word_ids[w] for w in words if w in vocab.word_ids]
        return cls.from_terms(ids, len(vocab), source=source)


def idf(index: InvertedIndex, term: int) -> float:
    """Nonnegative inverse document frequency of a term."""
    df = index.doc_freq(term)
    return log(1.0 + (index.num_docs - df + 0.5) / (df + 0.5))


def _tf_in_doc(index: InvertedIndex, term: int, doc: int) -> int:
    plist = index.postings.get(term)
    if not plist:
        return 0
    i = bisect_left(plist, (doc,))
    if i < len(plist) and plist[i][0] == doc:
        return plist[i][1]
    return 0


def _tf_weight(tf: int, doc_len: int, index: InvertedIndex, params: BM25Params) -> float:
    norm = 1.0 - params.b + params.b * doc_len / index.avg_doc_len
    return tf * (params.k1 + 1.0) / (tf + params.k1 * norm)


def bm25_score(
    index: InvertedIndex,
    query: Query,
    doc: int,
    params: BM25Params = DEFAULT_PARAMS,
) -> float:
    """Sum of idf-weighted term-frequency contributions over query terms."""
    if not 0 <= doc < index.num_docs:
        raise IndexError(f"document ordinal {doc} out of range [0, {index.num_docs})")
    score = 0.0
    for term in query.terms:
        tf = _tf_in_doc(index, term, doc)
        if tf:
            score += idf(index, term) * _tf_weight(tf, index.doc_len[doc], index, params)
    return score


def search(
    index: InvertedIndex,
    query: Query,
    k: int = DEFAULT_DEPTH,
    params: BM25Params = DEFAULT_PARAMS,
) -> list[tuple[str, float]]:
    """Top-k matching documents as (doc_id, score), best first.

    Only documents with positive score are returned; ties are broken by
    document ordinal.  An empty query yields an empty result.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if query.is_empty:
        return []
    # term-at-a-time accumulation in query order: addition order per document
    # matches bm25_score exactly, so results agree with brute force bitwise
    scores: dict[int, float] = {}
    for term in query.terms:
        plist = index.postings.get(term)
        if not plist:
            continue
        term_idf = idf(index, term)
        for ordinal, tf in plist:
            w = term_idf * _tf_weight(tf, index.doc_len[ordinal], index, params)
            scores[ordinal] = scores.get(ordinal, 0.0) + w
    ranked = sorted(
        ((o, s) for o, s in scores.items() if s > 0.0),
        key=lambda item: (-item[1], item[0]),
    )[:k]
    return [(index.doc_ids[o], s) for o, s in ranked]


def write_run(
    out: IO[str],
    qid: str,
    results: Sequence[tuple[str, float]],
    tag: str = "rankterms",
) -> None:
    """Append one query's results in standard run-file format."""
    for rank, (doc_id, score) in enumerate(results, start=1):
        out.write(f"{qid} Q0 {doc_id} {rank} {repr(float(score))} {tag}\n")
