"""Retrieval-based evaluation of topic-word rankings.

Each human-assigned gold label is mapped to the model topic whose summed
document-topic mass over the label's documents is largest.  That topic's
top-n words under each ranking method form a query; BM25 retrieval is
scored with average precision against all documents carrying the label.
Mean average precision per (method, n) cell measures how well each ranking
describes the topics.  A Pearson correlation utility supports comparing
result vectors (e.g. MAP against externally collected human scores).
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import Corpus, Document, Vocabulary
from .index import (
    DEFAULT_DEPTH,
    DEFAULT_PARAMS,
    BM25Params,
    InvertedIndex,
    Query,
    search,
    write_run,
)
from .model import TopicModel
from .rerank import RankingMethod, rerank_topic

LOG_BASE = "e"  # every logarithm in the pipeline is natural


@dataclass(frozen=True)
class GoldLabelSet:
    """A gold label and the ids of all documents carrying it."""

    label: str
    doc_ids: frozenset[str]

    def __post_init__(self) -> None:
        if not self.doc_ids:
            raise ValueError(f"gold label {self.label!r} has no documents")


def truncate_labels(labels: Sequence[str], depth: int, separator: str = "/") -> list[str]:
    """Cut each hierarchical label to its first ``depth`` segments."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    return [separator.join(label.split(separator)[:depth]) for label in labels]


def with_truncated_labels(corpus: Corpus, depth: int, separator: str = "/") -> Corpus:
    """A corpus whose document labels are truncated (duplicates dropped)."""
    docs = [
        Document(
            id=d.id,
            tokens=d.tokens,
            labels=sorted(set(truncate_labels(d.labels, depth, separator))),
        )
        for d in corpus.docs
    ]
    return Corpus(docs=docs, vocab=corpus.vocab)


def select_top_gold(corpus: Corpus, k: int) -> list[GoldLabelSet]:
    """The k labels covering the most documents; ties broken alphabetically.

    A document counts toward every label it carries.  If fewer than k
    distinct labels exist, all are returned with a warning.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    by_label: dict[str, set[str]] = {}
    for doc in corpus.docs:
        for label in doc.labels:
            by_label.setdefault(label, set()).add(doc.id)
    if not by_label:
        raise ValueError("corpus has no labelled documents")
    ranked = sorted(by_label.items(), key=lambda kv: (-len(kv[1]), kv[0]))
    if len(ranked) < k:
        warnings.warn(
            f"only {len(ranked)} distinct labels available, fewer than the "
            f"requested {k}; returning all",
            stacklevel=2,
        )
    return [
        GoldLabelSet(label=label, doc_ids=frozenset(ids))
        for label, ids in ranked[:k]
    ]


def map_gold_to_topic(
    model: TopicModel,
    gold: GoldLabelSet,
    doc_ordinals: Mapping[str, int],
) -> int:
    """Topic with the largest summed topic mass over the gold documents.

    Ties resolve to the smallest topic id.
    """
    sums = [0.0] * model.num_topics
    for doc_id in sorted(gold.doc_ids):
        ordinal = doc_ordinals.get(doc_id)
        if ordinal is None:
            raise ValueError(f"gold document {doc_id!r} is not in the model")
        row = model.theta[ordinal]
        for t in range(model.num_topics):
            sums[t] += float(row[t])
    best = 0
    for t in range(1, model.num_topics):
        if sums[t] > sums[best]:
            best = t
    return best


def average_precision(ranked: Sequence[str], relevant: frozenset[str] | set[str]) -> float:
    """Mean precision at the rank of each relevant hit, over all relevant docs.

    Relevant documents never retrieved contribute zero.
    """
    if not relevant:
        raise ValueError("relevant set is empty")
    hits = 0
    total = 0.0
    for position, doc_id in enumerate(ranked, start=1):
        if doc_id in relevant:
            hits += 1
            total += hits / position
    return total / len(relevant)


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient."""
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} vs {len(ys)}")
    n = len(xs)
    if n < 2:
        raise ValueError("need at least 2 points")
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    dx = [x - mean_x for x in xs]
    dy = [y - mean_y for y in ys]
    var_x = sum(d * d for d in dx)
    var_y = sum(d * d for d in dy)
    if var_x == 0.0 or var_y == 0.0:
        raise ValueError("zero variance; correlation undefined")
    return sum(a * b for a, b in zip(dx, dy)) / math.sqrt(var_x * var_y)


@dataclass(frozen=True)
class LabelResult:
    label: str
    qid: str
    topic_id: int
    num_relevant: int
    average_precision: float
    empty_query: bool = False


@dataclass(frozen=True)
class CellResult:
    method: RankingMethod
    n: int
    results: tuple[LabelResult, ...]  # ordered by label ascending

    @property
    def mean_average_precision(self) -> float:
        return sum(r.average_precision for r in self.results) / len(self.results)


@dataclass
class EvalReport:
    cells: list[CellResult]  # method-major, then n, in requested order
    metadata: dict
    warnings: list[str] = field(default_factory=list)

    def cell(self, method: RankingMethod, n: int) -> CellResult:
        for c in self.cells:
            if c.method is method and c.n == n:
                return c
        raise KeyError(f"no cell for ({method}, {n})")

    def to_dict(self) -> dict:
        return {
            "metadata": self.metadata,
            "cells": [
                {
                    "method": c.method.value,
                    "n": c.n,
                    "map": c.mean_average_precision,
                    "results": [
                        {
                            "label": r.label,
                            "qid": r.qid,
                            "topic_id": r.topic_id,
                            "num_relevant": r.num_relevant,
                            "average_precision": r.average_precision,
                            "empty_query": r.empty_query,
                        }
                        for r in c.results
                    ],
                }
                for c in self.cells
            ],
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_table(self) -> str:
        """Plain-text MAP table: one row per n, one column per method."""
        methods: list[RankingMethod] = []
        ns: list[int] = []
        for c in self.cells:
            if c.method not in methods:
                methods.append(c.method)
            if c.n not in ns:
                ns.append(c.n)
        lines = ["MAP by ranking method and query length"]
        header = f"{'n':>4}" + "".join(f"{m.value:>10}" for m in methods)
        lines.append(header)
        for n in ns:
            cells = {c.method: c for c in self.cells if c.n == n}
            row = f"{n:>4}" + "".join(
                f"{cells[m].mean_average_precision:>10.4f}" if m in cells else f"{'-':>10}"
                for m in methods
            )
            lines.append(row)
        return "\n".join(lines) + "\n"


def _eval_cell_query(
    index: InvertedIndex,
    query: Query,
    relevant: frozenset[str],
    k: int,
    params: BM25Params,
) -> tuple[float, list[tuple[str, float]], bool]:
    """AP and run results for one query; empty queries score 0."""
    if query.is_empty:
        return 0.0, [], True
    results = search(index, query, k=k, params=params)
    ap = average_precision([doc_id for doc_id, _ in results], relevant)
    return ap, results, False


def _qid_for(position: int, total: int) -> str:
    width = max(3, len(str(total)))
    return f"q{position:0{width}d}"


def write_qrels(out, golds: Sequence[GoldLabelSet], qids: Mapping[str, str]) -> None:
    """Write relevance judgments, one `qid 0 doc_id 1` line per pair."""
    for gold in golds:
        qid = qids[gold.label]
        for doc_id in sorted(gold.doc_ids):
            out.write(f"{qid} 0 {doc_id} 1\n")


def run_ir_eval(
    corpus: Corpus,
    model: TopicModel,
    vocab: Vocabulary,
    index: InvertedIndex,
    golds: Sequence[GoldLabelSet],
    methods: Sequence[RankingMethod] = tuple(RankingMethod),
    ns: Sequence[int] = (5, 10, 20),
    k: int = DEFAULT_DEPTH,
    params: BM25Params = DEFAULT_PARAMS,
    run_dir: str | Path | None = None,
) -> EvalReport:
    """Evaluate every (method, n) cell over the gold labels.

    For each label: map it to a topic, rank that topic's words under the
    method, use the top n as a query, retrieve to depth k, and score
    average precision against the label's documents.  When ``run_dir`` is
    given, run files (one per cell) and a qrels file are written there.
    """
    if len(vocab) != model.vocab_size:
        raise ValueError(
            f"vocabulary size {len(vocab)} does not match model ({model.vocab_size})"
        )
    if corpus.num_docs != model.num_docs:
        raise ValueError(
            f"corpus has {corpus.num_docs} docs but model has {model.num_docs}"
        )
    if index.num_docs != corpus.num_docs:
        raise ValueError(
            f"index has {index.num_docs} docs but corpus has {corpus.num_docs}"
        )
    if not golds:
        raise ValueError("no gold labels to evaluate")
    if not methods:
        raise ValueError("no ranking methods requested")
    if not ns:
        raise ValueError("no query lengths requested")
    for gold in golds:
        for doc_id in gold.doc_ids:
            if doc_id not in corpus.doc_ordinals:
                raise ValueError(
                    f"gold label {gold.label!r} references unknown document {doc_id!r}"
                )

    golds = sorted(golds, key=lambda g: g.label)
    qids = {g.label: _qid_for(i + 1, len(golds)) for i, g in enumerate(golds)}
    topic_of = {
        g.label: map_gold_to_topic(model, g, corpus.doc_ordinals) for g in golds
    }

    report_warnings: list[str] = []
    cells: list[CellResult] = []
    run_dir_path = Path(run_dir) if run_dir is not None else None
    if run_dir_path is not None:
        run_dir_path.mkdir(parents=True, exist_ok=True)
        with open(run_dir_path / "qrels.txt", "w", encoding="utf-8") as f:
            write_qrels(f, golds, qids)

    for method in methods:
        for n in ns:
            if n < 1:
                raise ValueError("query lengths must be >= 1")
            results: list[LabelResult] = []
            run_lines = []
            for gold in golds:
                topic = topic_of[gold.label]
                ranked = rerank_topic(model, vocab, topic, method, n)
                query = Query.from_terms(
                    [e.word_id for e in ranked.entries],
                    len(vocab),
                    source=(topic, method.value, n),
                )
                ap, run_results, empty = _eval_cell_query(
                    index, query, gold.doc_ids, k, params
                )
                if empty:
                    report_warnings.append(
                        f"empty query for label {gold.label!r} "
                        f"(method={method.value}, n={n}); scored 0"
                    )
                results.append(
                    LabelResult(
                        label=gold.label,
                        qid=qids[gold.label],
                        topic_id=topic,
                        num_relevant=len(gold.doc_ids),
                        average_precision=ap,
                        empty_query=empty,
                    )
                )
                run_lines.append((qids[gold.label], run_results))
            cells.append(CellResult(method=method, n=n, results=tuple(results)))
            if run_dir_path is not None:
                run_path = run_dir_path / f"run_{method.value}_{n}.txt"
                with open(run_path, "w", encoding="utf-8") as f:
                    for qid, run_results in run_lines:
                        write_run(f, qid, run_results, tag=f"{method.value}_{n}")

    for warning in report_warnings:
        warnings.warn(warning, stacklevel=2)

    metadata = {
        "bm25": {"k1": params.k1, "b": params.b},
        "log_base": LOG_BASE,
        "retrieval_depth": k,
        "seed": model.meta.get("seed"),
        "num_topics": model.num_topics,
        "queries": {
            qids[g.label]: {"label": g.label, "topic_id": topic_of[g.label]}
            for g in golds
        },
    }
    return EvalReport(cells=cells, metadata=metadata, warnings=report_warnings)
