"""Corpus ingestion: tokenization, vocabulary filtering and serialization.

Documents come in as raw text with optional gold labels, and come out as
sequences of integer token ids over a filtered vocabulary.  Filtering
removes stopwords plus words that are too rare (document frequency below
``min_df``) or too common (document frequency above ``max_df_ratio`` of the
collection).  Word ids are assigned in lexicographic order so that two runs
over the same input produce byte-identical artifacts.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable

# A token is a maximal run of Unicode letters; digits, punctuation and
# underscores act as separators.
_TOKEN_RE = re.compile(r"[^\W\d_]+")

DEFAULT_MIN_DF = 5
DEFAULT_MAX_DF_RATIO = 0.5


def tokenize(text: str) -> list[str]:
    """Lowercase ``text`` and split it into letter-run tokens."""
    return _TOKEN_RE.findall(text.lower())


@dataclass
class RawDocument:
    """An unprocessed input document."""

    id: str
    text: str
    labels: list[str] = field(default_factory=list)


@dataclass
class Vocabulary:
    """Filtered word list with per-word document frequencies.

    Word ids are positions in ``words`` (0..V-1, lexicographically ordered).
    ``doc_freq[w]`` counts the documents containing word ``w``;
    ``num_docs`` is the size of the whole collection.
    """

    words: list[str]
    doc_freq: list[int]
    num_docs: int

    def __len__(self) -> int:
        return len(self.words)

    @cached_property
    def word_ids(self) -> dict[str, int]:
        return {w: i for i, w in enumerate(self.words)}


@dataclass
class Document:
    """A tokenized document: id, token ids and gold labels."""

    id: str
    tokens: list[int]
    labels: list[str] = field(default_factory=list)

    @property
    def is_empty(self) -> bool:
        return not self.tokens


@dataclass
class Corpus:
    """Tokenized document collection plus its vocabulary."""

    docs: list[Document]
    vocab: Vocabulary

    @property
    def num_docs(self) -> int:
        return len(self.docs)

    @property
    def total_tokens(self) -> int:
        return sum(len(d.tokens) for d in self.docs)

    @cached_property
    def doc_ordinals(self) -> dict[str, int]:
        return {d.id: i for i, d in enumerate(self.docs)}


def build_corpus(
    docs: Iterable[RawDocument],
    stopwords: set[str] = frozenset(),
    min_df: int = DEFAULT_MIN_DF,
    max_df_ratio: float = DEFAULT_MAX_DF_RATIO,
) -> Corpus:
    """Tokenize, drop stopwords and prune the vocabulary by document frequency.

    A word survives iff ``min_df <= doc_freq <= max_df_ratio * num_docs``.
    Documents whose tokens are all filtered out stay in the corpus (they
    still count toward the collection size) but are flagged empty.
    """
    if min_df < 1:
        raise ValueError(f"min_df must be >= 1, got {min_df}")
    if not 0 < max_df_ratio <= 1:
        raise ValueError(f"max_df_ratio must be in (0, 1], got {max_df_ratio}")

    docs = list(docs)
    if not docs:
        raise ValueError("cannot build a corpus from zero documents")
    seen: set[str] = set()
    for doc in docs:
        if not doc.id:
            raise ValueError("document with empty id")
        if doc.id in seen:
            raise ValueError(f"duplicate document id: {doc.id!r}")
        seen.add(doc.id)

    token_lists = [
        [t for t in tokenize(d.text) if t not in stopwords] for d in docs
    ]

    df: Counter[str] = Counter()
    for tokens in token_lists:
        df.update(set(tokens))

    num_docs = len(docs)
    max_df = max_df_ratio * num_docs
    words = sorted(w for w, n in df.items() if min_df <= n <= max_df)
    ids = {w: i for i, w in enumerate(words)}

    out_docs = [
        Document(
            id=doc.id,
            tokens=[ids[t] for t in tokens if t in ids],
            labels=list(doc.labels),
        )
        for doc, tokens in zip(docs, token_lists)
    ]
    vocab = Vocabulary(words=words, doc_freq=[df[w] for w in words], num_docs=num_docs)
    return Corpus(docs=out_docs, vocab=vocab)


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------

def read_jsonl(path: str | Path) -> list[RawDocument]:
    """Read documents from a JSON Lines file.

    Each line holds an object with ``id`` (string), ``text`` (string) and an
    optional ``labels`` array of strings.
    """
    docs = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise ValueError(f"{path}:{lineno}: invalid JSON: {e}") from e
            if not isinstance(obj, dict) or "id" not in obj or "text" not in obj:
                raise ValueError(f"{path}:{lineno}: expected an object with 'id' and 'text'")
            labels = obj.get("labels", [])
            if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
                raise ValueError(f"{path}:{lineno}: 'labels' must be an array of strings")
            docs.append(RawDocument(id=str(obj["id"]), text=str(obj["text"]), labels=labels))
    return docs


def load_stopwords(path: str | Path) -> set[str]:
    """Load a newline-delimited stopword file (lowercased, blanks skipped)."""
    words = set()
    with open(path, encoding="utf-8") as f:
        for line in f:
            w = line.strip().lower()
            if w:
                words.add(w)
    return words


def _check_field(value: str, what: str) -> str:
    if "\t" in value or "\n" in value:
        raise ValueError(f"{what} {value!r} contains a tab or newline")
    return value


def save_corpus(corpus: Corpus, vocab_path: str | Path, docs_path: str | Path) -> None:
    """Write the corpus as two TSV files.

    Vocabulary lines are ``word<TAB>doc_freq``; document lines are
    ``doc_id<TAB>label1,label2<TAB>space-separated token ids``.
    """
    with open(vocab_path, "w", encoding="utf-8") as f:
        for word, df in zip(corpus.vocab.words, corpus.vocab.doc_freq):
            f.write(f"{_check_field(word, 'word')}\t{df}\n")
    with open(docs_path, "w", encoding="utf-8") as f:
        for doc in corpus.docs:
            for label in doc.labels:
                _check_field(label, "label")
                if "," in label:
                    raise ValueError(f"label {label!r} contains a comma")
            labels = ",".join(doc.labels)
            tokens = " ".join(str(t) for t in doc.tokens)
            f.write(f"{_check_field(doc.id, 'doc id')}\t{labels}\t{tokens}\n")


def load_corpus(vocab_path: str | Path, docs_path: str | Path) -> Corpus:
    """Load a corpus previously written by :func:`save_corpus`."""
    words: list[str] = []
    doc_freq: list[int] = []
    with open(vocab_path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 2:
                raise ValueError(f"{vocab_path}:{lineno}: expected 'word<TAB>doc_freq'")
            words.append(parts[0])
            doc_freq.append(int(parts[1]))

    docs: list[Document] = []
    with open(docs_path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 3:
                raise ValueError(f"{docs_path}:{lineno}: expected 3 tab-separated fields")
            doc_id, label_field, token_field = parts
            labels = label_field.split(",") if label_field else []
            tokens = [int(t) for t in token_field.split()] if token_field else []
            for t in tokens:
                if not 0 <= t < len(words):
                    raise ValueError(f"{docs_path}:{lineno}: token id {t} out of range")
            docs.append(Document(id=doc_id, tokens=tokens, labels=labels))

    if not docs:
        raise ValueError(f"{docs_path}: no documents")
    vocab = Vocabulary(words=words, doc_freq=doc_freq, num_docs=len(docs))
    return Corpus(docs=docs, vocab=vocab)
