"""Shared fixtures: small deterministic corpora used across test modules."""

from __future__ import annotations

import numpy as np
import pytest

from rankterms import RawDocument, build_corpus


@pytest.fixture
def toy_corpus():
    """6 docs, 2 clean themes, no filtering; vocabulary is fully known."""
    docs = [
        RawDocument("d0", "apple banana apple fruit", ["food"]),
        RawDocument("d1", "banana fruit smoothie apple", ["food"]),
        RawDocument("d2", "engine wheel brake car", ["auto"]),
        RawDocument("d3", "car engine brake wheel wheel", ["auto"]),
        RawDocument("d4", "apple car fruit wheel", ["food"]),
        RawDocument("d5", "banana engine apple brake", ["auto"]),
    ]
    return build_corpus(docs, stopwords=set(), min_df=1, max_df_ratio=1.0)


def random_corpus(rng: np.random.Generator, num_docs=30, vocab=25, max_len=40,
                  min_df=1, max_df_ratio=1.0, num_labels=0):
    """A random corpus over an alphabetic vocabulary."""
    words = [f"w{chr(ord('a') + i // 26)}{chr(ord('a') + i % 26)}" for i in range(vocab)]
    labels = [f"label{chr(ord('a') + i)}" for i in range(num_labels)]
    docs = []
    for i in range(num_docs):
        n = int(rng.integers(1, max_len + 1))
        text = " ".join(rng.choice(words, size=n))
        doc_labels = list(rng.choice(labels, size=int(rng.integers(1, 3)), replace=False)) \
            if num_labels else []
        docs.append(RawDocument(f"doc{i:03d}", text, doc_labels))
    return build_corpus(docs, stopwords=set(), min_df=min_df, max_df_ratio=max_df_ratio)
