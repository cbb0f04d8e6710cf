"""Topic models: collapsed Gibbs training plus matrix import/export.

A trained model is a pair of row-stochastic matrices: ``phi`` (T x V, word
probabilities per topic) and ``theta`` (D x T, topic probabilities per
document).  Both are strictly positive thanks to Dirichlet smoothing.
Models estimated elsewhere can be imported from the plain-text matrix
format documented at :func:`write_matrix` and are validated against the
same invariants.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is an optional accelerator
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap

RNG_NAME = "pcg64"  # numpy's default bit generator
ROW_SUM_TOLERANCE = 1e-6  # accepted deviation on import, before renormalizing
PROBABILITY_FLOOR = 1e-12


@dataclass(eq=False)
class TopicModel:
    phi: np.ndarray  # (T, V), row t = word distribution of topic t
    theta: np.ndarray  # (D, T), row d = topic distribution of document d
    meta: dict = field(default_factory=dict)

    @property
    def num_topics(self) -> int:
        return self.phi.shape[0]

    @property
    def vocab_size(self) -> int:
        return self.phi.shape[1]

    @property
    def num_docs(self) -> int:
        return self.theta.shape[0]

    def validate(self) -> None:
        """Check row-stochasticity and strict positivity of both matrices."""
        if self.phi.ndim != 2 or self.theta.ndim != 2:
            raise ValueError("phi and theta must be 2-D matrices")
        if self.theta.shape[1] != self.num_topics:
            raise ValueError(
                f"theta has {self.theta.shape[1]} columns but phi has "
                f"{self.num_topics} topics"
            )
        for name, m in (("phi", self.phi), ("theta", self.theta)):
            if not np.all(m > 0):
                raise ValueError(f"{name} contains nonpositive entries")
            sums = m.sum(axis=1)
            bad = np.nonzero(np.abs(sums - 1.0) > 1e-9)[0]
            if bad.size:
                raise ValueError(f"{name} row {bad[0]} sums to {sums[bad[0]]!r}, not 1")


@dataclass(frozen=True)
class GibbsConfig:
    """Sampler settings.  ``alpha=None`` resolves to the 50/T heuristic."""

    num_topics: int
    alpha: float | None = None
    beta: float = 0.01
    iterations: int = 1000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.num_topics < 1:
            raise ValueError("num_topics must be >= 1")
        if self.alpha is not None and self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")

    @property
    def resolved_alpha(self) -> float:
        return 50.0 / self.num_topics if self.alpha is None else self.alpha


@njit(cache=True)
def _gibbs_sweep(doc_of, word_of, z, n_dt, n_tw, n_t, u, alpha, beta):
    """One full sweep over all tokens; u holds one uniform draw per token."""
    num_topics = n_tw.shape[0]
    vbeta = beta * n_tw.shape[1]
    cum = np.empty(num_topics, dtype=np.float64)
    for i in range(doc_of.shape[0]):
        d = doc_of[i]
        w = word_of[i]
        old = z[i]
        n_dt[d, old] -= 1
        n_tw[old, w] -= 1
        n_t[old] -= 1
        total = 0.0
        for t in range(num_topics):
            total += (n_tw[t, w] + beta) / (n_t[t] + vbeta) * (n_dt[d, t] + alpha)
            cum[t] = total
        r = u[i] * total
        new = 0
        while new < num_topics - 1 and cum[new] <= r:
            new += 1
        z[i] = new
        n_dt[d, new] += 1
        n_tw[new, w] += 1
        n_t[new] += 1


def train_lda(corpus, cfg: GibbsConfig) -> TopicModel:
    """Estimate a topic model by collapsed Gibbs sampling.

    Tokens are reassigned one at a time for ``cfg.iterations`` sweeps; the
    final counts give the smoothed estimates
    ``phi[t, w] = (n_tw + beta) / (n_t + V*beta)`` and
    ``theta[d, t] = (n_dt + alpha) / (n_d + T*alpha)``.
    The run is fully determined by ``cfg.seed``.
    """
    num_docs = corpus.num_docs
    vocab_size = len(corpus.vocab)
    if vocab_size < 1:
        raise ValueError("corpus has an empty vocabulary")

    doc_of = np.array(
        [d for d, doc in enumerate(corpus.docs) for _ in doc.tokens], dtype=np.int64
    )
    word_of = np.array(
        [w for doc in corpus.docs for w in doc.tokens], dtype=np.int64
    )
    num_tokens = doc_of.shape[0]
    if num_tokens == 0:
        raise ValueError("corpus has zero tokens; nothing to train on")

    num_topics = cfg.num_topics
    alpha = cfg.resolved_alpha
    beta = cfg.beta

    rng = np.random.default_rng(cfg.seed)
    z = rng.integers(0, num_topics, size=num_tokens, dtype=np.int64)

    n_dt = np.zeros((num_docs, num_topics), dtype=np.int64)
    n_tw = np.zeros((num_topics, vocab_size), dtype=np.int64)
    np.add.at(n_dt, (doc_of, z), 1)
    np.add.at(n_tw, (z, word_of), 1)
    n_t = n_tw.sum(axis=1)
    n_d = np.bincount(doc_of, minlength=num_docs)

    for _ in range(cfg.iterations):
        _gibbs_sweep(doc_of, word_of, z, n_dt, n_tw, n_t, rng.random(num_tokens), alpha, beta)

    phi = (n_tw + beta) / (n_t + vocab_size * beta)[:, None]
    theta = (n_dt + alpha) / (n_d + num_topics * alpha)[:, None]
    meta = {
        "num_topics": num_topics,
        "vocab_size": vocab_size,
        "num_docs": num_docs,
        "alpha": alpha,
        "beta": beta,
        "iterations": cfg.iterations,
        "seed": cfg.seed,
        "rng": RNG_NAME,
    }
    model = TopicModel(phi=phi, theta=theta, meta=meta)
    model.validate()
    return model


# ---------------------------------------------------------------------------
# Matrix file format: first line "R C", then R lines of C decimal floats.
# ---------------------------------------------------------------------------

def write_matrix(path: str | Path, matrix: np.ndarray) -> None:
    """Write a matrix in the plain-text format, full round-trip precision."""
    rows, cols = matrix.shape
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{rows} {cols}\n")
        for row in matrix:
            f.write(" ".join(repr(float(x)) for x in row) + "\n")


def read_matrix(path: str | Path) -> np.ndarray:
    with open(path, encoding="utf-8") as f:
        header = f.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: first line must be 'R C'")
        rows, cols = int(header[0]), int(header[1])
        data = np.empty((rows, cols), dtype=np.float64)
        for i in range(rows):
            parts = f.readline().split()
            if len(parts) != cols:
                raise ValueError(f"{path}: row {i} has {len(parts)} values, expected {cols}")
            data[i] = [float(p) for p in parts]
        if f.readline().strip():
            raise ValueError(f"{path}: trailing data after {rows} rows")
    return data


def _validate_rows(matrix: np.ndarray, name: str) -> np.ndarray:
    """Reject off-by-more-than-tolerance rows, floor nonpositives, renormalize."""
    sums = matrix.sum(axis=1)
    bad = np.nonzero(np.abs(sums - 1.0) > ROW_SUM_TOLERANCE)[0]
    if bad.size:
        raise ValueError(
            f"{name} row {bad[0]} sums to {sums[bad[0]]:.9f}; expected 1 "
            f"within {ROW_SUM_TOLERANCE}"
        )
    floored = int(np.count_nonzero(matrix <= 0))
    if floored:
        matrix = np.maximum(matrix, PROBABILITY_FLOOR)
        warnings.warn(
            f"{name}: floored {floored} nonpositive entries to {PROBABILITY_FLOOR}",
            stacklevel=3,
        )
    return matrix / matrix.sum(axis=1, keepdims=True)


def import_model(
    phi_source: str | Path | np.ndarray,
    theta_source: str | Path | np.ndarray,
    meta: dict | None = None,
) -> TopicModel:
    """Load and validate phi/theta produced by any external trainer.

    Rows that deviate from sum 1 by more than ``ROW_SUM_TOLERANCE`` are
    rejected with their index.  Nonpositive entries are floored to
    ``PROBABILITY_FLOOR`` with a warning, then every row is renormalized.
    """
    phi = np.array(phi_source, dtype=np.float64) if isinstance(phi_source, np.ndarray) else read_matrix(phi_source)
    theta = np.array(theta_source, dtype=np.float64) if isinstance(theta_source, np.ndarray) else read_matrix(theta_source)
    if phi.ndim != 2 or theta.ndim != 2:
        raise ValueError("phi and theta must be 2-D matrices")
    if theta.shape[1] != phi.shape[0]:
        raise ValueError(
            f"dimension mismatch: phi has {phi.shape[0]} topics, "
            f"theta has {theta.shape[1]} topic columns"
        )
    phi = _validate_rows(phi, "phi")
    theta = _validate_rows(theta, "theta")
    model_meta = {
        "num_topics": phi.shape[0],
        "vocab_size": phi.shape[1],
        "num_docs": theta.shape[0],
        "source": "imported",
    }
    if meta:
        model_meta.update(meta)
    model = TopicModel(phi=phi, theta=theta, meta=model_meta)
    model.validate()
    return model


def export_model(
    model: TopicModel,
    phi_path: str | Path,
    theta_path: str | Path,
    meta_path: str | Path | None = None,
) -> None:
    """Write phi, theta and (optionally) the JSON metadata sidecar."""
    write_matrix(phi_path, model.phi)
    write_matrix(theta_path, model.theta)
    if meta_path is not None:
        with open(meta_path, "w", encoding="utf-8") as f:
            json.dump(model.meta, f, indent=2, sort_keys=True)
            f.write("\n")


def load_model(phi_path: str | Path, theta_path: str | Path, meta_path: str | Path | None = None) -> TopicModel:
    """Import a model, pulling metadata from its sidecar when present."""
    meta = None
    if meta_path is not None and Path(meta_path).exists():
        with open(meta_path, encoding="utf-8") as f:
            meta = json.load(f)
    return import_model(phi_path, theta_path, meta=meta)
