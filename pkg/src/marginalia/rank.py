"""TextRank sentence ranking: similarity graph plus damped PageRank.

Edge weights are negative-clipped cosine similarities between mean-pooled
sentence embeddings. Scores come from power iteration on the row-normalized
weight matrix with uniform teleportation; rows without any outgoing weight
(including sentences with no in-vocabulary token) distribute uniformly, so
every sentence always has a defined score.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embed import EmbeddingStore, sentence_embedding
from .textseg import Paragraph, Sentence

__all__ = [
    "DAMPING",
    "MAX_ITERATIONS",
    "TOLERANCE",
    "RankResult",
    "central_sentence",
    "extract_top_k",
    "pagerank",
    "rank_sentences",
    "similarity_matrix",
    "summary_text",
    "top_k",
]

DAMPING = 0.85
TOLERANCE = 1e-6
MAX_ITERATIONS = 100


@dataclass(frozen=True)
class RankResult:
    """Per-sentence scores plus the selected top-k indices (ascending)."""

    scores: np.ndarray
    selected: list[int]
    k_requested: int
    k_effective: int


def similarity_matrix(store: EmbeddingStore, sentences: list[Sentence]) -> np.ndarray:
    """Pairwise clipped-cosine weights; zero diagonal, zero rows for
    sentences whose embedding is absent."""
    n = len(sentences)
    vectors = np.zeros((n, store.dimension))
    present = np.zeros(n, dtype=bool)
    for i, sentence in enumerate(sentences):
        vec = sentence_embedding(store, sentence.tokens)
        if vec is not None:
            vectors[i] = vec
            present[i] = True

    norms = np.linalg.norm(vectors, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    unit = vectors / safe[:, None]
    weights = np.clip(unit @ unit.T, 0.0, None)
    weights[~present, :] = 0.0
    weights[:, ~present] = 0.0
    np.fill_diagonal(weights, 0.0)
    return weights


def pagerank(
    weights: np.ndarray,
    *,
    damping: float = DAMPING,
    tol: float = TOLERANCE,
    max_iterations: int = MAX_ITERATIONS,
) -> np.ndarray:
    """Damped PageRank over a non-negative weight matrix by power iteration.

    Rows are normalized to a transition matrix; all-zero (dangling) rows
    are replaced with the uniform distribution. Iterates until the L1
    change drops below ``tol`` or ``max_iterations`` is reached. The result
    sums to 1.
    """
    weights = np.asarray(weights, dtype=np.float64)
    n = weights.shape[0]
    if n == 0:
        raise ValueError("pagerank requires at least one node")
    if n == 1:
        return np.array([1.0])

    row_sums = weights.sum(axis=1)
    dangling = row_sums == 0.0
    transition = np.where(
        dangling[:, None],
        1.0 / n,
        weights / np.where(row_sums == 0.0, 1.0, row_sums)[:, None],
    )

    scores = np.full(n, 1.0 / n)
    teleport = (1.0 - damping) / n
    for _ in range(max_iterations):
        updated = damping * (transition.T @ scores) + teleport
        delta = np.abs(updated - scores).sum()
        scores = updated
        if delta < tol:
            break
    return scores


def rank_sentences(store: EmbeddingStore, sentences: list[Sentence]) -> np.ndarray:
    """PageRank score per sentence; raises on an empty sentence list."""
    if not sentences:
        raise ValueError("cannot rank an empty sentence list")
    return pagerank(similarity_matrix(store, sentences))


def extract_top_k(scores: np.ndarray, k: int) -> RankResult:
    """Indices of the ``k`` best-scoring sentences, in document order.

    Ties break toward the smaller index; ``k`` beyond the sentence count
    clamps to it.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    scores = np.asarray(scores, dtype=np.float64)
    n = len(scores)
    k_effective = min(k, n)
    by_rank = sorted(range(n), key=lambda i: (-scores[i], i))
    selected = sorted(by_rank[:k_effective])
    return RankResult(scores=scores, selected=selected, k_requested=k, k_effective=k_effective)


def top_k(store: EmbeddingStore, sentences: list[Sentence], k: int) -> RankResult:
    """Rank ``sentences`` and select the top ``k``."""
    return extract_top_k(rank_sentences(store, sentences), k)


def central_sentence(store: EmbeddingStore, paragraph: Paragraph) -> Sentence:
    """The single top-ranked sentence of the paragraph (top-k with k=1)."""
    if not paragraph.sentences:
        raise ValueError("paragraph has no sentences")
    result = top_k(store, paragraph.sentences, 1)
    return paragraph.sentences[result.selected[0]]


def summary_text(sentences: list[Sentence], selected: list[int]) -> str:
    """Selected sentences joined with single spaces, in document order."""
    return " ".join(sentences[i].text for i in selected)
