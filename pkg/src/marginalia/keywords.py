"""Keyword extraction by embedding similarity to the paragraph embedding.

Candidates are non-stopword unigrams plus bigrams of adjacent non-stopword
tokens (adjacency never crosses a sentence boundary). Each candidate is
scored by the cosine between its mean token vector and the paragraph's mean
token vector; the five best survive, with unigrams already covered by a
selected bigram suppressed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .embed import EmbeddingStore, sentence_embedding
from .textseg import Paragraph

__all__ = ["KeywordSet", "DEFAULT_STOPWORDS", "MAX_KEYWORDS", "extract_keywords", "load_stopwords"]

MAX_KEYWORDS = 5


def load_stopwords(path: str) -> frozenset[str]:
    """Stopword file: one lowercase word per line, '#' comments allowed."""
    with open(path, encoding="utf-8") as fh:
        return _parse_stopwords(fh.read())


def _parse_stopwords(raw: str) -> frozenset[str]:
    words = set()
    for line in raw.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


DEFAULT_STOPWORDS: frozenset[str] = _parse_stopwords(
    resources.files("marginalia.data").joinpath("stopwords.txt").read_text("utf-8")
)


@dataclass(frozen=True)
class KeywordSet:
    """Up to five keywords ordered by non-increasing similarity score."""

    keywords: list[str] = field(default_factory=list)
    scores: list[float] = field(default_factory=list)


def _candidates(paragraph: Paragraph, stopwords: frozenset[str]):
    """Unique candidate strings with their first-occurrence position."""
    seen: dict[str, int] = {}
    position = 0
    for sent in paragraph.sentences:
        tokens = sent.tokens
        for j, tok in enumerate(tokens):
            if tok not in stopwords:
                seen.setdefault(tok, position + j)
            if j + 1 < len(tokens) and tok not in stopwords and tokens[j + 1] not in stopwords:
                seen.setdefault(f"{tok} {tokens[j + 1]}", position + j)
        position += len(tokens)
    return seen


def extract_keywords(
    store: EmbeddingStore,
    paragraph: Paragraph,
    stopwords: frozenset[str] | None = None,
) -> KeywordSet:
    """Top keywords of ``paragraph``; empty set when nothing is scorable."""
    if stopwords is None:
        stopwords = DEFAULT_STOPWORDS

    all_tokens = [tok for sent in paragraph.sentences for tok in sent.tokens]
    paragraph_vec = sentence_embedding(store, all_tokens)
    if paragraph_vec is None:
        return KeywordSet()

    entries = []
    vectors = []
    for text, first_pos in _candidates(paragraph, stopwords).items():
        vec = sentence_embedding(store, text.split(" "))
        if vec is None:
            continue
        entries.append((first_pos, text))
        vectors.append(vec)
    if not entries:
        return KeywordSet()

    # One matrix product scores every candidate against the paragraph vector.
    matrix = np.stack(vectors)
    norms = np.linalg.norm(matrix, axis=1) * np.linalg.norm(paragraph_vec)
    with np.errstate(invalid="ignore", divide="ignore"):
        similarities = np.where(norms > 0, matrix @ paragraph_vec / norms, 0.0)
    scored = [
        (float(similarities[i]), first_pos, text)
        for i, (first_pos, text) in enumerate(entries)
    ]
    scored.sort(key=lambda item: (-item[0], item[1]))

    keywords: list[str] = []
    scores: list[float] = []
    covered_by_bigram: set[str] = set()
    for score, _, text in scored:
        if len(keywords) == MAX_KEYWORDS:
            break
        parts = text.split(" ")
        if len(parts) == 1 and text in covered_by_bigram:
            continue
        keywords.append(text)
        scores.append(score)
        if len(parts) == 2:
            covered_by_bigram.update(parts)
    return KeywordSet(keywords=keywords, scores=scores)
