"""GloVe-format word vectors with mean-pooled sentence embeddings.

The store is immutable after loading and safe for concurrent reads. Lookup
is case-insensitive: keys are lowercased at load time and the first
occurrence of a duplicate key wins.
"""

from __future__ import annotations

import gzip
import math
from typing import Iterable, Mapping, Optional

import numpy as np

__all__ = ["EmbeddingStore", "GloveFormatError", "load_glove", "sentence_embedding", "cosine"]


class GloveFormatError(ValueError):
    """A malformed embedding file line; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class EmbeddingStore:
    """Immutable token -> dense-vector map of a fixed dimension."""

    def __init__(self, vectors: Mapping[str, Iterable[float]], dimension: int | None = None):
        store: dict[str, np.ndarray] = {}
        for token, values in vectors.items():
            vec = np.asarray(values, dtype=np.float64)
            if dimension is None:
                dimension = vec.shape[-1] if vec.ndim else 0
            if vec.shape != (dimension,):
                raise ValueError(
                    f"vector for {token!r} has shape {vec.shape}, expected ({dimension},)"
                )
            if not np.all(np.isfinite(vec)):
                raise ValueError(f"vector for {token!r} contains non-finite values")
            store.setdefault(token.lower(), vec)
        if dimension is None:
            raise ValueError("cannot build an embedding store without any vectors")
        self._vectors = store
        self._dimension = int(dimension)

    @property
    def dimension(self) -> int:
        return self._dimension

    @property
    def vocab_size(self) -> int:
        return len(self._vectors)

    def __contains__(self, token: str) -> bool:
        return token.lower() in self._vectors

    def get(self, token: str) -> Optional[np.ndarray]:
        return self._vectors.get(token.lower())


def load_glove(path: str) -> EmbeddingStore:
    """Load a GloVe text file: one ``token v1 ... vD`` line per entry.

    The dimension is inferred from the first line. ``.gz`` files are
    decompressed transparently. Raises :class:`GloveFormatError` for a line
    with the wrong component count or a non-finite value, and the usual
    ``OSError`` for IO failures.
    """
    opener = gzip.open if str(path).endswith(".gz") else open
    vectors: dict[str, np.ndarray] = {}
    dimension: int | None = None
    with opener(path, "rt", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            token, raw_values = parts[0], parts[1:]
            if dimension is None:
                if not raw_values:
                    raise GloveFormatError(line_no, "no vector components on first line")
                dimension = len(raw_values)
            if len(raw_values) != dimension:
                raise GloveFormatError(
                    line_no,
                    f"expected {dimension} components, found {len(raw_values)}",
                )
            try:
                values = [float(v) for v in raw_values]
            except ValueError:
                raise GloveFormatError(line_no, "unparseable vector component") from None
            if not all(math.isfinite(v) for v in values):
                raise GloveFormatError(line_no, "non-finite vector component")
            vectors.setdefault(token.lower(), np.asarray(values, dtype=np.float64))
    if dimension is None:
        raise GloveFormatError(1, "embedding file is empty")
    return EmbeddingStore(vectors, dimension)


def sentence_embedding(store: EmbeddingStore, tokens: list[str]) -> Optional[np.ndarray]:
    """Mean of the vectors of in-vocabulary tokens; None when there are none."""
    found = [vec for vec in (store.get(tok) for tok in tokens) if vec is not None]
    if not found:
        return None
    return np.mean(found, axis=0)


def cosine(u, v) -> float:
    """Cosine similarity ``u.v / (|u||v|)``; 0.0 when either norm is zero."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))
