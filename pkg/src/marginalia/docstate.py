"""Document sessions and the hash-keyed summary cache.

Cards are recomputed only for paragraphs whose content hash is new to the
cache; reordering and unrelated edits cost nothing. A session owns one
document under active editing: its paragraph list is always in document
order (cards mirror the text one-to-one after every mutation) and every
mutation bumps the revision counter.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from collections import Counter, OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import ClassVar

from .abstractive import DEFAULT_TIMEOUT_S, GenerationParams, summarize_abstractive
from .embed import EmbeddingStore
from .keywords import extract_keywords
from .merge import MergeSuggestion, suggest_merge
from .rank import summary_text, top_k
from .textseg import Paragraph, split_paragraphs

__all__ = [
    "DEFAULT_CACHE_CAPACITY",
    "ConflictError",
    "DocumentSession",
    "EditDiff",
    "Engine",
    "SessionStore",
    "SummaryCache",
    "SummaryLevel",
]

DEFAULT_CACHE_CAPACITY = 10_000


class LevelKind(str, Enum):
    ORIGINAL = "original"
    CENTRAL = "central"
    EXTRACTIVE = "extractive"
    ABSTRACTIVE = "abstractive"
    KEYWORDS = "keywords"


@dataclass(frozen=True)
class SummaryLevel:
    """A card granularity: one of the four named levels, or extractive
    with an explicit sentence count ``k`` (the study-1 style levels)."""

    kind: LevelKind
    k: int | None = None

    ORIGINAL: ClassVar["SummaryLevel"]
    CENTRAL: ClassVar["SummaryLevel"]
    ABSTRACTIVE: ClassVar["SummaryLevel"]
    KEYWORDS: ClassVar["SummaryLevel"]

    def __post_init__(self):
        if self.kind is LevelKind.EXTRACTIVE:
            if self.k is None or self.k < 1:
                raise ValueError("extractive level requires k >= 1")
        elif self.k is not None:
            raise ValueError(f"level {self.kind.value!r} does not take k")

    @classmethod
    def extractive(cls, k: int) -> "SummaryLevel":
        return cls(LevelKind.EXTRACTIVE, k)

    @classmethod
    def parse(cls, name: str, k: int | None = None) -> "SummaryLevel":
        """Level from its wire name. "summary" and "abstractive" are synonyms."""
        normalized = name.strip().lower()
        if normalized == "original":
            return cls.ORIGINAL
        if normalized == "central":
            return cls.CENTRAL
        if normalized in ("summary", "abstractive"):
            return cls.ABSTRACTIVE
        if normalized == "keywords":
            return cls.KEYWORDS
        if normalized == "extractive":
            if k is None:
                raise ValueError("extractive level requires k")
            return cls.extractive(k)
        raise ValueError(f"unknown summary level {name!r}")

    @property
    def wire_name(self) -> str:
        if self.kind is LevelKind.ABSTRACTIVE:
            return "summary"
        return self.kind.value

    def technique_key(self, params: GenerationParams) -> str:
        """Cache key component naming the technique and its parameters."""
        if self.kind is LevelKind.CENTRAL:
            return "extractive:k=1"
        if self.kind is LevelKind.EXTRACTIVE:
            return f"extractive:k={self.k}"
        if self.kind is LevelKind.ABSTRACTIVE:
            return (
                f"abstractive:beams={params.num_beams}"
                f",ngram={params.no_repeat_ngram_size}"
                f",early={str(params.early_stopping).lower()}"
                f",ratio={params.max_length_ratio}"
            )
        return self.kind.value


SummaryLevel.ORIGINAL = SummaryLevel(LevelKind.ORIGINAL)
SummaryLevel.CENTRAL = SummaryLevel(LevelKind.CENTRAL)
SummaryLevel.ABSTRACTIVE = SummaryLevel(LevelKind.ABSTRACTIVE)
SummaryLevel.KEYWORDS = SummaryLevel(LevelKind.KEYWORDS)


SNAPSHOT_VERSION = 1


class SummaryCache:
    """LRU cache keyed by (content hash, technique key).

    Values are the JSON-serializable card cells the engine computes, so a
    hit is indistinguishable from a fresh computation. Thread-safe.
    """

    def __init__(self, capacity: int = DEFAULT_CACHE_CAPACITY):
        if capacity < 1:
            raise ValueError("cache capacity must be >= 1")
        self.capacity = capacity
        self.hits = 0
        self.misses = 0
        self._entries: OrderedDict[tuple[int, str], dict] = OrderedDict()
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, content_hash: int, technique: str):
        with self._lock:
            key = (content_hash, technique)
            if key in self._entries:
                self._entries.move_to_end(key)
                self.hits += 1
                return self._entries[key]
            self.misses += 1
            return None

    def put(self, content_hash: int, technique: str, value: dict) -> None:
        with self._lock:
            key = (content_hash, technique)
            self._entries[key] = value
            self._entries.move_to_end(key)
            while len(self._entries) > self.capacity:
                self._entries.popitem(last=False)

    def save_snapshot(self, path: str) -> None:
        """Write entries (LRU order, oldest first) as documented JSON:
        {"version": 1, "hash": "fnv1a64-nfc", "entries": [[hash, technique,
        value], ...]} with the 64-bit hash as a decimal string."""
        with self._lock:
            entries = [[str(h), t, v] for (h, t), v in self._entries.items()]
        payload = {"version": SNAPSHOT_VERSION, "hash": "fnv1a64-nfc", "entries": entries}
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False)

    def load_snapshot(self, path: str) -> int:
        """Load a snapshot written by :meth:`save_snapshot`; returns the
        number of entries restored. Rejects unknown versions."""
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        if payload.get("version") != SNAPSHOT_VERSION:
            raise ValueError(f"unsupported snapshot version {payload.get('version')!r}")
        count = 0
        for content_hash, technique, value in payload["entries"]:
            self.put(int(content_hash), technique, value)
            count += 1
        return count


class Engine:
    """Computes per-paragraph card cells, caching by content hash.

    The cell shapes double as the wire format of the technique endpoints:
    original {"text"}, central/extractive {"summary", "sentence_indices"},
    abstractive {"summary", "source"}, keywords {"keywords"}.
    """

    def __init__(
        self,
        store: EmbeddingStore,
        *,
        stopwords: frozenset[str] | None = None,
        abstractive_endpoint: str | None = None,
        generation_params: GenerationParams | None = None,
        cache_capacity: int = DEFAULT_CACHE_CAPACITY,
        request_timeout_s: float = DEFAULT_TIMEOUT_S,
        max_workers: int | None = None,
    ):
        self.store = store
        self.stopwords = stopwords
        self.abstractive_endpoint = abstractive_endpoint
        self.generation_params = generation_params or GenerationParams()
        self.request_timeout_s = request_timeout_s
        self.cache = SummaryCache(cache_capacity)
        workers = max_workers if max_workers is not None else (os.cpu_count() or 1)
        self._pool = ThreadPoolExecutor(max_workers=max(1, workers)) if workers > 1 else None

    @property
    def computations(self) -> int:
        """Number of summarizer invocations so far (= cache misses)."""
        return self.cache.misses

    def card(self, paragraph: Paragraph, level: SummaryLevel) -> dict:
        """Cell for one paragraph at one level; cached except for ORIGINAL
        and empty paragraphs, which never invoke a summarizer."""
        if level.kind is LevelKind.ORIGINAL:
            return {"text": paragraph.text}
        if not paragraph.sentences:
            return self._empty_cell(level)
        technique = level.technique_key(self.generation_params)
        cached = self.cache.get(paragraph.content_hash, technique)
        if cached is not None:
            return cached
        cell = self._compute(paragraph, level)
        self.cache.put(paragraph.content_hash, technique, cell)
        return cell

    def annotate_paragraphs(self, paragraphs: list[Paragraph], level: SummaryLevel) -> list[dict]:
        """Cells for each paragraph, in order.

        Distinct (hash, technique) keys are computed once per call, in
        parallel when a worker pool is configured.
        """
        if level.kind is LevelKind.ORIGINAL:
            return [{"text": p.text} for p in paragraphs]
        unique: OrderedDict[int, Paragraph] = OrderedDict()
        for p in paragraphs:
            unique.setdefault(p.content_hash, p)
        distinct = list(unique.values())
        if self._pool is not None and len(distinct) > 1:
            cells = list(self._pool.map(lambda p: self.card(p, level), distinct))
        else:
            cells = [self.card(p, level) for p in distinct]
        by_hash = {p.content_hash: cell for p, cell in zip(distinct, cells)}
        return [by_hash[p.content_hash] for p in paragraphs]

    def annotate_texts(self, texts: list[str], level: SummaryLevel) -> list[dict]:
        """Cells for raw paragraph strings (each string is one paragraph)."""
        return self.annotate_paragraphs(
            [Paragraph.from_text(t, index=i) for i, t in enumerate(texts)], level
        )

    def suggest_merge(self, a: Paragraph, b: Paragraph) -> MergeSuggestion:
        return suggest_merge(self.store, a, b)

    def _compute(self, paragraph: Paragraph, level: SummaryLevel) -> dict:
        if level.kind in (LevelKind.CENTRAL, LevelKind.EXTRACTIVE):
            k = 1 if level.kind is LevelKind.CENTRAL else level.k
            result = top_k(self.store, paragraph.sentences, k)
            return {
                "summary": summary_text(paragraph.sentences, result.selected),
                "sentence_indices": result.selected,
            }
        if level.kind is LevelKind.ABSTRACTIVE:
            result = summarize_abstractive(
                self.store,
                paragraph,
                params=self.generation_params,
                endpoint=self.abstractive_endpoint,
                timeout_s=self.request_timeout_s,
            )
            return {"summary": result.summary, "source": result.source.value}
        if level.kind is LevelKind.KEYWORDS:
            return {"keywords": extract_keywords(self.store, paragraph, self.stopwords).keywords}
        raise ValueError(f"cannot compute level {level!r}")

    @staticmethod
    def _empty_cell(level: SummaryLevel) -> dict:
        if level.kind is LevelKind.KEYWORDS:
            return {"keywords": []}
        if level.kind is LevelKind.ABSTRACTIVE:
            return {"summary": "", "source": "fallback"}
        return {"summary": "", "sentence_indices": []}


class ConflictError(Exception):
    """A merge suggestion no longer matches the paragraphs it was built for."""


@dataclass
class EditDiff:
    """Hash-level diff of an edit: new-document indices needing fresh
    annotation, and old-document indices that disappeared."""

    changed: list[int] = field(default_factory=list)
    removed: list[int] = field(default_factory=list)


class DocumentSession:
    """One document under editing. Paragraphs are kept in document order;
    cards mirror them one-to-one, so the card-order permutation is the
    identity after every mutation (reorder reports the move it applied).
    Mutations are serialized by a per-session lock."""

    def __init__(self, session_id: str | None = None):
        self.session_id = session_id or uuid.uuid4().hex
        self.paragraphs: list[Paragraph] = []
        self.revision = 0
        self._mutation_lock = threading.Lock()
        self._pending = 0
        self._pending_lock = threading.Lock()

    @property
    def card_order(self) -> list[int]:
        return list(range(len(self.paragraphs)))

    @property
    def pending(self) -> int:
        with self._pending_lock:
            return self._pending

    def begin_computation(self) -> None:
        with self._pending_lock:
            self._pending += 1

    def end_computation(self) -> None:
        with self._pending_lock:
            self._pending -= 1

    def full_text(self) -> str:
        return "\n\n".join(p.text for p in self.paragraphs)

    def apply_edit(self, new_full_text: str) -> EditDiff:
        """Replace the document text; returns the hash-level diff.

        Paragraphs are matched to the old document by content hash
        (multiset, earliest occurrences first), so moved paragraphs are
        not reported as changed.
        """
        with self._mutation_lock:
            new_paragraphs = split_paragraphs(new_full_text)
            old_hashes = [p.content_hash for p in self.paragraphs]
            new_hashes = [p.content_hash for p in new_paragraphs]

            available = Counter(old_hashes)
            changed = []
            for i, h in enumerate(new_hashes):
                if available[h] > 0:
                    available[h] -= 1
                else:
                    changed.append(i)

            taken = Counter(new_hashes)
            removed = []
            for j, h in enumerate(old_hashes):
                if taken[h] > 0:
                    taken[h] -= 1
                else:
                    removed.append(j)

            self.paragraphs = new_paragraphs
            self.revision += 1
            return EditDiff(changed=changed, removed=removed)

    def reorder(self, from_index: int, to_index: int) -> list[int]:
        """Move the card (and its paragraph) from one position to another;
        returns the new order expressed in pre-move indices."""
        with self._mutation_lock:
            n = len(self.paragraphs)
            if not (0 <= from_index < n and 0 <= to_index < n):
                raise IndexError(f"reorder indices out of range for {n} paragraphs")
            order = list(range(n))
            order.insert(to_index, order.pop(from_index))
            self.paragraphs = [
                self.paragraphs[old].with_index(new) for new, old in enumerate(order)
            ]
            self.revision += 1
            return order

    def delete_card(self, index: int) -> None:
        """Remove one paragraph and its card. Cache entries for its hash
        survive (hash-keyed), so re-adding identical text costs nothing."""
        with self._mutation_lock:
            if not (0 <= index < len(self.paragraphs)):
                raise IndexError(f"card index {index} out of range")
            del self.paragraphs[index]
            self.paragraphs = [p.with_index(i) for i, p in enumerate(self.paragraphs)]
            self.revision += 1

    def accept_merge(self, a_index: int, b_index: int, suggestion: MergeSuggestion) -> None:
        """Replace paragraphs A and B with the merged paragraph at A's
        position. Raises :class:`ConflictError` when either paragraph was
        edited after the suggestion was produced."""
        with self._mutation_lock:
            n = len(self.paragraphs)
            if not (0 <= a_index < n and 0 <= b_index < n) or a_index == b_index:
                raise IndexError(f"merge indices ({a_index}, {b_index}) invalid for {n} paragraphs")
            current = (
                self.paragraphs[a_index].content_hash,
                self.paragraphs[b_index].content_hash,
            )
            if current != tuple(suggestion.source_hashes):
                raise ConflictError("paragraphs changed since the suggestion was produced")
            merged = Paragraph.from_text(suggestion.merged_text)
            kept = [p for i, p in enumerate(self.paragraphs) if i not in (a_index, b_index)]
            insert_at = a_index - (1 if b_index < a_index else 0)
            kept.insert(insert_at, merged)
            self.paragraphs = [p.with_index(i) for i, p in enumerate(kept)]
            self.revision += 1

    def annotate(self, engine: Engine, level: SummaryLevel) -> list[dict]:
        """Cards for the whole document; tracks in-flight computation for
        the status endpoint."""
        paragraphs = list(self.paragraphs)
        self.begin_computation()
        try:
            return engine.annotate_paragraphs(paragraphs, level)
        finally:
            self.end_computation()


class SessionStore:
    """In-memory registry of live sessions."""

    def __init__(self):
        self._sessions: dict[str, DocumentSession] = {}
        self._lock = threading.Lock()

    def create(self) -> DocumentSession:
        session = DocumentSession()
        with self._lock:
            self._sessions[session.session_id] = session
        return session

    def get(self, session_id: str) -> DocumentSession:
        with self._lock:
            if session_id not in self._sessions:
                raise KeyError(session_id)
            return self._sessions[session_id]
