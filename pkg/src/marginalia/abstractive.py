"""Abstractive summaries behind a pluggable inference endpoint.

When an endpoint is configured the paragraph text is POSTed to
``<endpoint>/summarize`` together with the generation parameters; any
failure (unreachable, timeout, malformed payload) degrades to a local
deterministic fallback that packs the top-ranked sentences into the same
length budget. The fallback is total, so this module never raises for a
non-empty paragraph.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from enum import Enum

import requests

from .embed import EmbeddingStore
from .rank import rank_sentences
from .textseg import Paragraph

__all__ = [
    "DEFAULT_TIMEOUT_S",
    "MIN_MAX_LENGTH",
    "AbstractiveResult",
    "GenerationParams",
    "Source",
    "build_inference_request",
    "fallback_summary",
    "source_token_count",
    "summarize_abstractive",
]

log = logging.getLogger(__name__)

MIN_MAX_LENGTH = 5
DEFAULT_TIMEOUT_S = 5.0


@dataclass(frozen=True)
class GenerationParams:
    num_beams: int = 4
    no_repeat_ngram_size: int = 2
    early_stopping: bool = True
    max_length_ratio: float = 0.70

    def max_length_for(self, token_count: int) -> int:
        """Length budget: floor(ratio * token count), never below 5."""
        return max(MIN_MAX_LENGTH, math.floor(self.max_length_ratio * token_count))


class Source(str, Enum):
    EXTERNAL = "external"
    FALLBACK = "fallback"


@dataclass(frozen=True)
class AbstractiveResult:
    summary: str
    source: Source
    latency_ms: int


def source_token_count(text: str) -> int:
    """Whitespace token count; the basis for the max_length budget."""
    return len(text.split())


def build_inference_request(paragraph: Paragraph, params: GenerationParams) -> dict:
    """Request payload for the inference service. Field names are fixed."""
    return {
        "text": paragraph.text,
        "num_beams": params.num_beams,
        "no_repeat_ngram_size": params.no_repeat_ngram_size,
        "early_stopping": params.early_stopping,
        "max_length": params.max_length_for(source_token_count(paragraph.text)),
    }


def fallback_summary(store: EmbeddingStore, paragraph: Paragraph, params: GenerationParams) -> str:
    """Greedy extractive stand-in: walk sentences in rank order, stop before
    the first one that would exceed the budget, keep at least the top-1,
    join in document order."""
    sentences = paragraph.sentences
    budget = params.max_length_for(source_token_count(paragraph.text))
    scores = rank_sentences(store, sentences)
    rank_order = sorted(range(len(sentences)), key=lambda i: (-scores[i], i))

    chosen: list[int] = []
    used = 0
    for i in rank_order:
        cost = source_token_count(sentences[i].text)
        if chosen and used + cost > budget:
            break
        chosen.append(i)
        used += cost
    return " ".join(sentences[i].text for i in sorted(chosen))


def summarize_abstractive(
    store: EmbeddingStore,
    paragraph: Paragraph,
    params: GenerationParams | None = None,
    endpoint: str | None = None,
    timeout_s: float = DEFAULT_TIMEOUT_S,
) -> AbstractiveResult:
    """Summary of ``paragraph`` from the endpoint, or the local fallback."""
    if not paragraph.sentences:
        raise ValueError("cannot summarize an empty paragraph")
    if params is None:
        params = GenerationParams()

    started = time.perf_counter()
    if endpoint:
        try:
            response = requests.post(
                endpoint.rstrip("/") + "/summarize",
                json=build_inference_request(paragraph, params),
                timeout=timeout_s,
            )
            response.raise_for_status()
            summary = response.json()["summary"]
            if not isinstance(summary, str):
                raise TypeError(f"summary field is {type(summary).__name__}, not str")
            elapsed = int((time.perf_counter() - started) * 1000)
            return AbstractiveResult(summary=summary, source=Source.EXTERNAL, latency_ms=elapsed)
        except (requests.RequestException, ValueError, KeyError, TypeError) as exc:
            log.warning("abstractive endpoint degraded to fallback: %s", exc)

    summary = fallback_summary(store, paragraph, params)
    elapsed = int((time.perf_counter() - started) * 1000)
    return AbstractiveResult(summary=summary, source=Source.FALLBACK, latency_ms=elapsed)
