"""Merge suggestions for two paragraphs.

Sentences are ranked within each paragraph separately, the five best
pooled scores survive, and the merged text preserves document order:
all retained sentences of the first paragraph, then all of the second.
Span annotations point back into the source paragraphs so a UI can
highlight what was kept and what was cut.
"""

from __future__ import annotations

from dataclasses import dataclass

from .embed import EmbeddingStore
from .rank import rank_sentences
from .textseg import Paragraph

__all__ = ["MERGE_KEEP", "MergeSpan", "MergeSuggestion", "suggest_merge"]

MERGE_KEEP = 5

PARAGRAPH_A = "A"
PARAGRAPH_B = "B"


@dataclass(frozen=True)
class MergeSpan:
    """One sentence of a source paragraph: id ("A"/"B"), sentence index,
    and the sentence's half-open char range in that paragraph's text."""

    paragraph_id: str
    sentence_index: int
    start: int
    end: int


@dataclass(frozen=True)
class MergeSuggestion:
    merged_text: str
    retained: list[MergeSpan]
    cut: list[MergeSpan]
    source_hashes: tuple[int, int]

    def pairs(self, spans: list[MergeSpan]) -> list[list]:
        """Wire form of a span list: [[paragraph_id, sentence_index], ...]."""
        return [[s.paragraph_id, s.sentence_index] for s in spans]


def suggest_merge(store: EmbeddingStore, a: Paragraph, b: Paragraph) -> MergeSuggestion:
    """Pooled top-five merge of ``a`` and ``b``.

    Ties break to paragraph A first, then to the lower sentence index.
    Raises if either paragraph has no sentences.
    """
    if not a.sentences or not b.sentences:
        raise ValueError("both paragraphs must contain at least one sentence")

    pooled = []
    for order, (pid, paragraph) in enumerate(((PARAGRAPH_A, a), (PARAGRAPH_B, b))):
        scores = rank_sentences(store, paragraph.sentences)
        for sentence in paragraph.sentences:
            pooled.append((scores[sentence.index], order, pid, sentence))

    ranked = sorted(pooled, key=lambda item: (-item[0], item[1], item[3].index))
    keep = {(pid, s.index) for _, _, pid, s in ranked[:MERGE_KEEP]}

    retained: list[MergeSpan] = []
    cut: list[MergeSpan] = []
    parts: list[str] = []
    for pid, paragraph in ((PARAGRAPH_A, a), (PARAGRAPH_B, b)):
        for sentence in paragraph.sentences:
            span = MergeSpan(pid, sentence.index, *sentence.char_span)
            if (pid, sentence.index) in keep:
                retained.append(span)
                parts.append(sentence.text)
            else:
                cut.append(span)

    return MergeSuggestion(
        merged_text=" ".join(parts),
        retained=retained,
        cut=cut,
        source_hashes=(a.content_hash, b.content_hash),
    )
