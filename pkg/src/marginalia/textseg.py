"""Deterministic segmentation of text into paragraphs, sentences and tokens.

Everything downstream (ranking, keywords, merging, caching) consumes the
types defined here. All functions are pure: equal input gives equal output,
across calls and across processes. The content hash in particular must be
stable across runs because the summary cache can be persisted.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, replace
from importlib import resources

__all__ = [
    "Paragraph",
    "Sentence",
    "content_hash",
    "split_paragraphs",
    "split_paragraphs_with_separators",
    "split_sentences",
    "tokenize",
]

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def content_hash(text: str) -> int:
    """64-bit FNV-1a hash of the NFC-normalized UTF-8 encoding of ``text``.

    Non-cryptographic but documented and stable: the cache snapshot format
    relies on these values staying identical across processes and platforms.
    """
    h = _FNV_OFFSET
    for byte in unicodedata.normalize("NFC", text).encode("utf-8"):
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


_WORD_RE = re.compile(r"\w+")


def tokenize(text: str) -> list[str]:
    """Lowercased word tokens in order of appearance.

    Words are maximal ``\\w+`` runs; matches without a single alphanumeric
    character (e.g. bare underscores) are dropped, so no token is ever
    punctuation-only, empty, or contains whitespace.
    """
    return [
        match.group().lower()
        for match in _WORD_RE.finditer(text)
        if any(ch.isalnum() for ch in match.group())
    ]


def _load_abbreviations() -> frozenset[str]:
    raw = resources.files("marginalia.data").joinpath("abbreviations.txt").read_text("utf-8")
    entries = set()
    for line in raw.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            entries.add(line.lower())
    return frozenset(entries)


#: Tokens (ending in '.') after which a sentence boundary is suppressed.
ABBREVIATIONS: frozenset[str] = _load_abbreviations()

# Terminal punctuation optionally followed by closing quotes/brackets.
_TERMINAL_RE = re.compile(r"[.!?][\"'\)\]»’”]*")
_WRAPPER_CHARS = "\"'()[]«»‘’“”"


@dataclass(frozen=True)
class Sentence:
    """One sentence of a paragraph.

    ``char_span`` is a half-open code-point range into the paragraph text;
    spans of a paragraph's sentences are ascending, never overlap, and the
    text between consecutive spans is whitespace only.
    """

    index: int
    text: str
    char_span: tuple[int, int]
    tokens: list[str]


@dataclass(frozen=True)
class Paragraph:
    """One paragraph: a maximal run of non-blank lines in the source text."""

    index: int
    text: str
    sentences: list[Sentence]
    content_hash: int

    @classmethod
    def from_text(cls, text: str, index: int = 0) -> "Paragraph":
        return cls(
            index=index,
            text=text,
            sentences=split_sentences(text),
            content_hash=content_hash(text),
        )

    def with_index(self, index: int) -> "Paragraph":
        return self if index == self.index else replace(self, index=index)


def _preceding_token(text: str, end: int) -> str:
    """Token (word plus punctuation) ending at ``end``, wrappers stripped."""
    start = 0
    for i in range(end - 1, -1, -1):
        if text[i].isspace():
            start = i + 1
            break
    return text[start:end].strip(_WRAPPER_CHARS)


def _boundaries(text: str) -> list[int]:
    """End positions of internal sentence boundaries.

    A boundary sits after terminal punctuation (plus any closing quotes or
    brackets) that is followed by whitespace and then an uppercase letter or
    digit, unless the token before the period is a known abbreviation.
    """
    bounds = []
    for match in _TERMINAL_RE.finditer(text):
        end = match.end()
        follow = re.match(r"\s+(\S)", text[end:])
        if follow is None:
            continue
        nxt = follow.group(1)
        if not (nxt.isupper() or nxt.isdigit()):
            continue
        if _preceding_token(text, end).lower() in ABBREVIATIONS:
            continue
        bounds.append(end)
    return bounds


def split_sentences(paragraph_text: str) -> list[Sentence]:
    """Split paragraph text into sentences by rule-based boundary detection.

    Trailing text without terminal punctuation forms a final sentence; a
    whitespace-only paragraph yields no sentences.
    """
    first = next((i for i, ch in enumerate(paragraph_text) if not ch.isspace()), None)
    if first is None:
        return []
    last_end = len(paragraph_text.rstrip())

    spans: list[tuple[int, int]] = []
    start = first
    for bound in _boundaries(paragraph_text):
        if bound <= start or bound >= last_end:
            continue
        spans.append((start, bound))
        nxt = bound
        while paragraph_text[nxt].isspace():
            nxt += 1
        start = nxt
    spans.append((start, last_end))

    return [
        Sentence(
            index=i,
            text=paragraph_text[a:b],
            char_span=(a, b),
            tokens=tokenize(paragraph_text[a:b]),
        )
        for i, (a, b) in enumerate(spans)
    ]


def split_paragraphs_with_separators(text: str) -> tuple[list[Paragraph], list[str]]:
    """Split text into paragraphs, keeping the separator runs between them.

    Paragraphs are maximal runs of non-blank lines (a line is blank when it
    is empty or whitespace-only). Returns ``(paragraphs, separators)`` with
    ``len(separators) == len(paragraphs) + 1``;
    ``separators[0] + p0.text + separators[1] + p1.text + ...`` reproduces
    the input exactly.
    """
    lines = text.split("\n")
    offsets = []
    pos = 0
    for line in lines:
        offsets.append(pos)
        pos += len(line) + 1

    # Runs of consecutive non-blank lines, as (first, last) line indices.
    runs: list[tuple[int, int]] = []
    run_start = None
    for i, line in enumerate(lines):
        blank = line.strip() == ""
        if blank:
            if run_start is not None:
                runs.append((run_start, i - 1))
                run_start = None
        elif run_start is None:
            run_start = i
    if run_start is not None:
        runs.append((run_start, len(lines) - 1))

    paragraphs: list[Paragraph] = []
    separators: list[str] = []
    prev_end = 0
    for idx, (a, b) in enumerate(runs):
        start = offsets[a]
        end = offsets[b] + len(lines[b])
        separators.append(text[prev_end:start])
        paragraphs.append(Paragraph.from_text(text[start:end], index=idx))
        prev_end = end
    separators.append(text[prev_end:])
    return paragraphs, separators


def split_paragraphs(text: str) -> list[Paragraph]:
    """Paragraphs of ``text`` in order; empty/whitespace input gives []."""
    return split_paragraphs_with_separators(text)[0]
