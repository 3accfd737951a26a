"""ROUGE-1/2/L precision, recall and F, plus corpus means.

The simplest standard configuration: lowercase word tokens (from textseg),
no stemming, clipped n-gram counts for ROUGE-1/2 and a summary-level
longest common subsequence for ROUGE-L. Corpus evaluation averages each of
the nine cells (three variants x precision/recall/F) arithmetically.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .textseg import tokenize

__all__ = [
    "VARIANTS",
    "CorpusReport",
    "RougeScore",
    "central_agreement",
    "evaluate_corpus",
    "parse_pairs_jsonl",
    "rouge_l",
    "rouge_n",
    "score_pair",
]

VARIANTS = ("rouge-1", "rouge-2", "rouge-l")


@dataclass(frozen=True)
class RougeScore:
    variant: str
    precision: float
    recall: float
    f: float

    @classmethod
    def from_pr(cls, variant: str, precision: float, recall: float) -> "RougeScore":
        denominator = precision + recall
        f = 2 * precision * recall / denominator if denominator > 0 else 0.0
        return cls(variant=variant, precision=precision, recall=recall, f=f)


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(candidate: Sequence[str], reference: Sequence[str], n: int) -> RougeScore:
    """Clipped n-gram overlap. Empty gram sets contribute zero scores."""
    if n not in (1, 2):
        raise ValueError(f"n must be 1 or 2, got {n}")
    cand_grams = _ngrams(candidate, n)
    ref_grams = _ngrams(reference, n)
    overlap = sum((cand_grams & ref_grams).values())
    cand_total = sum(cand_grams.values())
    ref_total = sum(ref_grams.values())
    precision = overlap / cand_total if cand_total else 0.0
    recall = overlap / ref_total if ref_total else 0.0
    return RougeScore.from_pr(f"rouge-{n}", precision, recall)


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    previous = [0] * (len(b) + 1)
    for x in a:
        current = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                current.append(previous[j - 1] + 1)
            else:
                current.append(max(previous[j], current[j - 1]))
        previous = current
    return previous[-1]


def rouge_l(candidate: Sequence[str], reference: Sequence[str]) -> RougeScore:
    """Longest-common-subsequence overlap over whole token sequences."""
    lcs = _lcs_length(candidate, reference)
    precision = lcs / len(candidate) if candidate else 0.0
    recall = lcs / len(reference) if reference else 0.0
    return RougeScore.from_pr("rouge-l", precision, recall)


def score_pair(candidate_text: str, reference_text: str) -> dict[str, RougeScore]:
    """All three variants for one candidate/reference pair of raw texts."""
    cand = tokenize(candidate_text)
    ref = tokenize(reference_text)
    return {
        "rouge-1": rouge_n(cand, ref, 1),
        "rouge-2": rouge_n(cand, ref, 2),
        "rouge-l": rouge_l(cand, ref),
    }


@dataclass(frozen=True)
class CorpusReport:
    """Mean scores per variant over a pair corpus (nine cells)."""

    means: dict[str, RougeScore]
    pairs: int

    def to_json_dict(self) -> dict:
        return {
            "pairs": self.pairs,
            "scores": {
                variant: {
                    "precision": score.precision,
                    "recall": score.recall,
                    "f": score.f,
                }
                for variant, score in self.means.items()
            },
        }

    def to_text(self) -> str:
        lines = [f"{'variant':10s} {'recall':>10s} {'precision':>10s} {'f':>10s}"]
        for variant in VARIANTS:
            score = self.means[variant]
            lines.append(
                f"{variant:10s} {score.recall:10.4f} {score.precision:10.4f} {score.f:10.4f}"
            )
        lines.append(f"pairs: {self.pairs}")
        return "\n".join(lines)


def evaluate_corpus(pairs: Iterable[tuple[str, str]]) -> CorpusReport:
    """Arithmetic mean of per-pair scores for each of the nine cells."""
    totals = {variant: [0.0, 0.0, 0.0] for variant in VARIANTS}
    count = 0
    for candidate_text, reference_text in pairs:
        for variant, score in score_pair(candidate_text, reference_text).items():
            cell = totals[variant]
            cell[0] += score.precision
            cell[1] += score.recall
            cell[2] += score.f
        count += 1
    if count == 0:
        raise ValueError("corpus is empty")
    means = {
        variant: RougeScore(
            variant=variant,
            precision=cell[0] / count,
            recall=cell[1] / count,
            f=cell[2] / count,
        )
        for variant, cell in totals.items()
    }
    return CorpusReport(means=means, pairs=count)


def central_agreement(system: Sequence[int], human: Sequence[int]) -> float:
    """Fraction of positions where both chose the same sentence index."""
    if len(system) != len(human):
        raise ValueError(f"length mismatch: {len(system)} vs {len(human)}")
    if not system:
        raise ValueError("cannot compute agreement on empty lists")
    matches = sum(1 for s, h in zip(system, human) if s == h)
    return matches / len(system)


def parse_pairs_jsonl(lines: Iterable[str]) -> list[tuple[str, str]]:
    """Corpus format: one {"candidate": str, "reference": str} object per line."""
    pairs = []
    for line_no, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
            pairs.append((record["candidate"], record["reference"]))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ValueError(f"line {line_no}: invalid corpus record ({exc})") from None
    return pairs
