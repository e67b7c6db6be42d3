"""Span match counts and the precision/recall/F1 derived from them."""

from dataclasses import dataclass, field
from typing import Literal

type Average = Literal["micro", "macro"]


@dataclass(frozen=True, order=True)
class MetricSpan:
    """A span as metrics see it: names plus 1-based frame bounds."""

    ontology: str
    label: str
    start: int
    end: int


def _f1(precision: float, recall: float) -> float:
    return 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class MatchCounts:
    """True positive, false positive and false negative counts."""

    tp: int = 0
    fp: int = 0
    fn: int = 0

    def __add__(self, other: "MatchCounts") -> "MatchCounts":
        return MatchCounts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)

    @property
    def precision(self) -> float:
        return 0.0 if self.tp + self.fp == 0 else self.tp / (self.tp + self.fp)

    @property
    def recall(self) -> float:
        return 0.0 if self.tp + self.fn == 0 else self.tp / (self.tp + self.fn)

    @property
    def f1(self) -> float:
        return _f1(self.precision, self.recall)


@dataclass(frozen=True)
class SpanMatchResult:
    """Match counts keyed by (ontology, label).

    Attributes:
        counts (dict[tuple[str, str], MatchCounts]): Per-label counts.
    """

    counts: dict[tuple[str, str], MatchCounts] = field(default_factory=dict)

    def __add__(self, other: "SpanMatchResult") -> "SpanMatchResult":
        merged = dict(self.counts)
        for key, c in other.counts.items():
            merged[key] = merged.get(key, MatchCounts()) + c
        return SpanMatchResult(counts=merged)

    @property
    def total(self) -> MatchCounts:
        return sum(self.counts.values(), MatchCounts())

    @property
    def precision(self) -> float:
        return self.total.precision

    @property
    def recall(self) -> float:
        return self.total.recall

    @property
    def f1(self) -> float:
        return self.total.f1

    def by_ontology(self) -> dict[str, MatchCounts]:
        """Pool the label counts of each ontology, ordered by ontology name."""
        pooled: dict[str, MatchCounts] = {}
        for (ontology, _), c in sorted(self.counts.items()):
            pooled[ontology] = pooled.get(ontology, MatchCounts()) + c
        return pooled
