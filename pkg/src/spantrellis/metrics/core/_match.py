"""Match predicted spans against gold spans.

Local matching requires the same label at the same position; global
matching ignores position. Both are one-to-one, which for exact-key
equality is the intersection of two multisets.
"""

from collections import Counter
from typing import Callable, Hashable, Iterable

from .main import MatchCounts, MetricSpan, SpanMatchResult


class SpanMatcher:
    """Count matches under a key; spans with equal keys are interchangeable."""

    def __init__(self, key: Callable[[MetricSpan], Hashable]) -> None:
        """
        Args:
            key (Callable): Maps a span to what must be equal for a match.
        """
        self.key = key

    def match(self, pred: Iterable[MetricSpan], gold: Iterable[MetricSpan]) -> SpanMatchResult:
        pred_keys = Counter((s.ontology, s.label, self.key(s)) for s in pred)
        gold_keys = Counter((s.ontology, s.label, self.key(s)) for s in gold)
        counts: dict[tuple[str, str], MatchCounts] = {}
        for key in pred_keys.keys() | gold_keys.keys():
            tp = min(pred_keys[key], gold_keys[key])
            c = MatchCounts(tp, pred_keys[key] - tp, gold_keys[key] - tp)
            label = key[:2]
            counts[label] = counts.get(label, MatchCounts()) + c
        return SpanMatchResult(counts=counts)


def location(span: MetricSpan) -> tuple[int, int]:
    return span.start, span.end


def anywhere(span: MetricSpan) -> None:
    return None


LOCAL = SpanMatcher(location)
GLOBAL = SpanMatcher(anywhere)
