"""Rebuild entity spans from begin labels and end markers.

A begin label opens a span of its ontology at the frame it is emitted;
the ontology's end marker closes the most recently opened span of that
ontology. Ontologies are tracked independently, so spans of different
ontologies may overlap freely while spans of one ontology nest.
"""

import logging

from spantrellis.utils.errors import ContractViolation

from .main import DecodedSpan, Hypothesis, MarkerSchema, SpanExtraction, SpuriousMarker

logger = logging.getLogger(__name__)


class SpanExtractor:
    """Turn a decoded label sequence into spans."""

    def __init__(self, markers: MarkerSchema) -> None:
        """
        Args:
            markers (MarkerSchema): Begin-label and end-marker ids.
        """
        self.markers = markers

    def extract(self, labels: tuple[int, ...], emit_frames: tuple[int, ...], T: int) -> SpanExtraction:
        """Pair begin labels with end markers.

        Args:
            labels (tuple[int, ...]): Label ids in emission order.
            emit_frames (tuple[int, ...]): 1-based frame per label.
            T (int): Frame count; unclosed spans end here.

        Returns:
            SpanExtraction: Spans in closing order followed by unclosed
            spans, plus any spurious end markers.
        """
        open_spans: dict[str, list[tuple[str, int]]] = {}
        spans: list[DecodedSpan] = []
        spurious: list[SpuriousMarker] = []

        for label, frame in zip(labels, emit_frames):
            if label in self.markers.begin:
                ontology, name = self.markers.begin[label]
                open_spans.setdefault(ontology, []).append((name, frame))
            elif label in self.markers.end:
                ontology = self.markers.end[label]
                stack = open_spans.get(ontology)
                if not stack:
                    spurious.append(SpuriousMarker(ontology=ontology, frame=frame))
                    continue
                name, start = stack.pop()
                spans.append(DecodedSpan(ontology, name, start, frame))
            else:
                raise ContractViolation(f"Label id {label} is neither a begin label nor an end marker.")

        for ontology, stack in open_spans.items():
            for name, start in stack:
                spans.append(DecodedSpan(ontology, name, start, T, closed=False))

        if spurious:
            logger.debug("%d spurious end markers", len(spurious))
        return SpanExtraction(spans=spans, spurious=spurious)

    def from_hypothesis(self, hyp: Hypothesis, T: int) -> SpanExtraction:
        return self.extract(hyp.labels, hyp.emit_frames, T)
