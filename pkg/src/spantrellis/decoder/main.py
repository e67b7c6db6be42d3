"""Expose frame-synchronous decoding and span reconstruction."""

from .core._results import DecodeResult, DecodeResultWriter
from .core._search import FrameSynchronousSearch
from .core._spans import SpanExtractor
from .core.main import (
    BLANK_ID,
    DecodeConfig,
    DecodedSpan,
    Hypothesis,
    MarkerSchema,
    Scorer,
    SpanExtraction,
    SpuriousMarker,
)

__all__ = [
    "BLANK_ID",
    "DecodeConfig",
    "DecodeResult",
    "DecodeResultWriter",
    "DecodedSpan",
    "Hypothesis",
    "MarkerSchema",
    "Scorer",
    "SpanExtraction",
    "SpuriousMarker",
    "beam_search",
    "extract_spans",
]


def beam_search(scorer: Scorer, T: int, config: DecodeConfig | None = None) -> list[Hypothesis]:
    """Decode T frames and return complete hypotheses, best first.

    Args:
        scorer (Scorer): Per-(state, frame) label distribution provider.
        T (int): Number of input frames.
        config (DecodeConfig | None): Beam limits; defaults apply when None.

    Raises:
        ContractViolation: If the scorer returns an unnormalized distribution.
    """
    return FrameSynchronousSearch(scorer, config or DecodeConfig()).run(T)


def extract_spans(hyp: Hypothesis, markers: MarkerSchema, T: int) -> SpanExtraction:
    """Rebuild (ontology, label, start_frame, end_frame) spans from ``hyp``."""
    return SpanExtractor(markers).from_hypothesis(hyp, T)
