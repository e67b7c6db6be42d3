"""Expose local and global span F1 and per-ontology reports."""

from typing import Iterable

import pandas as pd

from spantrellis.corpus.core.main import LabeledSequence, OntologySchema
from spantrellis.decoder.core.main import DecodedSpan

from .core._match import GLOBAL, LOCAL
from .core._report import REPORT_COLUMNS, OntologyReportFactory, ReportWriter
from .core.main import Average, MatchCounts, MetricSpan, SpanMatchResult

__all__ = [
    "REPORT_COLUMNS",
    "Average",
    "MatchCounts",
    "MetricSpan",
    "ReportWriter",
    "SpanMatchResult",
    "decoded_spans",
    "global_f1",
    "gold_spans",
    "local_f1",
    "per_ontology_report",
]


def gold_spans(seq: LabeledSequence, schema: OntologySchema) -> list[MetricSpan]:
    """Corpus spans as named spans over 1-based frames."""
    return [
        MetricSpan(
            ontology=schema.ontologies[s.ontology].name,
            label=schema.ontologies[s.ontology].labels[s.label],
            start=s.start + 1,
            end=s.end + 1,
        )
        for s in seq.spans
    ]


def decoded_spans(spans: Iterable[DecodedSpan]) -> list[MetricSpan]:
    """Decoder spans, closed or not, as metric spans."""
    return [MetricSpan(s.ontology, s.label, s.start_frame, s.end_frame) for s in spans]


def local_f1(pred: Iterable[MetricSpan], gold: Iterable[MetricSpan]) -> SpanMatchResult:
    """Match on label and exact (start, end)."""
    return LOCAL.match(pred, gold)


def global_f1(pred: Iterable[MetricSpan], gold: Iterable[MetricSpan]) -> SpanMatchResult:
    """Match on label only, as multisets."""
    return GLOBAL.match(pred, gold)


def per_ontology_report(result: SpanMatchResult, average: Average = "micro") -> pd.DataFrame:
    """One row per ontology, preceded by the Overall row.

    Args:
        result (SpanMatchResult): Counts pooled over an evaluation set.
        average (Average): ``micro`` pools counts, ``macro`` averages the
            ontology rows.

    Returns:
        pd.DataFrame: Columns ``REPORT_COLUMNS``.
    """
    return OntologyReportFactory(result, average).build()
