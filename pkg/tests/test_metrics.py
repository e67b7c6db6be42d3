import json

import pandas as pd
import pytest

from spantrellis.decoder.main import DecodedSpan
from spantrellis.metrics.main import (
    REPORT_COLUMNS,
    MatchCounts,
    MetricSpan,
    ReportWriter,
    SpanMatchResult,
    decoded_spans,
    global_f1,
    gold_spans,
    local_f1,
    per_ontology_report,
)

BACK_PAIN = MetricSpan("symptoms", "back_pain", 5, 7)
MOVED = MetricSpan("symptoms", "back_pain", 9, 11)


def test_wrong_location_is_local_miss_but_global_hit():
    local = local_f1([MOVED], [BACK_PAIN])
    glob = global_f1([MOVED], [BACK_PAIN])
    assert (local.total.tp, local.total.fp, local.total.fn) == (0, 1, 1)
    assert local.f1 == 0.0
    assert glob.f1 == 1.0


def test_perfect_prediction(schema, back_pain_sequence):
    gold = gold_spans(back_pain_sequence, schema)
    assert MetricSpan("symptoms", "back_pain", 3, 4) in gold
    assert local_f1(gold, gold).f1 == 1.0
    assert global_f1(list(reversed(gold)), gold).f1 == 1.0


def test_empty_sets_score_zero():
    assert local_f1([], []).f1 == 0.0
    assert local_f1([], [BACK_PAIN]).recall == 0.0
    assert global_f1([BACK_PAIN], []).precision == 0.0


def test_global_matching_is_a_multiset_intersection():
    pred = [BACK_PAIN, BACK_PAIN, MOVED]
    gold = [BACK_PAIN, MetricSpan("symptoms", "cough", 1, 1)]
    result = global_f1(pred, gold)
    assert result.counts[("symptoms", "back_pain")] == MatchCounts(tp=1, fp=2, fn=0)
    assert result.counts[("symptoms", "cough")] == MatchCounts(tp=0, fp=0, fn=1)
    assert result.precision == pytest.approx(1 / 3)
    assert result.recall == pytest.approx(1 / 2)
    assert result.f1 == pytest.approx(0.4)


def test_local_never_exceeds_global(rng):
    labels = [("symptoms", "cough"), ("medications", "dosage"), ("symptoms", "fever")]

    def draw(n):
        spans = []
        for _ in range(n):
            ontology, label = labels[int(rng.integers(3))]
            start = int(rng.integers(1, 8))
            spans.append(MetricSpan(ontology, label, start, start + int(rng.integers(0, 3))))
        return spans

    for _ in range(100):
        pred, gold = draw(int(rng.integers(0, 6))), draw(int(rng.integers(0, 6)))
        assert local_f1(pred, gold).total.tp <= global_f1(pred, gold).total.tp
        assert local_f1(pred, gold).f1 <= global_f1(pred, gold).f1 + 1e-12


def test_results_add_up_over_sequences():
    first = local_f1([BACK_PAIN], [BACK_PAIN])
    second = local_f1([MOVED], [BACK_PAIN])
    pooled = first + second
    assert pooled.total == MatchCounts(tp=1, fp=1, fn=1)
    assert pooled.f1 == pytest.approx(0.5)


def test_unclosed_decoded_spans_count():
    spans = decoded_spans([DecodedSpan("symptoms", "back_pain", 5, 7), DecodedSpan("symptoms", "cough", 2, 9, closed=False)])
    assert spans == [BACK_PAIN, MetricSpan("symptoms", "cough", 2, 9)]


@pytest.fixture
def mixed_result() -> SpanMatchResult:
    return SpanMatchResult(
        counts={
            ("symptoms", "back_pain"): MatchCounts(tp=3, fp=1, fn=0),
            ("symptoms", "cough"): MatchCounts(tp=1, fp=0, fn=1),
            ("medications", "dosage"): MatchCounts(tp=0, fp=2, fn=2),
        }
    )


def test_micro_report(mixed_result):
    table = per_ontology_report(mixed_result)
    assert list(table.columns) == REPORT_COLUMNS
    assert list(table["ontology"]) == ["Overall", "medications", "symptoms"]
    overall = table.iloc[0]
    assert (overall["tp"], overall["fp"], overall["fn"]) == (4, 3, 3)
    assert overall["f1"] == pytest.approx(4 / 7)
    assert table.iloc[2]["precision"] == pytest.approx(0.8)


def test_macro_report_averages_ontologies(mixed_result):
    table = per_ontology_report(mixed_result, average="macro")
    symptoms_f1 = 2 * 0.8 * 0.8 / 1.6
    assert table.iloc[0]["f1"] == pytest.approx((0.0 + symptoms_f1) / 2)
    with pytest.raises(ValueError, match="average"):
        per_ontology_report(mixed_result, average="weighted")


def test_report_files(tmp_path, mixed_result):
    writer = ReportWriter(per_ontology_report(mixed_result))
    csv_path = writer.to_csv(tmp_path / "report.csv")
    json_path = writer.to_json(tmp_path / "report.json")

    frame = pd.read_csv(csv_path)
    assert list(frame.columns) == REPORT_COLUMNS
    assert len(frame) == 3
    record = json.loads(json_path.read_text(encoding="utf-8"))
    assert record["columns"] == REPORT_COLUMNS
    assert record["rows"][0]["ontology"] == "Overall"
    assert record["rows"][0]["tp"] == 4
