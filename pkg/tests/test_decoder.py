import json
import math

import numpy as np
import pytest

from spantrellis.decoder.core._spans import SpanExtractor
from spantrellis.decoder.main import (
    DecodeConfig,
    DecodedSpan,
    DecodeResult,
    DecodeResultWriter,
    Hypothesis,
    Scorer,
    SpuriousMarker,
    beam_search,
    extract_spans,
)
from spantrellis.model.main import ModelConfig, init_params, make_scorer
from spantrellis.utils.errors import ConfigError, ContractViolation
from spantrellis.verify.core._random import TableScorer, exhaustive_best


class CountScorer(Scorer):
    """Two-symbol scorer whose distribution depends on the labels emitted so far."""

    TABLE = {0: [0.5, 0.5], 1: [0.8, 0.2], 2: [1.0, 0.0]}

    def initial_state(self):
        return 0

    def score(self, state, t):
        with np.errstate(divide="ignore"):
            return np.log(self.TABLE[min(state, 2)])

    def advance(self, state, label, t):
        return state if label == 0 else state + 1


class BrokenScorer(CountScorer):
    def score(self, state, t):
        return np.log([0.5, 0.2])


def test_merge_sums_paths_with_the_same_labels():
    config = DecodeConfig(beam=math.inf, max_expansion=1, max_hyps=None, merge=True)
    hyps = beam_search(CountScorer(), T=2, config=config)
    assert [h.labels for h in hyps] == [(1,), (), (1, 1)]
    assert hyps[0].score == pytest.approx(np.log(0.32 + 0.2))
    assert hyps[0].emit_frames == (1,)
    assert hyps[1].score == pytest.approx(np.log(0.25))
    assert hyps[2].emit_frames == (1, 2)


def test_without_merge_every_path_survives():
    config = DecodeConfig.exhaustive(max_expansion=1)
    hyps = beam_search(CountScorer(), T=2, config=config)
    assert [(h.labels, h.emit_frames) for h in hyps] == [((1,), (1,)), ((), ()), ((1,), (2,)), ((1, 1), (1, 2))]
    np.testing.assert_allclose(np.exp([h.score for h in hyps]), [0.32, 0.25, 0.2, 0.08])


def test_width_cap_keeps_the_best():
    hyps = beam_search(CountScorer(), T=2, config=DecodeConfig(beam=math.inf, max_expansion=1, max_hyps=1, merge=False))
    assert len(hyps) == 1


def test_zero_beam_never_empties():
    hyps = beam_search(CountScorer(), T=3, config=DecodeConfig(beam=0.0, max_expansion=2, max_hyps=None))
    assert hyps
    assert all(a.sort_key() <= b.sort_key() for a, b in zip(hyps, hyps[1:]))


@pytest.mark.parametrize("seed", range(6))
def test_exhaustive_search_finds_the_best_path(seed):
    scorer = TableScorer(vocab=3, seed=seed)
    score, labels, frames = exhaustive_best(scorer, T=3, max_expansion=2)
    best = beam_search(scorer, T=3, config=DecodeConfig.exhaustive(max_expansion=2))[0]
    assert best.score == pytest.approx(score, abs=1e-9)
    assert (best.labels, best.emit_frames) == (labels, frames)


PRUNING_LADDER = [(math.inf, k) for k in (1, 2, 3, 4, 8)] + [(b, None) for b in (0.0, 0.5, 1.0, 2.0, 4.0)]


@pytest.mark.parametrize("merge", [True, False])
@pytest.mark.parametrize("seed", range(4))
def test_pruning_is_bounded_by_the_unpruned_search(seed, merge):
    scorer = TableScorer(vocab=4, seed=seed)
    unpruned = beam_search(scorer, T=4, config=DecodeConfig(beam=math.inf, max_expansion=2, max_hyps=None, merge=merge))
    for beam, max_hyps in PRUNING_LADDER:
        config = DecodeConfig(beam=beam, max_expansion=2, max_hyps=max_hyps, merge=merge)
        assert beam_search(scorer, T=4, config=config)[0].score <= unpruned[0].score + 1e-12, (beam, max_hyps)
    if not merge:
        assert unpruned[0].score == pytest.approx(exhaustive_best(scorer, T=4, max_expansion=2)[0], abs=1e-9)


@pytest.mark.parametrize("merge", [True, False])
@pytest.mark.parametrize("seed", range(8))
def test_single_decision_pruning_is_monotone(seed, merge):
    # One frame and one wave: every setting prunes the same candidate set.
    scorer = TableScorer(vocab=5, seed=seed)
    for ladder in (PRUNING_LADDER[:5], PRUNING_LADDER[5:]):
        scores = [
            beam_search(scorer, T=1, config=DecodeConfig(beam=b, max_expansion=1, max_hyps=k, merge=merge))[0].score
            for b, k in ladder
        ]
        assert scores == sorted(scores)


def rescore(scorer, hyp, T) -> float:
    """Walk a hypothesis through the scorer from its initial state."""
    state, total = scorer.initial_state(), 0.0
    for t in range(1, T + 1):
        for label in [k for k, frame in zip(hyp.labels, hyp.emit_frames) if frame == t]:
            total += float(scorer.score(state, t)[label])
            state = scorer.advance(state, label, t)
        total += float(scorer.score(state, t)[0])
        state = scorer.advance(state, 0, t)
    return total


@pytest.mark.parametrize("architecture", ["transducer", "seq2seq"])
def test_hypothesis_scores_replay_from_a_fresh_state(architecture):
    config = ModelConfig(input_vocab=6, output_vocab=4, hidden=4, embedding=4, layers=1, window=2, seed=2, architecture=architecture)
    params = init_params(config)
    tokens = np.array([1, 5, 0, 2, 3])
    hyps = beam_search(make_scorer(tokens, params), T=5, config=DecodeConfig(beam=6.0, max_expansion=2, max_hyps=6, merge=False))
    assert len(hyps) > 1
    for hyp in hyps:
        assert rescore(make_scorer(tokens, params), hyp, T=5) == pytest.approx(hyp.score, abs=1e-9)


def test_emit_frames_are_one_based_and_sorted():
    scorer = TableScorer(vocab=4, seed=11)
    for hyp in beam_search(scorer, T=5, config=DecodeConfig(beam=8.0, max_expansion=3, max_hyps=6)):
        assert all(1 <= f <= 5 for f in hyp.emit_frames)
        assert list(hyp.emit_frames) == sorted(hyp.emit_frames)


def test_unnormalized_scorer_is_rejected():
    with pytest.raises(ContractViolation, match="sums to"):
        beam_search(BrokenScorer(), T=1)


def test_search_needs_a_frame():
    with pytest.raises(ContractViolation):
        beam_search(CountScorer(), T=0)


@pytest.mark.parametrize("kwargs", [{"beam": -1.0}, {"max_expansion": 0}, {"max_hyps": 0}])
def test_invalid_config(kwargs):
    with pytest.raises(ConfigError):
        DecodeConfig(**kwargs)


def test_hypothesis_rejects_decreasing_frames():
    with pytest.raises(ContractViolation, match="non-decreasing"):
        Hypothesis(labels=(1, 2), emit_frames=(3, 2), score=0.0, pred_state=None)


def test_spans_from_nested_treatment_and_symptom(schema):
    hyp = Hypothesis(
        labels=(20, 6, 22, 11, 1, 5, 2, 5, 3, 5),
        emit_frames=(2, 3, 4, 4, 7, 7, 8, 9, 10, 10),
        score=-1.0,
        pred_state=None,
    )
    extraction = extract_spans(hyp, schema.markers(), T=10)
    assert extraction.spans == [
        DecodedSpan("treatments", "physiotherapy", 2, 4),
        DecodedSpan("symptoms", "back_pain", 3, 4),
        DecodedSpan("medications", "drug_name", 7, 7),
        DecodedSpan("medications", "dosage", 8, 9),
        DecodedSpan("medications", "frequency", 10, 10),
    ]
    assert extraction.spurious == []


def test_end_marker_closes_innermost_span(schema):
    extraction = SpanExtractor(schema.markers()).extract((1, 2, 5, 5), (1, 2, 3, 4), T=4)
    assert extraction.spans == [
        DecodedSpan("medications", "dosage", 2, 3),
        DecodedSpan("medications", "drug_name", 1, 4),
    ]


def test_spurious_and_unclosed_markers(schema):
    extraction = SpanExtractor(schema.markers()).extract((5, 6), (1, 2), T=5)
    assert extraction.spurious == [SpuriousMarker("medications", 1)]
    assert extraction.spans == [DecodedSpan("symptoms", "back_pain", 2, 5, closed=False)]


def test_unknown_label_id(schema):
    with pytest.raises(ContractViolation, match="neither"):
        SpanExtractor(schema.markers()).extract((99,), (1,), T=1)


def test_decode_results_are_json_lines(tmp_path, schema):
    hyp = Hypothesis(labels=(6, 11), emit_frames=(2, 3), score=-0.5, pred_state=None)
    result = DecodeResult("conv-1", 4, hyp, extract_spans(hyp, schema.markers(), 4))
    path = DecodeResultWriter(tmp_path / "out" / "decode.jsonl").write([result, result])

    lines = path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 2
    record = json.loads(lines[0])
    assert record["emit_frames"] == [2, 3]
    assert record["spans"] == [
        {"ontology": "symptoms", "label": "back_pain", "start_frame": 2, "end_frame": 3, "closed": True}
    ]
    assert record["spurious_markers"] == []
