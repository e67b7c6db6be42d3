import json
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from spantrellis.corpus.main import CorpusContainer, save_corpus, segmented_views
from spantrellis.trainer.core._experiments import SEGMENTED_VIEWS, ShortVsLong
from spantrellis.trainer.main import (
    EXPERIMENTS,
    Evaluator,
    ExperimentConfig,
    SegmentRange,
    TrainingCurve,
    config_to_dict,
    load_config,
    prepare_data,
    pseudo_label,
    run_experiment,
    train,
    write_config,
)
from spantrellis.utils.errors import ConfigError, CriterionFailure


@pytest.fixture
def tiny_data(tiny_experiment):
    return prepare_data(tiny_experiment)


def test_prepared_splits(tiny_data):
    assert (len(tiny_data.labeled), len(tiny_data.unlabeled), len(tiny_data.test)) == (6, 4, 3)
    assert tiny_data.input_vocab == 84
    assert tiny_data.schema.output_vocab == 22
    assert [s.tokens for s in tiny_data.labeled[:3]] != [s.tokens for s in tiny_data.test]


def test_corpus_files_replace_generated_splits(tmp_path, tiny_experiment, tiny_data):
    path = save_corpus(tmp_path / "labeled.jsonl", CorpusContainer(tiny_data.labeled[:2], tiny_data.schema, tiny_data.input_vocab))
    data = prepare_data(replace(tiny_experiment, labeled=str(path)))
    assert data.labeled == tiny_data.labeled[:2]
    assert data.test == tiny_data.test


def test_training_writes_curve_checkpoint_and_figures(tmp_path, tiny_experiment, tiny_data):
    result = train(tiny_experiment, tmp_path, tiny_data)
    # 6 sequences in batches of 3 for 2 epochs, evaluated every 2 steps.
    assert result.curve.steps == [1, 2, 3, 4]
    assert result.curve.eval_steps == [2, 4]
    assert all(np.isfinite(result.curve.nll))
    assert 0.0 <= result.curve.test_f1[-1] <= 1.0
    for name in ("curve.csv", "checkpoint.bin", "nll.png", "train_f1.png", "test_f1.png"):
        assert (tmp_path / name).exists(), name
    assert result.checkpoint == str(tmp_path / "checkpoint.bin")


def test_training_is_reproducible_for_any_worker_count(tiny_experiment, tiny_data):
    first = train(tiny_experiment, data=tiny_data)
    second = train(replace(tiny_experiment, workers=3), data=tiny_data)
    assert first.curve.nll == second.curve.nll
    np.testing.assert_array_equal(first.curve.test_f1, second.curve.test_f1)


def test_zero_band_trains_exactly_like_fixed(tiny_experiment, tiny_data):
    fixed = train(tiny_experiment, data=tiny_data)
    band = train(replace(tiny_experiment, loss="constrained", delta=0), data=tiny_data)
    assert fixed.curve.nll == band.curve.nll


def test_full_band_trains_exactly_like_unconstrained(tiny_experiment, tiny_data):
    # Wider than any window's frames or labels.
    free = train(replace(tiny_experiment, loss="unconstrained"), data=tiny_data)
    band = train(replace(tiny_experiment, loss="constrained", delta=1000), data=tiny_data)
    assert free.curve.nll == band.curve.nll


def test_fixed_loss_overfits_one_sequence(tiny_experiment, tiny_data):
    config = replace(
        tiny_experiment,
        segment=SegmentRange(40, 40),
        epochs=50,
        batch_size=1,
        eval_every=1000,
        optimizer=replace(tiny_experiment.optimizer, lr=1e-3),
    )
    result = train(config, data=replace(tiny_data, labeled=tiny_data.labeled[:1]))
    assert len(result.curve.nll) == 50
    assert all(b < a for a, b in zip(result.curve.nll, result.curve.nll[1:]))


@pytest.mark.parametrize("loss,delta", [("unconstrained", None), ("constrained", 2)])
def test_other_losses_train(tiny_experiment, tiny_data, loss, delta):
    result = train(replace(tiny_experiment, loss=loss, delta=delta, epochs=1), data=tiny_data)
    assert len(result.curve.steps) == 2
    assert all(np.isfinite(result.curve.nll))


def test_seq2seq_trains_on_the_fixed_alignment(tiny_experiment, tiny_data):
    config = replace(tiny_experiment, epochs=1, model=replace(tiny_experiment.model, architecture="seq2seq"))
    result = train(config, data=tiny_data)
    assert result.config.architecture == "seq2seq"
    assert len(result.curve.steps) == 2


def test_zero_epochs_returns_initial_model(tmp_path, tiny_experiment, tiny_data):
    result = train(replace(tiny_experiment, epochs=0), tmp_path, tiny_data)
    assert result.curve.steps == []
    assert (tmp_path / "checkpoint.bin").exists()


def test_pseudo_labels(tmp_path, tiny_experiment, tiny_data):
    result = train(tiny_experiment, tmp_path / "run", tiny_data)
    unlabeled = CorpusContainer(sequences=tiny_data.unlabeled, input_vocab=tiny_data.input_vocab)

    corpus = pseudo_label(result.checkpoint, unlabeled, decode=tiny_experiment.decode, out_path=tmp_path / "pseudo.jsonl")
    assert corpus.pseudo_labeled
    assert [s.source_id for s in corpus.sequences] == [s.source_id for s in tiny_data.unlabeled]
    for seq in corpus.sequences:
        seq.check(tiny_data.schema)
    header = json.loads((tmp_path / "pseudo.jsonl").read_text(encoding="utf-8").splitlines()[0])
    assert header["pseudo_labeled"] is True

    strict = pseudo_label(result.checkpoint, unlabeled, decode=tiny_experiment.decode, threshold=0.0)
    assert strict.sequences == []


def test_pseudo_labeling_nothing(tmp_path, tiny_experiment, tiny_data):
    result = train(replace(tiny_experiment, epochs=0), tmp_path, tiny_data)
    assert pseudo_label(result.checkpoint, CorpusContainer()).sequences == []


def test_config_file_round_trip(tmp_path, tiny_experiment):
    path = write_config(tmp_path / "config.yaml", tiny_experiment)
    assert load_config(path) == tiny_experiment
    assert load_config(path, {"seed": 11}).seed == 11
    assert config_to_dict(tiny_experiment)["version"] == 1


def test_defaults_without_a_file():
    assert load_config(None) == ExperimentConfig()


def test_shipped_config_loads():
    config = load_config(Path(__file__).parents[1] / "configs" / "quick.yaml")
    assert config.name == "quick"
    assert config.data.corpus.filler_vocab == 100
    assert config.model.window == 8


@pytest.mark.parametrize(
    ("text", "message"),
    [
        ("epochs: 2\nlearning_rate: 0.1\n", "unknown keys \\['learning_rate'\\]"),
        ("model:\n  depth: 3\n", "config.model: unknown keys"),
        ("loss: constrained\n", "delta must be given"),
        ("loss: unconstrained\nmodel:\n  architecture: seq2seq\n", "fixed loss only"),
        ("version: 2\n", "Unsupported config version"),
        ("- a\n- b\n", "top level must be a mapping"),
        ("decode:\n  beam: -1\n", "beam must be"),
    ],
)
def test_invalid_config_files(tmp_path, text, message):
    path = tmp_path / "bad.yaml"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ConfigError, match=message):
        load_config(path)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "absent.yaml")


def test_curve_steps_must_increase():
    curve = TrainingCurve()
    with pytest.raises(ValueError):
        curve.record_eval(0.1, 0.2)
    curve.record_step(1, 2.0)
    with pytest.raises(ValueError, match="increase"):
        curve.record_step(1, 1.0)
    long = curve.to_long("fixed")
    assert list(long["metric"]) == ["nll"]


def test_unknown_experiment(tmp_path, tiny_experiment):
    with pytest.raises(ValueError, match="Invalid experiment"):
        run_experiment("bigger-beam", tiny_experiment, tmp_path)
    assert "loss-comparison" in EXPERIMENTS


@pytest.mark.slow
def test_loss_comparison_writes_its_report(tmp_path, tiny_experiment):
    try:
        report = run_experiment("loss-comparison", tiny_experiment, tmp_path)
        assert report.passed
    except CriterionFailure as exc:
        assert exc.criterion == "fixed_beats_unconstrained"
    out = tmp_path / "loss-comparison"
    record = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert [r["series"] for r in record["runs"]] == ["fixed", "unconstrained"]
    assert record["verdict"] in ("pass", "fail")
    for name in ("curves.csv", "nll.png", "fixed/curve.csv", "unconstrained/ontology_report.csv"):
        assert (out / name).exists(), name


def test_short_vs_long_scores_segmented_test_views(tmp_path, tiny_experiment, tiny_data):
    result = train(replace(tiny_experiment, epochs=0), data=tiny_data)
    segment = SegmentRange(5, 8)
    experiment = ShortVsLong(tiny_experiment, tiny_data, tmp_path)

    rng = np.random.default_rng(np.random.SeedSequence(tiny_experiment.seed).spawn(5)[4])
    views = [v for seq in tiny_data.test for v in segmented_views(seq, SEGMENTED_VIEWS, 5, 8, rng)]
    assert all(5 <= len(v.tokens) <= 8 for v in views)
    expected = Evaluator(result.params, tiny_data.schema, tiny_experiment.decode).evaluate(views).local.f1
    assert experiment._segmented_f1(result, segment) == expected
