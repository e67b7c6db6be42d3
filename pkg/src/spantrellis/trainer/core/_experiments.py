"""Scripted experiments comparing alignment losses on synthetic data.

Each experiment trains a few models from the same data and seed, writes
their curves and per-ontology reports, and checks a directional
criterion (for example that the fixed-alignment loss reaches a higher
test F1 than the unconstrained loss). Absolute scores depend on the
synthetic corpus, so only the direction of each comparison is checked.
"""

import dataclasses
import json
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import ClassVar, Literal

import numpy as np
import pandas as pd

from spantrellis.corpus.core._io import CorpusContainer, CorpusWriter
from spantrellis.corpus.core.main import LabeledSequence
from spantrellis.corpus.main import segmented_views
from spantrellis.metrics.main import ReportWriter, SpanMatchResult, gold_spans, local_f1, per_ontology_report
from spantrellis.model.main import ModelConfig
from spantrellis.report.main import CURVE_COLUMNS, CurveProperties, write_curve_figure

from ._data import PreparedData
from ._evaluate import Evaluator, EvalSummary
from ._loop import Trainer
from ._pseudo import PseudoLabeler
from .main import ExperimentConfig, ModelSettings, SegmentRange, TrainResult

logger = logging.getLogger(__name__)

type ExperimentName = Literal[
    "loss-comparison", "delta-sweep", "semi-supervised", "short-vs-long", "seq2seq-parity"
]
EXPERIMENTS: tuple[str, ...] = (
    "loss-comparison", "delta-sweep", "semi-supervised", "short-vs-long", "seq2seq-parity",
)
DELTA_SWEEP = (0, 2, 4, 8, 16, 32)
SHORT_SEGMENT = SegmentRange(40, 60)
LONG_SEGMENT = SegmentRange(280, 320)
SEGMENTED_VIEWS = 3
LOSS_MARGIN = 0.02
FIXED_TOLERANCE = 0.01
UNCONSTRAINED_TOLERANCE = 0.02
SEGMENT_GAP_MARGIN = 0.02
PARITY_TOLERANCE = 0.02


@dataclass(frozen=True)
class RunSummary:
    """Scores of one trained model."""

    series: str
    final_nll: float
    train_f1: float
    test_f1: float
    test_global_f1: float
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CriterionResult:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class ExperimentReport:
    """Runs, criteria and the overall verdict of one experiment."""

    experiment: str
    runs: list[RunSummary]
    criteria: list[CriterionResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.criteria)

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "verdict": "pass" if self.passed else "fail",
            "runs": [dataclasses.asdict(r) for r in self.runs],
            "criteria": [dataclasses.asdict(c) for c in self.criteria],
        }


def _nan_to_none(value: float) -> float | None:
    return None if np.isnan(value) else value


class ExperimentBase(ABC):
    """Shared training and bookkeeping of the scripted experiments."""

    name: ClassVar[str]

    def __init__(self, config: ExperimentConfig, data: PreparedData, out_dir: Path) -> None:
        """
        Args:
            config (ExperimentConfig): Base settings every run starts from.
            data (PreparedData): Schema and corpus splits.
            out_dir (Path): Experiment output directory.
        """
        self.config = config
        self.data = data
        self.out_dir = out_dir
        self.curves: list[pd.DataFrame] = []

    def _model_config(self, config: ExperimentConfig) -> ModelConfig:
        return config.model.resolve(self.data.input_vocab, self.data.schema.output_vocab, config.seed)

    def _evaluate(self, result: TrainResult, sequences: list[LabeledSequence]) -> EvalSummary:
        evaluator = Evaluator(result.params, self.data.schema, self.config.decode, self.config.workers)
        return evaluator.evaluate(sequences)

    def train(self, series: str, config: ExperimentConfig, sequences: list[LabeledSequence] | None = None) -> tuple[TrainResult, RunSummary]:
        """Train one series and write its curve and per-ontology report."""
        logger.info("[%s] training %s", self.name, series)
        run_dir = self.out_dir / series
        result = Trainer(
            config,
            self._model_config(config),
            self.data.schema,
            self.data.labeled if sequences is None else sequences,
            self.data.test,
            out_dir=run_dir,
        ).run()
        self.curves.append(result.curve.to_long(series))
        result.curve.to_frame().to_csv(run_dir / "curve.csv", index=False)

        test = self._evaluate(result, self.data.test)
        writer = ReportWriter(per_ontology_report(test.local))
        writer.to_csv(run_dir / "ontology_report.csv")
        writer.to_json(run_dir / "ontology_report.json")
        final_nll = result.curve.nll[-1] if result.curve.nll else float("nan")
        train_f1 = result.curve.train_f1[-1] if result.curve.train_f1 else float("nan")
        summary = RunSummary(
            series=series,
            final_nll=final_nll,
            train_f1=train_f1,
            test_f1=test.local.f1,
            test_global_f1=test.global_.f1,
        )
        return result, summary

    @abstractmethod
    def run(self) -> ExperimentReport:
        """Train the experiment's models and check its criteria."""
        ...


class LossComparison(ExperimentBase):
    """Fixed alignment against the unconstrained loss."""

    name = "loss-comparison"

    def run(self) -> ExperimentReport:
        _, fixed = self.train("fixed", dataclasses.replace(self.config, loss="fixed", delta=None))
        _, free = self.train("unconstrained", dataclasses.replace(self.config, loss="unconstrained", delta=None))
        criterion = CriterionResult(
            name="fixed_beats_unconstrained",
            passed=fixed.test_f1 - free.test_f1 >= LOSS_MARGIN,
            detail=f"fixed test F1 {fixed.test_f1:.4f} vs unconstrained {free.test_f1:.4f}",
        )
        return ExperimentReport(self.name, [fixed, free], [criterion])


class DeltaSweep(ExperimentBase):
    """Constrained loss across band widths, bracketed by fixed and unconstrained."""

    name = "delta-sweep"

    def run(self) -> ExperimentReport:
        _, fixed = self.train("fixed", dataclasses.replace(self.config, loss="fixed", delta=None))
        runs = [fixed]
        for delta in DELTA_SWEEP:
            config = dataclasses.replace(self.config, loss="constrained", delta=delta)
            runs.append(self.train(f"delta-{delta}", config)[1])
        _, free = self.train("unconstrained", dataclasses.replace(self.config, loss="unconstrained", delta=None))
        runs.append(free)

        smallest, largest = runs[1], runs[-2]
        criteria = [
            CriterionResult(
                name="smallest_delta_matches_fixed",
                passed=abs(smallest.test_f1 - fixed.test_f1) <= FIXED_TOLERANCE,
                detail=f"{smallest.series} {smallest.test_f1:.4f} vs fixed {fixed.test_f1:.4f}",
            ),
            CriterionResult(
                name="largest_delta_matches_unconstrained",
                passed=abs(largest.test_f1 - free.test_f1) <= UNCONSTRAINED_TOLERANCE,
                detail=f"{largest.series} {largest.test_f1:.4f} vs unconstrained {free.test_f1:.4f}",
            ),
        ]
        return ExperimentReport(self.name, runs, criteria)


class SemiSupervised(ExperimentBase):
    """Fold pseudo-labeled sequences back into training, per loss mode.

    The unconstrained model has more to gain from extra data, so its
    improvement should exceed the fixed-alignment model's.
    """

    name = "semi-supervised"

    def _pseudo_f1(self, pseudo: CorpusContainer) -> float:
        """Local F1 of the pseudo-labels against the withheld gold spans."""
        gold = {s.source_id: s for s in self.data.unlabeled}
        match = SpanMatchResult()
        for seq in pseudo.sequences:
            schema = self.data.schema
            match = match + local_f1(gold_spans(seq, schema), gold_spans(gold[seq.source_id], schema))
        return match.f1

    def _rounds(self, loss: str, runs: list[RunSummary]) -> float:
        """Train supervised then semi-supervised rounds; return the F1 gain."""
        config = dataclasses.replace(self.config, loss=loss, delta=None)
        result, baseline = self.train(f"{loss}-supervised", config)
        runs.append(baseline)
        current = baseline
        hidden = CorpusContainer(
            sequences=[LabeledSequence(s.tokens, (), s.source_id) for s in self.data.unlabeled],
            input_vocab=self.data.input_vocab,
        )
        for round_ in range(1, config.pseudo_rounds + 1):
            labeler = PseudoLabeler(
                result.params, self.data.schema, config.decode,
                threshold=config.pseudo_threshold, workers=config.workers,
            )
            pseudo = labeler.label(hidden)
            CorpusWriter(self.out_dir / f"{loss}-pseudo_round{round_}.jsonl").write(pseudo)
            # Labeled data stays in every epoch; pseudo-labels are appended.
            result, current = self.train(f"{loss}-semi-round{round_}", config, self.data.labeled + pseudo.sequences)
            current = dataclasses.replace(
                current,
                extra={"pseudo_sequences": len(pseudo.sequences), "pseudo_label_f1": self._pseudo_f1(pseudo)},
            )
            runs.append(current)
        return current.test_f1 - baseline.test_f1

    def run(self) -> ExperimentReport:
        runs: list[RunSummary] = []
        fixed_gain = self._rounds("fixed", runs)
        free_gain = self._rounds("unconstrained", runs)
        criterion = CriterionResult(
            name="unconstrained_gains_more",
            passed=free_gain > fixed_gain,
            detail=f"unconstrained gain {free_gain:+.4f} vs fixed gain {fixed_gain:+.4f}",
        )
        return ExperimentReport(self.name, runs, [criterion])


class ShortVsLong(ExperimentBase):
    """Short training windows generalize worse to unsegmented input."""

    name = "short-vs-long"

    def _segmented_f1(self, result: TrainResult, segment: SegmentRange) -> float:
        rng = np.random.default_rng(np.random.SeedSequence(self.config.seed).spawn(5)[4])
        views = [
            view
            for seq in self.data.test
            for view in segmented_views(seq, SEGMENTED_VIEWS, segment.min_len, segment.max_len, rng, segment.policy)
        ]
        return self._evaluate(result, views).local.f1

    def run(self) -> ExperimentReport:
        runs = []
        gaps = {}
        for series, segment in (("short", SHORT_SEGMENT), ("long", LONG_SEGMENT)):
            result, summary = self.train(series, dataclasses.replace(self.config, segment=segment))
            segmented = self._segmented_f1(result, segment)
            gaps[series] = segmented - summary.test_f1
            runs.append(dataclasses.replace(summary, extra={"segmented_test_f1": segmented, "gap": gaps[series]}))
        criterion = CriterionResult(
            name="short_gap_exceeds_long_gap",
            passed=gaps["short"] - gaps["long"] >= SEGMENT_GAP_MARGIN,
            detail=f"short gap {gaps['short']:.4f} vs long gap {gaps['long']:.4f}",
        )
        return ExperimentReport(self.name, runs, [criterion])


class Seq2SeqParity(ExperimentBase):
    """RNN-T and seq-to-seq with hard attention, both on the fixed alignment."""

    name = "seq2seq-parity"

    def run(self) -> ExperimentReport:
        base = dataclasses.replace(self.config, loss="fixed", delta=None)
        _, rnnt = self.train("rnnt", dataclasses.replace(base, model=dataclasses.replace(base.model, architecture="transducer")))
        seq2seq_model: ModelSettings = dataclasses.replace(base.model, architecture="seq2seq")
        _, s2s = self.train("seq2seq", dataclasses.replace(base, model=seq2seq_model))
        criterion = CriterionResult(
            name="seq2seq_parity",
            passed=abs(rnnt.test_f1 - s2s.test_f1) <= PARITY_TOLERANCE,
            detail=f"rnnt test F1 {rnnt.test_f1:.4f} vs seq2seq {s2s.test_f1:.4f}",
        )
        return ExperimentReport(self.name, [rnnt, s2s], [criterion])


class ExperimentSelector:
    """Select the experiment class for a name."""

    def __init__(self, config: ExperimentConfig, data: PreparedData, out_dir: Path) -> None:
        self.config = config
        self.data = data
        self.out_dir = out_dir

    def select(self, name: ExperimentName) -> ExperimentBase:
        """
        Raises:
            ValueError: If ``name`` is not a known experiment.
        """
        for cls in (LossComparison, DeltaSweep, SemiSupervised, ShortVsLong, Seq2SeqParity):
            if cls.name == name:
                return cls(self.config, self.data, self.out_dir)
        raise ValueError(f"Invalid experiment: {name}. Must be one of {list(EXPERIMENTS)}.")


class ExperimentReportWriter:
    """Write the long curve table, one figure per metric and report.json."""

    def __init__(self, out_dir: Path) -> None:
        self.out_dir = out_dir

    def write(self, report: ExperimentReport, curves: list[pd.DataFrame]) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        table = pd.concat(curves, ignore_index=True) if curves else pd.DataFrame(columns=CURVE_COLUMNS)
        table = table[CURVE_COLUMNS]
        table.to_csv(self.out_dir / "curves.csv", index=False)
        for metric, ylabel in (("nll", "negative log-likelihood"), ("train_f1", "local F1"), ("test_f1", "local F1")):
            if (table["metric"] == metric).any():
                write_curve_figure(
                    table,
                    CurveProperties(metric=metric, title=f"{report.experiment}: {metric}", ylabel=ylabel),
                    self.out_dir / f"{metric}.png",
                )
        data = report.to_dict()
        for run in data["runs"]:
            for key in ("final_nll", "train_f1", "test_f1", "test_global_f1"):
                run[key] = _nan_to_none(run[key])
        path = self.out_dir / "report.json"
        path.write_text(json.dumps(data, indent=2, sort_keys=True), encoding="utf-8")
        return path
