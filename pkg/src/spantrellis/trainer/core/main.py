"""Experiment configuration, training curves and run results."""

import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from spantrellis.corpus.core.main import CorpusConfig, OrderingPolicy, SegmentPolicy
from spantrellis.decoder.core.main import DecodeConfig
from spantrellis.lattice.core._loss import LossModeName
from spantrellis.model.core.main import (
    Architecture,
    EncoderKind,
    ModelConfig,
    ModelParams,
    OptimizerConfig,
)
from spantrellis.utils.errors import ConfigError

CURVE_CSV_COLUMNS = ["step", "nll", "train_f1", "test_f1"]


@dataclass(frozen=True)
class SegmentRange:
    """Training window lengths, in tokens."""

    min_len: int = 280
    max_len: int = 320
    policy: SegmentPolicy = "drop"

    def __post_init__(self) -> None:
        if not 1 <= self.min_len <= self.max_len:
            raise ConfigError(f"Need 1 <= min_len <= max_len, got {self.min_len}, {self.max_len}")
        if self.policy not in ("drop", "clip"):
            raise ConfigError(f"Invalid segment policy: {self.policy}. Must be 'drop' or 'clip'.")


@dataclass(frozen=True)
class ModelSettings:
    """Model choices that do not depend on the data."""

    architecture: Architecture = "transducer"
    encoder: EncoderKind = "attention"
    hidden: int = 32
    embedding: int = 32
    layers: int = 2
    window: int = 20
    init_scale: float = 0.1

    def resolve(self, input_vocab: int, output_vocab: int, seed: int) -> ModelConfig:
        return ModelConfig(
            input_vocab=input_vocab,
            output_vocab=output_vocab,
            architecture=self.architecture,
            encoder=self.encoder,
            hidden=self.hidden,
            embedding=self.embedding,
            layers=self.layers,
            window=self.window,
            seed=seed,
            init_scale=self.init_scale,
        )


@dataclass(frozen=True)
class DataSettings:
    """Synthetic data drawn when no corpus paths are given.

    Attributes:
        labeled_size (int): Labeled training sequences.
        unlabeled_size (int): Unlabeled sequences for pseudo-labeling.
        test_size (int): Held-out labeled sequences.
        corpus (CorpusConfig): Generator settings; its size and seed are
            replaced per split.
    """

    labeled_size: int = 500
    unlabeled_size: int = 5000
    test_size: int = 50
    corpus: CorpusConfig = field(default_factory=CorpusConfig)

    def __post_init__(self) -> None:
        for name in ("labeled_size", "unlabeled_size", "test_size"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0, got {getattr(self, name)}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one training run depends on.

    Attributes:
        name (str): Run name used for output files.
        loss (LossModeName): Alignment loss.
        delta (int | None): Band half-width; required iff ``loss`` is
            constrained.
        segment (SegmentRange): Random window lengths for training.
        ordering (OrderingPolicy): Order of simultaneous gold emissions.
        labeled (str | None): Labeled corpus path; generated when None.
        unlabeled (str | None): Unlabeled corpus path.
        test (str | None): Test corpus path.
        schema (str | None): Ontology schema YAML; the corpus header or
            the default schema otherwise.
        data (DataSettings): Synthetic data settings.
        epochs (int): Passes over the training sequences.
        batch_size (int): Sequences per optimizer step.
        eval_every (int): Steps between evaluations.
        eval_train_size (int): Training sequences decoded for train F1.
        seed (int): Root seed for every random draw.
        workers (int): Threads for per-example gradients and decoding.
        model (ModelSettings): Architecture choices.
        optimizer (OptimizerConfig): Adam constants.
        decode (DecodeConfig): Beam search limits for evaluation.
        pseudo_rounds (int): Semi-supervised fold-back rounds.
        pseudo_threshold (float | None): Skip pseudo-labels whose best
            hypothesis scores below this per frame.
    """

    name: str = "run"
    loss: LossModeName = "fixed"
    delta: int | None = None
    segment: SegmentRange = field(default_factory=SegmentRange)
    ordering: OrderingPolicy = "outermost-first"
    labeled: str | None = None
    unlabeled: str | None = None
    test: str | None = None
    schema: str | None = None
    data: DataSettings = field(default_factory=DataSettings)
    epochs: int = 20
    batch_size: int = 8
    eval_every: int = 50
    eval_train_size: int = 50
    seed: int = 0
    workers: int = 1
    model: ModelSettings = field(default_factory=ModelSettings)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    decode: DecodeConfig = field(default_factory=DecodeConfig)
    pseudo_rounds: int = 1
    pseudo_threshold: float | None = None

    def __post_init__(self) -> None:
        if self.loss not in ("unconstrained", "fixed", "constrained"):
            raise ConfigError(
                f"Invalid loss: {self.loss}. Must be 'unconstrained', 'fixed' or 'constrained'."
            )
        if (self.loss == "constrained") != (self.delta is not None):
            raise ConfigError("delta must be given exactly when loss is 'constrained'.")
        if self.delta is not None and self.delta < 0:
            raise ConfigError(f"delta must be >= 0, got {self.delta}")
        if self.model.architecture == "seq2seq" and self.loss != "fixed":
            raise ConfigError("The seq2seq architecture trains with the fixed loss only.")
        if self.ordering not in ("outermost-first", "ontology-first"):
            raise ConfigError(f"Invalid ordering: {self.ordering}. Must be 'outermost-first' or 'ontology-first'.")
        for name in ("epochs", "eval_train_size", "pseudo_rounds"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0, got {getattr(self, name)}")
        for name in ("batch_size", "eval_every", "workers"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")


@dataclass
class TrainingCurve:
    """Per-step NLL with train/test local F1 at eval steps (NaN elsewhere)."""

    steps: list[int] = field(default_factory=list)
    nll: list[float] = field(default_factory=list)
    train_f1: list[float] = field(default_factory=list)
    test_f1: list[float] = field(default_factory=list)

    def record_step(self, step: int, nll: float) -> None:
        """
        Raises:
            ValueError: If ``step`` does not increase.
        """
        if self.steps and step <= self.steps[-1]:
            raise ValueError(f"Steps must increase strictly: {step} after {self.steps[-1]}")
        self.steps.append(step)
        self.nll.append(nll)
        self.train_f1.append(math.nan)
        self.test_f1.append(math.nan)

    def record_eval(self, train_f1: float, test_f1: float) -> None:
        """Attach F1 scores to the latest step."""
        if not self.steps:
            raise ValueError("No step recorded yet.")
        self.train_f1[-1] = train_f1
        self.test_f1[-1] = test_f1

    @property
    def eval_steps(self) -> list[int]:
        return [s for s, f in zip(self.steps, self.train_f1) if not np.isnan(f)]

    def to_frame(self) -> pd.DataFrame:
        """Wide table with ``CURVE_CSV_COLUMNS``."""
        return pd.DataFrame(
            {"step": self.steps, "nll": self.nll, "train_f1": self.train_f1, "test_f1": self.test_f1},
            columns=CURVE_CSV_COLUMNS,
        )

    def to_long(self, series: str) -> pd.DataFrame:
        """Long table (step, metric, value, series) for the curve figures."""
        long = self.to_frame().melt(id_vars="step", var_name="metric", value_name="value")
        long["series"] = series
        return long.dropna(subset=["value"]).reset_index(drop=True)


@dataclass(frozen=True)
class TrainResult:
    """Final parameters, their config and the training curve."""

    config: ModelConfig
    params: ModelParams
    curve: TrainingCurve
    checkpoint: str | None = None
