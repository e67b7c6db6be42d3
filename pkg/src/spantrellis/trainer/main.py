"""Expose training, pseudo-labeling and the scripted experiments."""

import logging
from pathlib import Path

from spantrellis.corpus.core._io import CorpusContainer, CorpusReader, CorpusWriter
from spantrellis.corpus.core.main import OntologySchema
from spantrellis.decoder.main import DecodeConfig
from spantrellis.model.main import load_checkpoint
from spantrellis.report.main import CurveProperties, write_curve_figure
from spantrellis.utils.errors import CriterionFailure

from .core._config import config_to_dict, load_config, read_invocation, write_config
from .core._data import DataPreparer, PreparedData
from .core._evaluate import EvalSummary, Evaluator
from .core._experiments import (
    EXPERIMENTS,
    ExperimentName,
    ExperimentReport,
    ExperimentReportWriter,
    ExperimentSelector,
)
from .core._loop import Trainer
from .core._pseudo import PseudoLabeler
from .core.main import (
    DataSettings,
    ExperimentConfig,
    ModelSettings,
    SegmentRange,
    TrainingCurve,
    TrainResult,
)

logger = logging.getLogger(__name__)

__all__ = [
    "EXPERIMENTS",
    "DataSettings",
    "EvalSummary",
    "Evaluator",
    "ExperimentConfig",
    "ExperimentName",
    "ExperimentReport",
    "ModelSettings",
    "PreparedData",
    "SegmentRange",
    "TrainResult",
    "TrainingCurve",
    "config_to_dict",
    "load_config",
    "prepare_data",
    "pseudo_label",
    "read_invocation",
    "run_experiment",
    "train",
    "write_config",
]


def prepare_data(config: ExperimentConfig) -> PreparedData:
    """Load the corpora named by ``config`` and generate the missing ones."""
    return DataPreparer(config).prepare()


def train(config: ExperimentConfig, out_dir: str | Path | None = None, data: PreparedData | None = None) -> TrainResult:
    """Train one model; checkpoint and curve are written to ``out_dir``.

    Raises:
        TrainingDivergedError: If the loss stops being finite.
        CorpusError: If a corpus is malformed.
    """
    data = data or prepare_data(config)
    model_config = config.model.resolve(data.input_vocab, data.schema.output_vocab, config.seed)
    out_dir = None if out_dir is None else Path(out_dir)
    result = Trainer(config, model_config, data.schema, data.labeled, data.test, out_dir).run()
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        result.curve.to_frame().to_csv(out_dir / "curve.csv", index=False)
        long = result.curve.to_long(config.name)
        for metric in ("nll", "train_f1", "test_f1"):
            if (long["metric"] == metric).any():
                properties = CurveProperties(metric=metric, title=f"{config.name}: {metric}", ylabel=metric)
                write_curve_figure(long, properties, out_dir / f"{metric}.png")
    return result


def pseudo_label(
    checkpoint: str | Path,
    unlabeled: CorpusContainer | str | Path,
    decode: DecodeConfig | None = None,
    schema: OntologySchema | None = None,
    threshold: float | None = None,
    workers: int = 1,
    out_path: str | Path | None = None,
) -> CorpusContainer:
    """Decode every unlabeled sequence and keep its spans as labels.

    Args:
        checkpoint (str | Path): Trained model.
        unlabeled (CorpusContainer | str | Path): Sequences, or a corpus file.
        decode (DecodeConfig | None): Beam limits; defaults apply when None.
        schema (OntologySchema | None): Defaults to the corpus header's
            schema, then to the default schema.
        threshold (float | None): Minimum best score per frame.
        workers (int): Sequences decoded concurrently.
        out_path (str | Path | None): Where the pseudo-labeled corpus is written.

    Returns:
        CorpusContainer: Marked as pseudo-labeled.
    """
    if not isinstance(unlabeled, CorpusContainer):
        unlabeled = CorpusReader(unlabeled).read()
    schema = schema or unlabeled.schema or OntologySchema.default()
    _, params = load_checkpoint(checkpoint)
    corpus = PseudoLabeler(params, schema, decode or DecodeConfig(), threshold, workers).label(unlabeled)
    if out_path is not None:
        CorpusWriter(out_path).write(corpus)
    return corpus


def run_experiment(name: ExperimentName, config: ExperimentConfig, out_dir: str | Path) -> ExperimentReport:
    """Run a scripted experiment and write its curves, figures and report.

    Raises:
        CriterionFailure: After writing the report, if a criterion failed.
    """
    out_dir = Path(out_dir) / name
    data = prepare_data(config)
    experiment = ExperimentSelector(config, data, out_dir).select(name)
    result = experiment.run()
    path = ExperimentReportWriter(out_dir).write(result, experiment.curves)
    logger.info("%s: verdict %s (%s)", name, "pass" if result.passed else "fail", path)
    for criterion in result.criteria:
        if not criterion.passed:
            logger.error("%s: criterion %s failed: %s", name, criterion.name, criterion.detail)
            raise CriterionFailure(criterion.name, criterion.detail)
    return result
