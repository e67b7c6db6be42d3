"""One class per subcommand.

Each command receives the parsed arguments and the resolved experiment
config, writes only below its output directory and returns an exit code.
Errors propagate; the entry point maps them to exit codes.
"""

import dataclasses
import json
import logging
from abc import ABC, abstractmethod
from argparse import Namespace
from pathlib import Path
from typing import ClassVar

from spantrellis.corpus.core._generate import CorpusGenerator
from spantrellis.corpus.core._io import CorpusContainer, CorpusReader, CorpusWriter, SchemaFile
from spantrellis.corpus.core.main import OntologySchema
from spantrellis.decoder.main import DecodeResultWriter
from spantrellis.metrics.main import ReportWriter, per_ontology_report
from spantrellis.model.main import load_checkpoint
from spantrellis.trainer.core._evaluate import Evaluator
from spantrellis.trainer.main import ExperimentConfig, pseudo_label, run_experiment, train, write_config
from spantrellis.utils.errors import CriterionFailure
from spantrellis.utils.parallel import ordered_map
from spantrellis.verify.main import VerifyConfig, run_checks, write_verify_report

from .main import COMMANDS, EXIT_OK, RESOLVED_CONFIG, CommandName

logger = logging.getLogger(__name__)


class CommandBase(ABC):
    """Shared output-directory and config handling."""

    name: ClassVar[str]

    def __init__(self, args: Namespace, config: ExperimentConfig) -> None:
        """
        Args:
            args (Namespace): Parsed command line.
            config (ExperimentConfig): Resolved config, overrides applied.
        """
        self.args = args
        self.config = config
        self.out_dir = Path(args.out)

    def _invocation(self) -> dict:
        """Command name and every parsed argument except verbosity."""
        args = {key: value for key, value in vars(self.args).items() if key not in ("command", "verbose")}
        return {"command": self.name, **args}

    def _write_config(self) -> None:
        write_config(self.out_dir / RESOLVED_CONFIG, self.config, self._invocation())

    def _schema(self, corpus: CorpusContainer | None = None) -> OntologySchema:
        if self.config.schema:
            return SchemaFile(self.config.schema).read()
        if corpus is not None and corpus.schema is not None:
            return corpus.schema
        return OntologySchema.default()

    @abstractmethod
    def run(self) -> int:
        ...


class GenDataCommand(CommandBase):
    """Generate one synthetic corpus and its schema."""

    name = "gen-data"

    def run(self) -> int:
        corpus = self.config.data.corpus
        size = corpus.size if self.args.size is None else self.args.size
        corpus = dataclasses.replace(corpus, size=size, seed=self.config.seed)
        self.config = dataclasses.replace(self.config, data=dataclasses.replace(self.config.data, corpus=corpus))
        self._write_config()

        schema = self._schema()
        generator = CorpusGenerator(schema, corpus)
        sequences = generator.generate()
        path = CorpusWriter(self.out_dir / f"{self.args.name}.jsonl").write(
            CorpusContainer(sequences=sequences, schema=schema, input_vocab=generator.lexicon.size)
        )
        SchemaFile(self.out_dir / "schema.yaml").write(schema)
        logger.info("wrote %d sequences to %s", len(sequences), path)
        return EXIT_OK


class TrainCommand(CommandBase):
    name = "train"

    def run(self) -> int:
        self._write_config()
        result = train(self.config, self.out_dir)
        logger.info("checkpoint: %s", result.checkpoint)
        return EXIT_OK


class DecodeCommand(CommandBase):
    """Beam-decode a corpus with a checkpoint and write decode.jsonl."""

    name = "decode"

    def _decode(self) -> tuple[CorpusContainer, OntologySchema, Evaluator]:
        self._write_config()
        corpus = CorpusReader(self.args.input).read()
        schema = self._schema(corpus)
        _, params = load_checkpoint(self.args.checkpoint)
        return corpus, schema, Evaluator(params, schema, self.config.decode, self.config.workers)

    def run(self) -> int:
        corpus, _, evaluator = self._decode()
        results = ordered_map(evaluator.decode, corpus.sequences, self.config.workers)
        path = DecodeResultWriter(self.out_dir / "decode.jsonl").write(results)
        logger.info("decoded %d sequences to %s", len(results), path)
        return EXIT_OK


class EvalCommand(DecodeCommand):
    """Decode a gold corpus and report local and global span F1."""

    name = "eval"

    def run(self) -> int:
        corpus, schema, evaluator = self._decode()
        summary = evaluator.evaluate(corpus.sequences)
        DecodeResultWriter(self.out_dir / "decode.jsonl").write(summary.results)
        writer = ReportWriter(per_ontology_report(summary.local, self.args.average))
        writer.to_csv(self.out_dir / "ontology_report.csv")
        writer.to_json(self.out_dir / "ontology_report.json")
        scores = {
            kind: {"precision": m.precision, "recall": m.recall, "f1": m.f1}
            for kind, m in (("local", summary.local), ("global", summary.global_))
        }
        (self.out_dir / "scores.json").write_text(json.dumps(scores, indent=2, sort_keys=True), encoding="utf-8")
        logger.info("local F1 %.4f, global F1 %.4f", summary.local.f1, summary.global_.f1)
        return EXIT_OK


class PseudoLabelCommand(CommandBase):
    name = "pseudo-label"

    def run(self) -> int:
        self._write_config()
        corpus = CorpusReader(self.args.input).read()
        pseudo_label(
            self.args.checkpoint,
            corpus,
            decode=self.config.decode,
            schema=self._schema(corpus),
            threshold=self.config.pseudo_threshold,
            workers=self.config.workers,
            out_path=self.out_dir / "pseudo_labeled.jsonl",
        )
        return EXIT_OK


class ExperimentCommand(CommandBase):
    name = "experiment"

    def run(self) -> int:
        self._write_config()
        run_experiment(self.args.experiment, self.config, self.out_dir)
        return EXIT_OK


class VerifyCommand(CommandBase):
    """Run the numerical self-checks; any failure is a criterion failure."""

    name = "verify"

    def run(self) -> int:
        self._write_config()
        seed = self.config.seed
        config = VerifyConfig.quick(seed) if self.args.quick else VerifyConfig(seed=seed)
        report = run_checks(config, self.args.check or None)
        write_verify_report(report, self.out_dir)
        for failure in report.failures():
            raise CriterionFailure(failure.check, failure.detail)
        return EXIT_OK


class CommandSelector:
    """Select the command class for a subcommand name."""

    def __init__(self, args: Namespace, config: ExperimentConfig) -> None:
        self.args = args
        self.config = config

    def select(self, name: CommandName) -> CommandBase:
        """
        Raises:
            ValueError: If ``name`` is not a known subcommand.
        """
        for cls in (
            GenDataCommand,
            TrainCommand,
            DecodeCommand,
            EvalCommand,
            PseudoLabelCommand,
            ExperimentCommand,
            VerifyCommand,
        ):
            if cls.name == name:
                return cls(self.args, self.config)
        raise ValueError(f"Invalid command: {name}. Must be one of {list(COMMANDS)}.")
