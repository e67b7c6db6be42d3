"""Segment-resampled minibatch training under one alignment loss.

Every epoch shuffles the training sequences and cuts a fresh random
window from each, so the model sees different views of the same
conversations. A batch's lattices are evaluated as one padded stack and
per-example work may run on a thread pool; gradients are summed in batch
order, which keeps runs bit-identical for any worker count. Evaluation decodes full, unsegmented sequences.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from spantrellis.corpus.core._alignment import AlignmentBuilder
from spantrellis.corpus.core._segment import RandomSegmenter
from spantrellis.corpus.core.main import LabeledSequence, OntologySchema
from spantrellis.lattice.core._loss import Constrained, Fixed, LossMode, Unconstrained
from spantrellis.model.main import (
    Adam,
    ModelConfig,
    ModelParams,
    backprop_batch,
    init_params,
    save_checkpoint,
    tree,
)
from spantrellis.utils.errors import TrainingDivergedError
from ._evaluate import Evaluator
from .main import ExperimentConfig, TrainingCurve, TrainResult

logger = logging.getLogger(__name__)

CHECKPOINT_NAME = "checkpoint.bin"


@dataclass(frozen=True)
class TrainingExample:
    tokens: np.ndarray
    targets: np.ndarray
    mode: LossMode


class ExampleBuilder:
    """Turn a labeled segment into (tokens, targets, loss mode)."""

    def __init__(self, config: ExperimentConfig, schema: OntologySchema) -> None:
        self.config = config
        self.aligner = AlignmentBuilder(schema, config.ordering)

    def build(self, seq: LabeledSequence) -> TrainingExample:
        gold = self.aligner.build(seq)
        if self.config.loss == "unconstrained":
            mode: LossMode = Unconstrained()
        elif self.config.loss == "fixed":
            mode = Fixed(gold.path)
        else:
            mode = Constrained(gold.path, self.config.delta, self.config.delta)
        return TrainingExample(
            tokens=np.asarray(seq.tokens, dtype=np.int64),
            targets=np.asarray(gold.targets, dtype=np.int64),
            mode=mode,
        )


class Trainer:
    """Train one model and record its curve."""

    def __init__(
        self,
        config: ExperimentConfig,
        model_config: ModelConfig,
        schema: OntologySchema,
        sequences: list[LabeledSequence],
        test: list[LabeledSequence] | None = None,
        out_dir: str | Path | None = None,
    ) -> None:
        """
        Args:
            config (ExperimentConfig): Run settings.
            model_config (ModelConfig): Architecture with resolved vocabularies.
            schema (OntologySchema): Output vocabulary of the spans.
            sequences (list[LabeledSequence]): Training sequences.
            test (list[LabeledSequence] | None): Held-out sequences.
            out_dir (str | Path | None): Where checkpoints are written.
        """
        self.config = config
        self.model_config = model_config
        self.schema = schema
        self.sequences = sequences
        self.test = test or []
        self.out_dir = Path(out_dir) if out_dir is not None else None
        self.examples = ExampleBuilder(config, schema)
        self.segmenter = RandomSegmenter(config.segment.min_len, config.segment.max_len, config.segment.policy)

    def _step(self, params: ModelParams, optimizer: Adam, batch: list[LabeledSequence], step: int) -> tuple[ModelParams, float]:
        examples = [self.examples.build(seq) for seq in batch]
        outputs = backprop_batch(
            [(ex.tokens, ex.targets) for ex in examples],
            [ex.mode for ex in examples],
            params,
            self.config.workers,
        )
        loglik = 0.0
        grads = tree.zeros_like(params)
        for value, example_grads in outputs:
            loglik += value
            grads = tree.add(grads, example_grads)
        nll = -loglik / len(batch)
        if not math.isfinite(nll):
            logger.error("training diverged at step %d (nll=%r)", step, nll)
            raise TrainingDivergedError(step, nll)

        grads, norm = optimizer.clip(tree.scale(grads, 1.0 / len(batch)))
        logger.debug("step %d: nll %.4f, grad norm %.3f", step, nll, norm)
        return optimizer.step(params, grads), nll

    def _evaluate(self, params: ModelParams, curve: TrainingCurve) -> None:
        evaluator = Evaluator(params, self.schema, self.config.decode, self.config.workers)
        train_f1 = evaluator.evaluate(self.sequences[: self.config.eval_train_size]).local.f1
        test_f1 = evaluator.evaluate(self.test).local.f1 if self.test else math.nan
        curve.record_eval(train_f1, test_f1)
        logger.info("step %d: nll %.4f, train F1 %.3f, test F1 %.3f", curve.steps[-1], curve.nll[-1], train_f1, test_f1)

    def _checkpoint(self, params: ModelParams) -> str | None:
        if self.out_dir is None:
            return None
        return str(save_checkpoint(self.out_dir / CHECKPOINT_NAME, self.model_config, params))

    def run(self) -> TrainResult:
        """
        Raises:
            TrainingDivergedError: If a batch loss is NaN or infinite.
        """
        c = self.config
        init_seq, segment_seq, order_seq = np.random.SeedSequence(c.seed).spawn(3)
        params = init_params(self.model_config, np.random.default_rng(init_seq))
        segment_rng = np.random.default_rng(segment_seq)
        order_rng = np.random.default_rng(order_seq)
        optimizer = Adam(params, c.optimizer)
        curve = TrainingCurve()
        checkpoint = self._checkpoint(params)

        step = 0
        for epoch in range(c.epochs):
            order = order_rng.permutation(len(self.sequences))
            for start in range(0, len(order), c.batch_size):
                batch = [self.segmenter.cut(self.sequences[i], segment_rng) for i in order[start:start + c.batch_size]]
                step += 1
                params, nll = self._step(params, optimizer, batch, step)
                curve.record_step(step, nll)
                if step % c.eval_every == 0:
                    self._evaluate(params, curve)
                    checkpoint = self._checkpoint(params)
            logger.info("epoch %d done (%d steps)", epoch + 1, step)

        if curve.steps and curve.eval_steps[-1:] != [step]:
            self._evaluate(params, curve)
            checkpoint = self._checkpoint(params)
        return TrainResult(config=self.model_config, params=params, curve=curve, checkpoint=checkpoint)
