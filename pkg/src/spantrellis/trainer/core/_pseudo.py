"""Label unlabeled sequences with a trained model's beam-search output."""

import logging

from spantrellis.corpus.core._io import CorpusContainer
from spantrellis.corpus.core.main import LabeledSequence, OntologySchema, Span
from spantrellis.decoder.core.main import DecodedSpan
from spantrellis.decoder.main import DecodeConfig
from spantrellis.model.main import ModelParams
from spantrellis.utils.errors import ContractViolation, CorpusError
from spantrellis.utils.parallel import ordered_map

from ._evaluate import Evaluator

logger = logging.getLogger(__name__)


class PseudoLabeler:
    """Decode sequences and keep their closed spans as annotations."""

    def __init__(
        self,
        params: ModelParams,
        schema: OntologySchema,
        decode: DecodeConfig,
        threshold: float | None = None,
        workers: int = 1,
    ) -> None:
        """
        Args:
            params (ModelParams): Trained model.
            schema (OntologySchema): Maps decoded names back to ids.
            decode (DecodeConfig): Beam limits.
            threshold (float | None): Minimum best-hypothesis score per
                frame; lower-scoring sequences are skipped.
            workers (int): Sequences decoded concurrently.
        """
        self.schema = schema
        self.threshold = threshold
        self.workers = workers
        self.evaluator = Evaluator(params, schema, decode)

    def _span(self, span: DecodedSpan) -> Span:
        ontology, label = self.schema.index(span.ontology, span.label)
        return Span(ontology, label, span.start_frame - 1, span.end_frame - 1)

    def _label(self, seq: LabeledSequence) -> LabeledSequence | None:
        try:
            result = self.evaluator.decode(seq)
        except (ContractViolation, CorpusError, FloatingPointError) as exc:
            logger.warning("skipping %s: decode failed: %s", seq.source_id, exc)
            return None
        if self.threshold is not None and result.hypothesis.score / result.frames < self.threshold:
            logger.info("skipping %s: score %.3f per frame below threshold", seq.source_id, result.hypothesis.score / result.frames)
            return None
        spans = tuple(self._span(s) for s in result.extraction.spans if s.closed)
        return LabeledSequence(tokens=seq.tokens, spans=spans, source_id=seq.source_id)

    def label(self, corpus: CorpusContainer) -> CorpusContainer:
        outputs = ordered_map(self._label, corpus.sequences, self.workers)
        labeled = [out for out in outputs if out is not None]
        logger.info("pseudo-labeled %d of %d sequences", len(labeled), len(corpus.sequences))
        return CorpusContainer(
            sequences=labeled,
            schema=self.schema,
            input_vocab=corpus.input_vocab,
            pseudo_labeled=True,
        )
