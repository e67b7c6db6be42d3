"""Decode full sequences and score their spans against gold."""

from dataclasses import dataclass, field

import numpy as np

from spantrellis.corpus.core.main import LabeledSequence, OntologySchema
from spantrellis.decoder.core._results import DecodeResult
from spantrellis.decoder.main import DecodeConfig, beam_search, extract_spans
from spantrellis.metrics.main import SpanMatchResult, decoded_spans, global_f1, gold_spans, local_f1
from spantrellis.model.main import ModelParams, make_scorer
from spantrellis.utils.parallel import ordered_map


@dataclass(frozen=True)
class EvalSummary:
    """Pooled local and global matches plus the decode results."""

    local: SpanMatchResult = field(default_factory=SpanMatchResult)
    global_: SpanMatchResult = field(default_factory=SpanMatchResult)
    results: list[DecodeResult] = field(default_factory=list)


class Evaluator:
    """Beam-decode sequences with fixed parameters."""

    def __init__(self, params: ModelParams, schema: OntologySchema, decode: DecodeConfig, workers: int = 1) -> None:
        """
        Args:
            params (ModelParams): Model to decode with.
            schema (OntologySchema): Marker ids for span extraction.
            decode (DecodeConfig): Beam limits.
            workers (int): Sequences decoded concurrently.
        """
        self.params = params
        self.schema = schema
        self.markers = schema.markers()
        self.decode_config = decode
        self.workers = workers

    def decode(self, seq: LabeledSequence) -> DecodeResult:
        T = len(seq)
        scorer = make_scorer(np.asarray(seq.tokens, dtype=np.int64), self.params)
        best = beam_search(scorer, T, self.decode_config)[0]
        return DecodeResult(
            source_id=seq.source_id,
            frames=T,
            hypothesis=best,
            extraction=extract_spans(best, self.markers, T),
        )

    def evaluate(self, sequences: list[LabeledSequence]) -> EvalSummary:
        results = ordered_map(self.decode, sequences, self.workers)
        local, global_ = SpanMatchResult(), SpanMatchResult()
        for seq, result in zip(sequences, results):
            pred = decoded_spans(result.extraction.spans)
            gold = gold_spans(seq, self.schema)
            local = local + local_f1(pred, gold)
            global_ = global_ + global_f1(pred, gold)
        return EvalSummary(local=local, global_=global_, results=results)
