"""Expose corpus generation, alignment, segmentation and file I/O."""

from pathlib import Path

import numpy as np

from .core._alignment import AlignmentBuilder
from .core._generate import CorpusGenerator, Lexicon
from .core._io import CorpusContainer, CorpusReader, CorpusWriter, SchemaFile
from .core._segment import RandomSegmenter
from .core.main import (
    CorpusConfig,
    GoldAlignment,
    LabeledSequence,
    Ontology,
    OntologySchema,
    OrderingPolicy,
    SegmentPolicy,
    Span,
)

__all__ = [
    "CorpusConfig",
    "CorpusContainer",
    "GoldAlignment",
    "LabeledSequence",
    "Ontology",
    "OntologySchema",
    "OrderingPolicy",
    "SegmentPolicy",
    "Span",
    "generate_corpus",
    "input_vocab",
    "load_corpus",
    "load_schema",
    "random_segment",
    "save_corpus",
    "save_schema",
    "segmented_views",
    "spans_to_alignment",
]


def generate_corpus(schema: OntologySchema, config: CorpusConfig) -> list[LabeledSequence]:
    """Draw a synthetic corpus; a pure function of (schema, config).

    Raises:
        CorpusError: If spans cannot fit in the shortest sequence.
    """
    return CorpusGenerator(schema, config).generate()


def input_vocab(schema: OntologySchema, config: CorpusConfig) -> int:
    """Number of word ids the generator can produce."""
    return Lexicon(schema, config.filler_vocab).size


def spans_to_alignment(
    seq: LabeledSequence,
    schema: OntologySchema,
    policy: OrderingPolicy = "outermost-first",
) -> GoldAlignment:
    """Begin label at each span's start token, end marker at its end token."""
    return AlignmentBuilder(schema, policy).build(seq)


def random_segment(
    seq: LabeledSequence,
    min_len: int,
    max_len: int,
    rng: np.random.Generator,
    policy: SegmentPolicy = "drop",
) -> LabeledSequence:
    """Cut one uniform random window; sequences up to ``min_len`` come back whole."""
    return RandomSegmenter(min_len, max_len, policy).cut(seq, rng)


def segmented_views(
    seq: LabeledSequence,
    n_views: int,
    min_len: int,
    max_len: int,
    rng: np.random.Generator,
    policy: SegmentPolicy = "drop",
) -> list[LabeledSequence]:
    """``n_views`` independent random windows of one sequence."""
    return RandomSegmenter(min_len, max_len, policy).views(seq, n_views, rng)


def load_corpus(path: str | Path) -> CorpusContainer:
    """
    Raises:
        CorpusError: On a malformed line; the message names the line.
    """
    return CorpusReader(path).read()


def save_corpus(path: str | Path, corpus: CorpusContainer) -> Path:
    return CorpusWriter(path).write(corpus)


def load_schema(path: str | Path) -> OntologySchema:
    return SchemaFile(path).read()


def save_schema(path: str | Path, schema: OntologySchema) -> Path:
    return SchemaFile(path).write(schema)
