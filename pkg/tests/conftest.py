from pathlib import Path

import numpy as np
import pytest

from spantrellis.corpus.main import CorpusConfig, LabeledSequence, OntologySchema, Span
from spantrellis.decoder.main import DecodeConfig
from spantrellis.lattice.main import Lattice
from spantrellis.trainer.main import DataSettings, ExperimentConfig, ModelSettings, SegmentRange
from spantrellis.verify.core._random import random_lattice

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240521)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def lattice(rng: np.random.Generator) -> Lattice:
    return random_lattice(rng, 5, 3)


@pytest.fixture
def schema() -> OntologySchema:
    return OntologySchema.default()


@pytest.fixture
def back_pain_sequence() -> LabeledSequence:
    """Ten tokens with a symptom nested in a treatment and three medication spans.

    Token spans (0-based, inclusive):
        treatments/physiotherapy 1..3, symptoms/back_pain 2..3,
        medications/drug_name 6..6, medications/dosage 7..8,
        medications/frequency 9..9.
    """
    return LabeledSequence(
        tokens=(3, 40, 41, 42, 7, 9, 50, 51, 52, 53),
        spans=(
            Span(4, 0, 1, 3),
            Span(1, 0, 2, 3),
            Span(0, 0, 6, 6),
            Span(0, 1, 7, 8),
            Span(0, 2, 9, 9),
        ),
        source_id="conv-fig",
    )


@pytest.fixture
def tiny_corpus_config() -> CorpusConfig:
    return CorpusConfig(
        size=6,
        mean_length=24.0,
        length_sigma=0.3,
        min_length=12,
        max_length=40,
        span_rate=10.0,
        filler_vocab=20,
        seed=7,
    )


@pytest.fixture
def tiny_experiment(tiny_corpus_config: CorpusConfig) -> ExperimentConfig:
    """A run small enough to train in a couple of seconds."""
    return ExperimentConfig(
        name="tiny",
        loss="fixed",
        segment=SegmentRange(10, 16),
        data=DataSettings(labeled_size=6, unlabeled_size=4, test_size=3, corpus=tiny_corpus_config),
        epochs=2,
        batch_size=3,
        eval_every=2,
        eval_train_size=2,
        seed=3,
        model=ModelSettings(hidden=6, embedding=6, layers=1, window=3),
        decode=DecodeConfig(beam=6.0, max_expansion=2, max_hyps=4),
    )
