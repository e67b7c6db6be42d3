"""Domain types for frame-synchronous decoding."""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from spantrellis.utils.errors import ConfigError, ContractViolation

BLANK_ID = 0
NORMALIZATION_TOLERANCE = 1e-6


@dataclass(frozen=True)
class Hypothesis:
    """One beam-search candidate.

    Attributes:
        labels (tuple[int, ...]): Emitted label ids, blank excluded.
        emit_frames (tuple[int, ...]): 1-based frame of every label.
        score (float): Accumulated log-probability.
        pred_state (Any): Opaque scorer state matching ``labels``.
    """

    labels: tuple[int, ...]
    emit_frames: tuple[int, ...]
    score: float
    pred_state: Any = field(compare=False, repr=False)

    def __post_init__(self) -> None:
        if len(self.labels) != len(self.emit_frames):
            raise ContractViolation(
                f"{len(self.labels)} labels but {len(self.emit_frames)} emit frames."
            )
        if any(a > b for a, b in zip(self.emit_frames, self.emit_frames[1:])):
            raise ContractViolation(f"Emit frames must be non-decreasing: {self.emit_frames}")

    def sort_key(self) -> tuple[float, int, tuple[int, ...], tuple[int, ...]]:
        """Best first; ties go to fewer labels, then smaller label ids."""
        return (-self.score, len(self.labels), self.labels, self.emit_frames)


@dataclass(frozen=True)
class DecodeConfig:
    """Beam search limits.

    Attributes:
        beam (float): Log-probability margin below the best hypothesis;
            ``math.inf`` disables score pruning.
        max_expansion (int): Maximum labels emitted per frame.
        max_hyps (int | None): Beam width cap; None for unlimited.
        merge (bool): Recombine hypotheses with identical label histories
            at the same frame by log-sum-exp of their scores.
    """

    beam: float = 10.0
    max_expansion: int = 5
    max_hyps: int | None = 8
    merge: bool = True

    def __post_init__(self) -> None:
        if not self.beam >= 0:
            raise ConfigError(f"beam must be >= 0, got {self.beam}")
        if self.max_expansion < 1:
            raise ConfigError(f"max_expansion must be >= 1, got {self.max_expansion}")
        if self.max_hyps is not None and self.max_hyps < 1:
            raise ConfigError(f"max_hyps must be >= 1 or None, got {self.max_hyps}")

    @classmethod
    def exhaustive(cls, max_expansion: int = 5) -> "DecodeConfig":
        """Infinite beam, unlimited width, no merging."""
        return cls(beam=math.inf, max_expansion=max_expansion, max_hyps=None, merge=False)


class Scorer(ABC):
    """Provide label distributions for (state, frame) pairs.

    Frames are 1-based. Distributions are log-probabilities over the full
    output vocabulary with blank at ``BLANK_ID``.
    """

    @abstractmethod
    def initial_state(self) -> Any:
        """Return the state before any label is emitted."""
        ...

    @abstractmethod
    def score(self, state: Any, t: int) -> np.ndarray:
        """Return the log-distribution at frame ``t`` given ``state``."""
        ...

    @abstractmethod
    def advance(self, state: Any, label: int, t: int) -> Any:
        """Return the state after emitting ``label`` at frame ``t``."""
        ...


@dataclass(frozen=True)
class MarkerSchema:
    """Map output label ids to span begin labels and end markers.

    Attributes:
        begin (dict[int, tuple[str, str]]): Begin-label id to
            (ontology, label name).
        end (dict[int, str]): End-marker id to ontology.
    """

    begin: dict[int, tuple[str, str]]
    end: dict[int, str]


@dataclass(frozen=True)
class DecodedSpan:
    """A span reconstructed from a label sequence.

    Attributes:
        ontology (str): Ontology name.
        label (str): Label name.
        start_frame (int): 1-based frame of the begin label.
        end_frame (int): 1-based frame of the end marker (T if unclosed).
        closed (bool): False when no end marker closed the span.
    """

    ontology: str
    label: str
    start_frame: int
    end_frame: int
    closed: bool = True


@dataclass(frozen=True)
class SpuriousMarker:
    """An end marker emitted while no span of its ontology was open."""

    ontology: str
    frame: int


@dataclass(frozen=True)
class SpanExtraction:
    """Spans recovered from one hypothesis, plus diagnostics."""

    spans: list[DecodedSpan]
    spurious: list[SpuriousMarker]
