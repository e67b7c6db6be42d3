"""Domain types for the RNN-T alignment trellis.

A transducer scores an input of T frames against U target labels through
two matrices: the probability of emitting the next target label at a
given (frame, labels-emitted) node, and the probability of emitting blank
there and moving on to the next frame. Every loss in this package reads
those two matrices, every alignment is a monotone walk over the nodes
they index, and every relaxation of a given alignment is a pair of
boolean masks of the same shapes. This module holds the three immutable
containers and their validation.

Indexing convention: row ``t`` of both matrices is input frame ``t + 1``;
trellis node ``(t, u)`` is "at frame row t with u labels emitted".
"""

from dataclasses import dataclass
from enum import IntEnum
from typing import Iterator

import numpy as np

from spantrellis.utils.errors import ContractViolation

NEG_INF = -np.inf


class Move(IntEnum):
    """One step of an alignment path."""

    BLANK = 0
    LABEL = 1


def _frozen(array: np.ndarray, dtype: type) -> np.ndarray:
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Lattice:
    """Label and blank log-probabilities over the (T, U) trellis.

    Attributes:
        label_logprob (np.ndarray): Shape (T, U). Entry (t, u) is the
            log-probability of emitting target label u+1 at frame row t
            after u labels have been emitted.
        blank_logprob (np.ndarray): Shape (T, U+1). Entry (t, u) is the
            log-probability of blank at node (t, u).
    """

    label_logprob: np.ndarray
    blank_logprob: np.ndarray

    def __post_init__(self) -> None:
        label = _frozen(self.label_logprob, np.float64)
        blank = _frozen(self.blank_logprob, np.float64)

        if blank.ndim != 2 or label.ndim != 2:
            raise ContractViolation(
                f"Lattice matrices must be 2-D, got label {label.shape} "
                f"and blank {blank.shape}."
            )
        T, U1 = blank.shape
        if T < 1 or U1 < 1:
            raise ContractViolation(f"Lattice needs T >= 1 and U >= 0, got {blank.shape}.")
        if label.shape != (T, U1 - 1):
            raise ContractViolation(
                f"label_logprob shape {label.shape} does not match "
                f"blank_logprob shape {blank.shape}; expected {(T, U1 - 1)}."
            )
        for name, matrix in (("label_logprob", label), ("blank_logprob", blank)):
            if np.isnan(matrix).any() or np.isposinf(matrix).any():
                raise ContractViolation(f"{name} contains NaN or +inf entries.")

        object.__setattr__(self, "label_logprob", label)
        object.__setattr__(self, "blank_logprob", blank)

    @property
    def T(self) -> int:
        """Number of input frames."""
        return int(self.blank_logprob.shape[0])

    @property
    def U(self) -> int:
        """Number of target labels."""
        return int(self.blank_logprob.shape[1] - 1)

    def masked(self, mask: "ConstraintMask") -> "Lattice":
        """Return a copy with every inadmissible entry set to -inf.

        Raises:
            ContractViolation: If the mask shape does not match.
        """
        mask.check_shape(self.T, self.U)
        return Lattice(
            label_logprob=np.where(mask.label_mask, self.label_logprob, NEG_INF),
            blank_logprob=np.where(mask.blank_mask, self.blank_logprob, NEG_INF),
        )


@dataclass(frozen=True)
class AlignmentPath:
    """A monotone trellis path of T blanks and U labels ending in blank.

    Attributes:
        moves (tuple[Move, ...]): Ordered moves; BLANK advances the frame,
            LABEL advances the label counter.
    """

    moves: tuple[Move, ...]

    def __post_init__(self) -> None:
        moves = tuple(Move(m) for m in self.moves)
        if not moves:
            raise ContractViolation("An alignment path needs at least one move.")
        if moves[-1] is not Move.BLANK:
            raise ContractViolation("An alignment path must end with the terminating blank.")
        object.__setattr__(self, "moves", moves)

    @classmethod
    def from_emissions(cls, emissions: list[int] | tuple[int, ...]) -> "AlignmentPath":
        """Build a path from the number of labels emitted at each frame.

        Args:
            emissions (list[int]): One non-negative count per frame.

        Returns:
            AlignmentPath: Path emitting ``emissions[t]`` labels at frame row t
            before the blank that leaves it.
        """
        if any(n < 0 for n in emissions):
            raise ContractViolation(f"Emission counts must be non-negative: {emissions}")
        moves: list[Move] = []
        for count in emissions:
            moves.extend([Move.LABEL] * count)
            moves.append(Move.BLANK)
        return cls(moves=tuple(moves))

    @classmethod
    def from_emit_frames(cls, emit_frames: list[int], T: int) -> "AlignmentPath":
        """Build a path from 1-based emission frames (one per label)."""
        counts = [0] * T
        for frame in emit_frames:
            if not 1 <= frame <= T:
                raise ContractViolation(f"Emit frame {frame} outside [1, {T}].")
            counts[frame - 1] += 1
        return cls.from_emissions(counts)

    @property
    def T(self) -> int:
        """Number of BLANK moves."""
        return sum(1 for m in self.moves if m is Move.BLANK)

    @property
    def U(self) -> int:
        """Number of LABEL moves."""
        return len(self.moves) - self.T

    def steps(self) -> Iterator[tuple[Move, int, int]]:
        """Yield (move, t, u) with the node each move departs from."""
        t = u = 0
        for move in self.moves:
            yield move, t, u
            if move is Move.BLANK:
                t += 1
            else:
                u += 1

    def emit_frames(self) -> list[int]:
        """Return the 1-based frame of every LABEL move."""
        return [t + 1 for move, t, _ in self.steps() if move is Move.LABEL]

    def cell_masks(self) -> tuple[np.ndarray, np.ndarray]:
        """Return boolean (label, blank) matrices marking the visited cells."""
        label = np.zeros((self.T, self.U), dtype=bool)
        blank = np.zeros((self.T, self.U + 1), dtype=bool)
        for move, t, u in self.steps():
            if move is Move.LABEL:
                label[t, u] = True
            else:
                blank[t, u] = True
        return label, blank

    def check_shape(self, T: int, U: int) -> None:
        """Raise ContractViolation unless the path fits a (T, U) lattice."""
        if (self.T, self.U) != (T, U):
            raise ContractViolation(
                f"Path has T={self.T}, U={self.U} but lattice has T={T}, U={U}."
            )


@dataclass(frozen=True)
class ConstraintMask:
    """Admissible cells of the label and blank matrices.

    Attributes:
        label_mask (np.ndarray): Boolean, shape (T, U).
        blank_mask (np.ndarray): Boolean, shape (T, U+1).
        delta_t (int): Relaxation half-width along frames.
        delta_u (int): Relaxation half-width along labels.
    """

    label_mask: np.ndarray
    blank_mask: np.ndarray
    delta_t: int
    delta_u: int

    def __post_init__(self) -> None:
        if self.delta_t < 0 or self.delta_u < 0:
            raise ContractViolation(
                f"Relaxation must be non-negative, got ({self.delta_t}, {self.delta_u})."
            )
        object.__setattr__(self, "label_mask", _frozen(self.label_mask, np.bool_))
        object.__setattr__(self, "blank_mask", _frozen(self.blank_mask, np.bool_))

    @property
    def T(self) -> int:
        return int(self.blank_mask.shape[0])

    @property
    def U(self) -> int:
        return int(self.blank_mask.shape[1] - 1)

    def check_shape(self, T: int, U: int) -> None:
        """Raise ContractViolation unless the mask fits a (T, U) lattice."""
        if self.label_mask.shape != (T, U) or self.blank_mask.shape != (T, U + 1):
            raise ContractViolation(
                f"Mask shapes {self.label_mask.shape}/{self.blank_mask.shape} do not "
                f"match lattice T={T}, U={U}."
            )

    def admits(self, path: AlignmentPath) -> bool:
        """Return True if every step of ``path`` lies inside the mask."""
        path.check_shape(self.T, self.U)
        for move, t, u in path.steps():
            mask = self.label_mask if move is Move.LABEL else self.blank_mask
            if not mask[t, u]:
                return False
        return True
