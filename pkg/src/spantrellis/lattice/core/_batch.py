"""Padded batches of lattices.

Lattices of different sizes are stacked frame-major into
(B, T_max, U_max) / (B, T_max, U_max + 1) arrays padded with -inf, with
the true (T, U) of every item recorded alongside. Losses are evaluated
per item, optionally in parallel, and returned in batch order.
"""

from dataclasses import dataclass

import numpy as np

from spantrellis.utils.parallel import ordered_map

from ._loss import LatticeGradients, LossMode, LossSelector
from .main import NEG_INF, Lattice


@dataclass(frozen=True)
class LatticeBatch:
    """Frame-major padded stack of lattices.

    Attributes:
        label_logprob (np.ndarray): Shape (B, T_max, U_max).
        blank_logprob (np.ndarray): Shape (B, T_max, U_max + 1).
        frames (np.ndarray): True T per item.
        labels (np.ndarray): True U per item.
    """

    label_logprob: np.ndarray
    blank_logprob: np.ndarray
    frames: np.ndarray
    labels: np.ndarray

    @classmethod
    def stack(cls, lattices: list[Lattice]) -> "LatticeBatch":
        """Pad and stack lattices.

        Raises:
            ValueError: If the list is empty.
        """
        if not lattices:
            raise ValueError("Cannot stack an empty list of lattices.")
        frames = np.array([lat.T for lat in lattices])
        labels = np.array([lat.U for lat in lattices])
        T_max, U_max = int(frames.max()), int(labels.max())

        label = np.full((len(lattices), T_max, U_max), NEG_INF)
        blank = np.full((len(lattices), T_max, U_max + 1), NEG_INF)
        for i, lat in enumerate(lattices):
            label[i, : lat.T, : lat.U] = lat.label_logprob
            blank[i, : lat.T, : lat.U + 1] = lat.blank_logprob
        return cls(label_logprob=label, blank_logprob=blank, frames=frames, labels=labels)

    def __len__(self) -> int:
        return int(self.frames.shape[0])

    def item(self, index: int) -> Lattice:
        """Return the unpadded lattice at ``index``."""
        T, U = int(self.frames[index]), int(self.labels[index])
        return Lattice(
            label_logprob=self.label_logprob[index, :T, :U],
            blank_logprob=self.blank_logprob[index, :T, : U + 1],
        )

    def unstack(self) -> list[Lattice]:
        return [self.item(i) for i in range(len(self))]

    def losses(self, modes: list[LossMode], workers: int = 1) -> np.ndarray:
        """Evaluate one loss per item, in batch order."""
        self._check_modes(modes)
        values = ordered_map(
            lambda i: LossSelector(self.item(i)).select(modes[i]).value(),
            range(len(self)),
            workers=workers,
        )
        return np.array(values, dtype=np.float64)

    def gradients(self, modes: list[LossMode], workers: int = 1) -> list[LatticeGradients]:
        """Evaluate gradients of one loss per item, in batch order."""
        self._check_modes(modes)
        return ordered_map(
            lambda i: LossSelector(self.item(i)).select(modes[i]).gradients(),
            range(len(self)),
            workers=workers,
        )

    def _check_modes(self, modes: list[LossMode]) -> None:
        if len(modes) != len(self):
            raise ValueError(f"Got {len(modes)} loss modes for a batch of {len(self)}.")
