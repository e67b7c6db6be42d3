"""Alignment losses and their gradients with respect to the lattice.

Three losses share one interface. The unconstrained loss marginalizes
over every alignment, the fixed loss scores only the annotated one, and
the constrained loss marginalizes over the alignments inside a relaxed
band around the annotation. Gradients are those of the negative
log-likelihood with respect to the raw label and blank log-probability
entries, i.e. minus the posterior occupancy of each transition.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Literal

import numpy as np

from spantrellis.utils.errors import ContractViolation, NoAdmissiblePathError

from ._mask import ConstraintMaskBuilder
from ._recursion import BackwardRecursion, ForwardRecursion
from .main import AlignmentPath, ConstraintMask, Lattice

type LossModeName = Literal["unconstrained", "fixed", "constrained"]


@dataclass(frozen=True)
class Unconstrained:
    """Sum over all alignments."""

    name: LossModeName = "unconstrained"


@dataclass(frozen=True)
class Fixed:
    """Score of the given alignment only."""

    path: AlignmentPath
    name: LossModeName = "fixed"


@dataclass(frozen=True)
class Constrained:
    """Sum over alignments within (delta_t, delta_u) of the given one."""

    path: AlignmentPath
    delta_t: int
    delta_u: int
    name: LossModeName = "constrained"

    def mask(self) -> ConstraintMask:
        return ConstraintMaskBuilder(self.path).build(self.delta_t, self.delta_u)


type LossMode = Unconstrained | Fixed | Constrained


@dataclass(frozen=True)
class LatticeGradients:
    """Gradients of the negative log-likelihood.

    Attributes:
        d_label (np.ndarray): Shape (T, U).
        d_blank (np.ndarray): Shape (T, U+1).
    """

    d_label: np.ndarray
    d_blank: np.ndarray


def occupancy_gradients(lattice: Lattice) -> tuple[float, LatticeGradients]:
    """Return the log-likelihood and minus the transition occupancies.

    Raises:
        NoAdmissiblePathError: If no complete path has finite probability.
    """
    forward = ForwardRecursion(lattice).run()
    if forward.total == -np.inf:
        raise NoAdmissiblePathError("Loss is -inf: no admissible alignment path.")
    alpha, total = forward.alpha, forward.total
    beta = BackwardRecursion(lattice).run()
    T, U = lattice.T, lattice.U

    d_label = -np.exp(alpha[:T, :U] + lattice.label_logprob + beta[:T, 1:] - total)
    d_blank = -np.exp(alpha[:T, :] + lattice.blank_logprob + beta[1:, :] - total)
    return total, LatticeGradients(d_label=d_label, d_blank=d_blank)


def path_logprob(lattice: Lattice, path: AlignmentPath) -> float:
    """Sum the T+U step log-probabilities along ``path``."""
    path.check_shape(lattice.T, lattice.U)
    label_cells, blank_cells = path.cell_masks()
    steps = np.concatenate(
        [lattice.label_logprob[label_cells], lattice.blank_logprob[blank_cells]]
    )
    return float(np.sum(steps))


class LossBase(ABC):
    """Define the interface shared by the three alignment losses."""

    def __init__(self, lattice: Lattice) -> None:
        """
        Args:
            lattice (Lattice): Raw (unmasked) lattice.
        """
        self.lattice = lattice

    @abstractmethod
    def value(self) -> float:
        """Return the log-likelihood under this loss."""
        ...

    @abstractmethod
    def gradients(self) -> LatticeGradients:
        """Return gradients of the negative log-likelihood."""
        ...


class UnconstrainedLoss(LossBase):
    """Log-likelihood summed over every alignment."""

    def value(self) -> float:
        return ForwardRecursion(self.lattice).run().total

    def gradients(self) -> LatticeGradients:
        return occupancy_gradients(self.lattice)[1]


class FixedLoss(LossBase):
    """Log-likelihood of the given alignment only."""

    def __init__(self, lattice: Lattice, path: AlignmentPath) -> None:
        super().__init__(lattice)
        path.check_shape(lattice.T, lattice.U)
        self.path = path

    def value(self) -> float:
        return path_logprob(self.lattice, self.path)

    def gradients(self) -> LatticeGradients:
        if self.value() == -np.inf:
            raise NoAdmissiblePathError("Fixed alignment has zero probability.")
        label_cells, blank_cells = self.path.cell_masks()
        return LatticeGradients(
            d_label=-label_cells.astype(np.float64),
            d_blank=-blank_cells.astype(np.float64),
        )


class ConstrainedLoss(LossBase):
    """Log-likelihood summed over alignments inside a relaxed band."""

    def __init__(self, lattice: Lattice, mask: ConstraintMask) -> None:
        super().__init__(lattice)
        self.mask = mask
        self.masked = lattice.masked(mask)

    def value(self) -> float:
        return ForwardRecursion(self.masked).run().total

    def gradients(self) -> LatticeGradients:
        # Masked entries are constants (-inf) so their gradient is zero.
        return occupancy_gradients(self.masked)[1]


class LossSelector:
    """Select the loss implementation for a loss mode."""

    def __init__(self, lattice: Lattice) -> None:
        """
        Args:
            lattice (Lattice): Lattice the loss is evaluated on.
        """
        self.lattice = lattice

    def select(self, mode: LossMode) -> LossBase:
        """Return the loss object for ``mode``.

        Raises:
            ContractViolation: If the mode is not one of the three losses.
        """
        if isinstance(mode, Unconstrained):
            return UnconstrainedLoss(self.lattice)
        if isinstance(mode, Fixed):
            return FixedLoss(self.lattice, mode.path)
        if isinstance(mode, Constrained):
            mode.path.check_shape(self.lattice.T, self.lattice.U)
            if mode.delta_t == 0 and mode.delta_u == 0:
                # A zero-width band admits exactly the path.
                return FixedLoss(self.lattice, mode.path)
            return ConstrainedLoss(self.lattice, mode.mask())
        raise ContractViolation(
            f"Unsupported loss mode: {mode!r}. "
            f"Expected Unconstrained, Fixed or Constrained."
        )

