"""Expose the alignment lattice operations.

Each function validates its inputs and delegates to the recursion, mask
and loss classes in ``core``. All values are float64 log-probabilities;
losses are returned as log-likelihoods (the training objective is their
negation).
"""

import numpy as np

from .core._loss import (
    Constrained,
    Fixed,
    LatticeGradients,
    LossMode,
    LossSelector,
    Unconstrained,
)
from .core._loss import path_logprob as _path_logprob
from .core._mask import ConstraintMaskBuilder
from .core._recursion import (
    BackwardRecursion,
    BestPathResult,
    ForwardRecursion,
    ForwardResult,
    ViterbiRecursion,
)
from .core.main import AlignmentPath, ConstraintMask, Lattice

__all__ = [
    "AlignmentPath",
    "Constrained",
    "ConstraintMask",
    "Fixed",
    "Lattice",
    "LatticeGradients",
    "LossMode",
    "Unconstrained",
    "backward",
    "best_path",
    "build_constraint_mask",
    "forward",
    "loss_constrained",
    "loss_fixed",
    "loss_gradients",
    "loss_unconstrained",
    "path_logprob",
]


def _apply_mask(lattice: Lattice, mask: ConstraintMask | None) -> Lattice:
    return lattice if mask is None else lattice.masked(mask)


def forward(lattice: Lattice, mask: ConstraintMask | None = None) -> ForwardResult:
    """Compute forward variables and the total log-likelihood.

    Args:
        lattice (Lattice): Label/blank log-probabilities.
        mask (ConstraintMask | None): Optional admissible-cell mask.

    Returns:
        ForwardResult: ``alpha`` of shape (T+1, U+1) and ``total``, the
        log-sum over admissible paths (-inf when none is admissible).

    Raises:
        ContractViolation: If the mask shape does not match the lattice.
    """
    return ForwardRecursion(_apply_mask(lattice, mask)).run()


def backward(lattice: Lattice, mask: ConstraintMask | None = None) -> np.ndarray:
    """Compute backward variables; ``beta[0, 0]`` equals the forward total."""
    return BackwardRecursion(_apply_mask(lattice, mask)).run()


def loss_unconstrained(lattice: Lattice) -> float:
    """Log-likelihood summed over every alignment."""
    return LossSelector(lattice).select(Unconstrained()).value()


def path_logprob(lattice: Lattice, path: AlignmentPath) -> float:
    """Sum of the T+U step log-probabilities along ``path``.

    Raises:
        ContractViolation: If the path does not fit the lattice.
    """
    return _path_logprob(lattice, path)


def loss_fixed(lattice: Lattice, path: AlignmentPath) -> float:
    """Log-likelihood of the given alignment only."""
    return LossSelector(lattice).select(Fixed(path)).value()


def build_constraint_mask(path: AlignmentPath, delta_t: int, delta_u: int) -> ConstraintMask:
    """Relax ``path`` into a rectangular band of half-widths (delta_t, delta_u)."""
    return ConstraintMaskBuilder(path).build(delta_t=delta_t, delta_u=delta_u)


def loss_constrained(
    lattice: Lattice,
    path: AlignmentPath,
    delta_t: int,
    delta_u: int | None = None,
) -> float:
    """Log-likelihood summed over the alignments within delta of ``path``.

    Args:
        lattice (Lattice): Label/blank log-probabilities.
        path (AlignmentPath): Annotated alignment.
        delta_t (int): Relaxation along frames.
        delta_u (int | None): Relaxation along labels; defaults to delta_t.
    """
    delta_u = delta_t if delta_u is None else delta_u
    return LossSelector(lattice).select(Constrained(path, delta_t, delta_u)).value()


def loss_gradients(lattice: Lattice, mode: LossMode) -> LatticeGradients:
    """Gradients of the negative log-likelihood w.r.t. the lattice entries.

    Raises:
        NoAdmissiblePathError: If the loss is -inf in the chosen mode.
    """
    return LossSelector(lattice).select(mode).gradients()


def best_path(lattice: Lattice) -> BestPathResult:
    """Return the single most probable alignment and its log-probability."""
    return ViterbiRecursion(lattice).run()
