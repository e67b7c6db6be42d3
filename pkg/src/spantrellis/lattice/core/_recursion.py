"""Forward, backward and best-path recursions over the trellis.

Nodes on one anti-diagonal (t + u = c) only depend on the previous
anti-diagonal, so each sweep processes a whole anti-diagonal as one
vectorized step. All values are log-probabilities in float64; sums use
``np.logaddexp`` and -inf is the zero of the semiring.
"""

from dataclasses import dataclass

import numpy as np

from .main import NEG_INF, AlignmentPath, Lattice, Move


def diagonal(c: int, T: int, U: int) -> tuple[np.ndarray, np.ndarray]:
    """Return (t, u) index arrays of the nodes with t + u = c, t < T."""
    t = np.arange(max(0, c - U), min(T - 1, c) + 1)
    return t, c - t


def _padded_labels(lattice: Lattice) -> np.ndarray:
    # Extra -inf column so u = U can be indexed uniformly.
    pad = np.full((lattice.T, 1), NEG_INF)
    return np.concatenate([lattice.label_logprob, pad], axis=1)


@dataclass(frozen=True)
class ForwardResult:
    """Forward variables and total log-likelihood.

    Attributes:
        alpha (np.ndarray): Shape (T+1, U+1). Row T holds the nodes reached
            by the blank leaving the last frame; ``alpha[T, U]`` is the total.
        total (float): Log-sum over all complete admissible paths.
    """

    alpha: np.ndarray
    total: float


class ForwardRecursion:
    """Compute alpha over anti-diagonals."""

    def __init__(self, lattice: Lattice) -> None:
        """
        Args:
            lattice (Lattice): Lattice to sweep, already masked if needed.
        """
        self.lattice = lattice

    def run(self) -> ForwardResult:
        """Run the forward sweep.

        Returns:
            ForwardResult: alpha matrix and total log-likelihood.
        """
        T, U = self.lattice.T, self.lattice.U
        blank = self.lattice.blank_logprob
        label = _padded_labels(self.lattice)

        alpha = np.full((T + 1, U + 1), NEG_INF)
        alpha[0, 0] = 0.0
        for c in range(1, T + U):
            t, u = diagonal(c, T, U)
            tb = np.maximum(t - 1, 0)
            ul = np.maximum(u - 1, 0)
            from_blank = np.where(t > 0, alpha[tb, u] + blank[tb, u], NEG_INF)
            from_label = np.where(u > 0, alpha[t, ul] + label[t, ul], NEG_INF)
            alpha[t, u] = np.logaddexp(from_blank, from_label)

        alpha[T, :] = alpha[T - 1, :] + blank[T - 1, :]
        return ForwardResult(alpha=alpha, total=float(alpha[T, U]))


class BackwardRecursion:
    """Compute beta over anti-diagonals, from termination back to (0, 0)."""

    def __init__(self, lattice: Lattice) -> None:
        """
        Args:
            lattice (Lattice): Lattice to sweep, already masked if needed.
        """
        self.lattice = lattice

    def run(self) -> np.ndarray:
        """Run the backward sweep.

        Returns:
            np.ndarray: beta of shape (T+1, U+1); ``beta[T, U] = 0`` and
            ``beta[0, 0]`` equals the forward total.
        """
        T, U = self.lattice.T, self.lattice.U
        blank = self.lattice.blank_logprob
        label = _padded_labels(self.lattice)

        beta = np.full((T + 1, U + 1), NEG_INF)
        beta[T, U] = 0.0
        for c in range(T - 1 + U, -1, -1):
            t, u = diagonal(c, T, U)
            uu = np.minimum(u + 1, U)
            to_blank = beta[t + 1, u] + blank[t, u]
            to_label = np.where(u < U, beta[t, uu] + label[t, u], NEG_INF)
            beta[t, u] = np.logaddexp(to_blank, to_label)
        return beta


@dataclass(frozen=True)
class BestPathResult:
    """Highest-scoring single alignment.

    Attributes:
        path (AlignmentPath | None): Best path, None when no path is finite.
        score (float): Its log-probability.
    """

    path: AlignmentPath | None
    score: float


class ViterbiRecursion:
    """Max-product forward sweep with backpointers."""

    def __init__(self, lattice: Lattice) -> None:
        self.lattice = lattice

    def run(self) -> BestPathResult:
        """Return the single most probable complete path."""
        T, U = self.lattice.T, self.lattice.U
        blank = self.lattice.blank_logprob
        label = _padded_labels(self.lattice)

        delta = np.full((T, U + 1), NEG_INF)
        came_by_label = np.zeros((T, U + 1), dtype=bool)
        delta[0, 0] = 0.0
        for c in range(1, T + U):
            t, u = diagonal(c, T, U)
            tb = np.maximum(t - 1, 0)
            ul = np.maximum(u - 1, 0)
            from_blank = np.where(t > 0, delta[tb, u] + blank[tb, u], NEG_INF)
            from_label = np.where(u > 0, delta[t, ul] + label[t, ul], NEG_INF)
            # Ties prefer blank so that labels are emitted as late as possible.
            came_by_label[t, u] = from_label > from_blank
            delta[t, u] = np.maximum(from_blank, from_label)

        score = float(delta[T - 1, U] + blank[T - 1, U])
        if score == NEG_INF:
            return BestPathResult(path=None, score=score)

        moves = [Move.BLANK]
        t, u = T - 1, U
        while (t, u) != (0, 0):
            if came_by_label[t, u]:
                moves.append(Move.LABEL)
                u -= 1
            else:
                moves.append(Move.BLANK)
                t -= 1
        return BestPathResult(path=AlignmentPath(tuple(reversed(moves))), score=score)
