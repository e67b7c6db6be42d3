"""Brute-force reference values by explicit path enumeration.

Only usable on tiny trellises: a (T, U) lattice has C(T+U-1, U)
terminating paths. The verification suite and the tests compare the
dynamic programs against these sums.
"""

from itertools import combinations
from typing import Iterator

import numpy as np
from scipy.special import logsumexp

from ._loss import path_logprob
from .main import AlignmentPath, ConstraintMask, Lattice, Move


class PathEnumerator:
    """Enumerate every terminating path of a (T, U) trellis."""

    def __init__(self, T: int, U: int) -> None:
        self.T = T
        self.U = U

    def paths(self) -> Iterator[AlignmentPath]:
        """Yield all paths with T blanks, U labels and a final blank."""
        free = self.T + self.U - 1
        for positions in combinations(range(free), self.U):
            moves = [Move.BLANK] * free
            for p in positions:
                moves[p] = Move.LABEL
            yield AlignmentPath(tuple(moves) + (Move.BLANK,))


def enumerated_total(lattice: Lattice, mask: ConstraintMask | None = None) -> float:
    """Log-sum-exp of the path scores, optionally keeping masked paths only."""
    scores = [
        path_logprob(lattice, path)
        for path in PathEnumerator(lattice.T, lattice.U).paths()
        if mask is None or mask.admits(path)
    ]
    if not scores:
        return -np.inf
    return float(logsumexp(scores))


def enumerated_best(lattice: Lattice) -> float:
    """Highest single path score, -inf when no path is finite."""
    return max((path_logprob(lattice, path) for path in PathEnumerator(lattice.T, lattice.U).paths()), default=-np.inf)
