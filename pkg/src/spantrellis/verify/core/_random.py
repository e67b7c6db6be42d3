"""Random lattices, paths and scorers for the checks."""

from typing import Any

import numpy as np
from scipy.special import log_softmax

from spantrellis.decoder.core.main import BLANK_ID, Scorer
from spantrellis.lattice.core.main import AlignmentPath, Lattice, Move


def random_lattice(rng: np.random.Generator, T: int, U: int, classes: int = 4) -> Lattice:
    """Lattice read off a random softmax over ``classes`` outputs per node.

    Column 0 is blank and column 1 the next target label; the remaining
    columns stand for the competing labels a real model would also score.
    """
    logprobs = log_softmax(rng.normal(scale=2.0, size=(T, U + 1, classes)), axis=-1)
    return Lattice(label_logprob=logprobs[:, :U, 1], blank_logprob=logprobs[:, :, 0])


def random_path(rng: np.random.Generator, T: int, U: int) -> AlignmentPath:
    """Uniformly random terminating path of a (T, U) trellis."""
    free = T + U - 1
    moves = [Move.BLANK] * free
    for position in rng.choice(free, size=U, replace=False):
        moves[int(position)] = Move.LABEL
    return AlignmentPath(tuple(moves) + (Move.BLANK,))


class TableScorer(Scorer):
    """Scorer whose distributions are a fixed random function of (labels, frame).

    The state is the label history itself, so two hypotheses with the same
    labels see the same distributions whatever their emission frames.
    """

    def __init__(self, vocab: int, seed: int) -> None:
        self.vocab = vocab
        self.seed = seed
        self._table: dict[tuple[tuple[int, ...], int], np.ndarray] = {}

    def initial_state(self) -> tuple[int, ...]:
        return ()

    def score(self, state: tuple[int, ...], t: int) -> np.ndarray:
        key = (state, t)
        if key not in self._table:
            rng = np.random.default_rng([self.seed, t, len(state), *state])
            self._table[key] = log_softmax(rng.normal(scale=2.0, size=self.vocab))
        return self._table[key]

    def advance(self, state: tuple[int, ...], label: int, t: int) -> Any:
        return state if label == BLANK_ID else state + (label,)


def exhaustive_best(scorer: TableScorer, T: int, max_expansion: int) -> tuple[float, tuple[int, ...], tuple[int, ...]]:
    """Best complete path by depth-first enumeration.

    Every frame emits at most ``max_expansion`` labels before its blank.

    Returns:
        tuple: (score, labels, 1-based emit frames).
    """
    best: tuple[float, tuple[int, ...], tuple[int, ...]] = (-np.inf, (), ())

    def explore(t: int, labels: tuple[int, ...], frames: tuple[int, ...], score: float, emitted: int) -> None:
        nonlocal best
        log_probs = scorer.score(labels, t)
        leave = score + float(log_probs[BLANK_ID])
        if t == T:
            if leave > best[0]:
                best = (leave, labels, frames)
        else:
            explore(t + 1, labels, frames, leave, 0)
        if emitted < max_expansion:
            for label in range(1, scorer.vocab):
                explore(t, labels + (label,), frames + (t,), score + float(log_probs[label]), emitted + 1)

    explore(1, (), (), 0.0, 0)
    return best
