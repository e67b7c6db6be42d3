"""Frame-synchronous beam search.

Hypotheses advance through the input one frame at a time. Within a frame
each hypothesis may emit up to ``max_expansion`` labels in breadth-first
waves; taking blank moves it to the next frame. Because every hypothesis
alive at a frame has consumed the same input, their scores are
comparable, and anything more than ``beam`` below the best score seen at
the frame is dropped.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from spantrellis.utils.errors import ContractViolation

from .main import BLANK_ID, NORMALIZATION_TOLERANCE, DecodeConfig, Hypothesis, Scorer

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class _Candidate:
    """An extension scored but not yet advanced through the scorer."""

    parent: Hypothesis
    label: int
    score: float

    def sort_key(self) -> tuple[float, int, tuple[int, ...], tuple[int, ...]]:
        labels = self.parent.labels if self.label == BLANK_ID else self.parent.labels + (self.label,)
        return (-self.score, len(labels), labels, self.parent.emit_frames)


class HypothesisPool:
    """Collect hypotheses at one frame, merging identical label histories."""

    def __init__(self, merge: bool) -> None:
        self.merge = merge
        self._by_labels: dict[tuple[int, ...], Hypothesis] = {}
        self._all: list[Hypothesis] = []

    def add(self, hyp: Hypothesis) -> None:
        if not self.merge:
            self._all.append(hyp)
            return
        other = self._by_labels.get(hyp.labels)
        if other is None:
            self._by_labels[hyp.labels] = hyp
            return
        keep = hyp if hyp.sort_key() < other.sort_key() else other
        self._by_labels[hyp.labels] = Hypothesis(
            labels=keep.labels,
            emit_frames=keep.emit_frames,
            score=float(np.logaddexp(hyp.score, other.score)),
            pred_state=keep.pred_state,
        )

    def hypotheses(self) -> list[Hypothesis]:
        return list(self._by_labels.values()) if self.merge else list(self._all)


def _prune[H: (Hypothesis, _Candidate)](
    items: list[H], threshold: float, max_hyps: int | None
) -> list[H]:
    kept = sorted((h for h in items if h.score >= threshold), key=lambda h: h.sort_key())
    return kept if max_hyps is None else kept[:max_hyps]


class FrameSynchronousSearch:
    """Run beam search over T frames with a given scorer."""

    def __init__(self, scorer: Scorer, config: DecodeConfig) -> None:
        """
        Args:
            scorer (Scorer): Label distribution provider.
            config (DecodeConfig): Beam limits.
        """
        self.scorer = scorer
        self.config = config

    def _log_probs(self, hyp: Hypothesis, t: int) -> np.ndarray:
        log_probs = np.asarray(self.scorer.score(hyp.pred_state, t), dtype=np.float64)
        mass = float(logsumexp(log_probs))
        if not abs(mass) <= NORMALIZATION_TOLERANCE:
            raise ContractViolation(
                f"Scorer distribution at frame {t} sums to exp({mass:.3g}), not 1."
            )
        return log_probs

    def _advance(self, candidate: _Candidate, t: int) -> Hypothesis:
        parent = candidate.parent
        state = self.scorer.advance(parent.pred_state, candidate.label, t)
        if candidate.label == BLANK_ID:
            return Hypothesis(parent.labels, parent.emit_frames, candidate.score, state)
        return Hypothesis(
            labels=parent.labels + (candidate.label,),
            emit_frames=parent.emit_frames + (t,),
            score=candidate.score,
            pred_state=state,
        )

    def _expand_frame(self, hyps: list[Hypothesis], t: int) -> list[Hypothesis]:
        beam, max_hyps = self.config.beam, self.config.max_hyps
        leaving: list[_Candidate] = []
        frontier = hyps
        best = -math.inf

        for wave in range(self.config.max_expansion + 1):
            if not frontier:
                break
            emitting: list[_Candidate] = []
            for hyp in frontier:
                log_probs = self._log_probs(hyp, t)
                leaving.append(_Candidate(hyp, BLANK_ID, hyp.score + log_probs[BLANK_ID]))
                if wave == self.config.max_expansion:
                    continue
                for label in range(len(log_probs)):
                    if label != BLANK_ID and log_probs[label] > -math.inf:
                        emitting.append(_Candidate(hyp, label, hyp.score + log_probs[label]))

            best = max([best, *(c.score for c in leaving), *(c.score for c in emitting)])
            pool = HypothesisPool(self.config.merge)
            for candidate in _prune(emitting, best - beam, max_hyps):
                pool.add(self._advance(candidate, t))
            frontier = pool.hypotheses()

        # The best blank extension always survives so the beam never empties.
        survivors = _prune(leaving, best - beam, None) or _prune(leaving, -math.inf, 1)
        pool = HypothesisPool(self.config.merge)
        for candidate in survivors:
            pool.add(self._advance(candidate, t))
        return _prune(pool.hypotheses(), -math.inf, max_hyps)

    def run(self, T: int) -> list[Hypothesis]:
        """Decode T frames.

        Returns:
            list[Hypothesis]: Complete hypotheses, best first.
        """
        if T < 1:
            raise ContractViolation(f"Need at least one frame, got T={T}.")
        hyps = [Hypothesis((), (), 0.0, self.scorer.initial_state())]
        for t in range(1, T + 1):
            hyps = self._expand_frame(hyps, t)
            logger.debug("frame %d: %d hypotheses, best %.4f", t, len(hyps), hyps[0].score)
        return hyps
