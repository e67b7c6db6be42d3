"""Sequence-to-sequence decoder with hard monotonic attention.

The decoder reads one encoder frame at a time. Each step feeds
concat(emb[previous output], enc[t]) through a GRU and projects the new
state onto V_out+1 outputs, where ``eow`` (id 0) means "move to the next
frame". Given an alignment path the model emits exactly the T+U outputs
of that path, so its training loss is a fixed-path loss; writing each
step's chosen log-probability into a lattice cell reproduces it exactly.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import log_softmax

from spantrellis.decoder.core.main import Scorer
from spantrellis.lattice.core.main import AlignmentPath, Lattice, Move
from spantrellis.utils.errors import ContractViolation

from . import _tree
from ._encoder import Encoder
from ._recurrent import GRUCell, GRUStepCache
from .main import EOW_ID, Seq2SeqHardAttnParams, Seq2SeqParams


class HardAttentionDecoder:
    """One decoder step: previous output and attended frame to a log-distribution."""

    def __init__(self, params: Seq2SeqHardAttnParams) -> None:
        """
        Args:
            params (Seq2SeqHardAttnParams): Decoder parameters.
        """
        self.params = params
        self.cell = GRUCell(params.cell)

    def step(self, emb_u: np.ndarray, enc_t: np.ndarray, state: np.ndarray) -> tuple[np.ndarray, np.ndarray, GRUStepCache]:
        """Return (log-distribution, new_state, cache)."""
        h, cache = self.cell.step(np.concatenate([emb_u, enc_t]), state)
        return log_softmax(h @ self.params.W + self.params.b), h, cache


@dataclass(frozen=True)
class _Step:
    row: int
    target: int
    t: int
    logprobs: np.ndarray
    h: np.ndarray
    cache: GRUStepCache


class Seq2SeqNetwork:
    """Encoder plus hard-attention decoder."""

    def __init__(self, params: Seq2SeqParams) -> None:
        self.params = params
        self.encoder = Encoder(params.encoder)
        self.decoder = HardAttentionDecoder(params.decoder)

    @property
    def output_vocab(self) -> int:
        return self.params.decoder.W.shape[1] - 1

    def _unroll(self, F: np.ndarray, targets: np.ndarray, path: AlignmentPath) -> list[_Step]:
        targets = np.asarray(targets, dtype=np.int64).reshape(-1)
        path.check_shape(F.shape[0], targets.size)
        if targets.size and (targets.min() < 1 or targets.max() > self.output_vocab):
            raise ContractViolation(f"Target labels must lie in [1, {self.output_vocab}].")
        emb = self.params.decoder.embedding
        steps: list[_Step] = []
        prev, h = EOW_ID, self.params.decoder.initial_state
        for move, t, u in path.steps():
            target = EOW_ID if move is Move.BLANK else int(targets[u])
            logprobs, h, cache = self.decoder.step(emb[prev], F[t], h)
            steps.append(_Step(row=prev, target=target, t=t, logprobs=logprobs, h=h, cache=cache))
            prev = target
        return steps

    def path_loss(self, tokens: np.ndarray, targets: np.ndarray, path: AlignmentPath) -> float:
        """Log-likelihood of the T+U outputs along ``path``."""
        F, _ = self.encoder.forward(tokens)
        return float(sum(s.logprobs[s.target] for s in self._unroll(F, targets, path)))

    def path_lattice(self, tokens: np.ndarray, targets: np.ndarray, path: AlignmentPath) -> Lattice:
        """Lattice holding each step's chosen log-probability on the path.

        Off-path cells are -inf, so any of the three lattice losses on it
        equals ``path_loss``.
        """
        F, _ = self.encoder.forward(tokens)
        T, U = path.T, path.U
        label = np.full((T, U), -np.inf)
        blank = np.full((T, U + 1), -np.inf)
        for (move, t, u), step in zip(path.steps(), self._unroll(F, targets, path)):
            if move is Move.BLANK:
                blank[t, u] = step.logprobs[EOW_ID]
            else:
                label[t, u] = step.logprobs[step.target]
        return Lattice(label_logprob=label, blank_logprob=blank)

    def backprop(self, tokens: np.ndarray, targets: np.ndarray, path: AlignmentPath) -> tuple[float, Seq2SeqParams]:
        """Return the path log-likelihood and gradients of its negation."""
        F, enc_cache = self.encoder.forward(tokens)
        steps = self._unroll(F, targets, path)
        grads = _tree.zeros_like(self.params)
        dec, dgrads = self.params.decoder, grads.decoder
        d_e = dec.embedding.shape[1]

        dF = np.zeros_like(F)
        dh = np.zeros_like(dec.initial_state)
        for step in reversed(steps):
            dlogits = np.exp(step.logprobs)
            dlogits[step.target] -= 1.0
            dgrads.W[...] += np.outer(step.h, dlogits)
            dgrads.b[...] += dlogits
            dh = dh + dlogits @ dec.W.T
            dx, dh = self.decoder.cell.step_backward(dh, step.cache, dgrads.cell)
            dgrads.embedding[step.row] += dx[:d_e]
            dF[step.t] += dx[d_e:]
        dgrads.initial_state[...] += dh
        self.encoder.backward(dF, enc_cache, grads.encoder)
        return float(sum(s.logprobs[s.target] for s in steps)), grads


@dataclass(frozen=True, eq=False)
class Seq2SeqState:
    """Decoder hidden state and the previous output id; hashed by identity."""

    h: np.ndarray
    prev: int


class Seq2SeqScorer(Scorer):
    """Beam-search scorer for the hard-attention decoder.

    ``score`` runs the decoder step and caches it; ``advance`` commits the
    cached hidden state, for ``eow`` as well as for labels.
    """

    def __init__(self, network: Seq2SeqNetwork, tokens: np.ndarray) -> None:
        self.network = network
        self.F, _ = network.encoder.forward(tokens)
        self._cache: dict[tuple[Seq2SeqState, int], tuple[np.ndarray, np.ndarray]] = {}

    @property
    def frames(self) -> int:
        return self.F.shape[0]

    def initial_state(self) -> Seq2SeqState:
        return Seq2SeqState(h=self.network.params.decoder.initial_state, prev=EOW_ID)

    def _step(self, state: Seq2SeqState, t: int) -> tuple[np.ndarray, np.ndarray]:
        key = (state, t)
        if key not in self._cache:
            emb = self.network.params.decoder.embedding[state.prev]
            logprobs, h, _ = self.network.decoder.step(emb, self.F[t - 1], state.h)
            self._cache[key] = (logprobs, h)
        return self._cache[key]

    def score(self, state: Seq2SeqState, t: int) -> np.ndarray:
        return self._step(state, t)[0]

    def advance(self, state: Seq2SeqState, label: int, t: int) -> Seq2SeqState:
        return Seq2SeqState(h=self._step(state, t)[1], prev=label)
