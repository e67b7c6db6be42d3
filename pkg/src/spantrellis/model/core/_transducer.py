"""RNN-T prediction and joint networks, lattice construction and backprop.

The joint network scores every (frame, label-prefix) pair at once:
``log_softmax(tanh(f[t] + g[u]) W + b)`` for t < T and u <= U. The
lattice takes the target label and blank entries from that tensor, the
lattice loss supplies their gradients, and those flow back through the
joint, prediction and encoder networks.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import log_softmax

from spantrellis.decoder.core.main import Scorer
from spantrellis.lattice.core._batch import LatticeBatch
from spantrellis.lattice.core._loss import LatticeGradients, LossMode, LossSelector
from spantrellis.lattice.core.main import Lattice
from spantrellis.utils.errors import ContractViolation
from spantrellis.utils.parallel import ordered_map

from . import _tree
from ._encoder import Encoder, EncoderCache
from ._recurrent import GRUCell, GRUStepCache
from .main import BLANK_ID, JointParams, PredictionParams, TransducerParams


class PredictionNetwork:
    """Label-history network; its state is the GRU hidden vector."""

    def __init__(self, params: PredictionParams) -> None:
        """
        Args:
            params (PredictionParams): Embedding rows for labels 1..V_out
                followed by the start-token row.
        """
        self.params = params
        self.cell = GRUCell(params.cell)
        self.start_id = params.embedding.shape[0]

    def _row(self, label_id: int) -> int:
        if not 1 <= label_id <= self.start_id:
            raise ContractViolation(
                f"Prediction input must be a label in [1, {self.start_id - 1}] "
                f"or the start token {self.start_id}, got {label_id}."
            )
        return label_id - 1

    def step(self, state: np.ndarray, label_id: int) -> tuple[np.ndarray, np.ndarray, GRUStepCache]:
        """Return (g, new_state, cache) after feeding ``label_id``."""
        h, cache = self.cell.step(self.params.embedding[self._row(label_id)], state)
        return h, h, cache

    def initial(self) -> tuple[np.ndarray, np.ndarray]:
        """Return (g(0), state) produced by the start token."""
        g, state, _ = self.step(self.params.initial_state, self.start_id)
        return g, state

    def unroll(self, targets: np.ndarray) -> tuple[np.ndarray, list[GRUStepCache], np.ndarray]:
        """Return G of shape (U+1, d): g(0) and the state after each label."""
        inputs = np.array([self.start_id, *targets], dtype=np.int64)
        rows = np.array([self._row(int(k)) for k in inputs], dtype=np.int64)
        G, caches = self.cell.run(self.params.embedding[rows], self.params.initial_state)
        return G, caches, rows

    def backward(self, dG: np.ndarray, caches: list[GRUStepCache], rows: np.ndarray, grads: PredictionParams) -> None:
        dX, dh0 = self.cell.run_backward(dG, caches, grads.cell)
        np.add.at(grads.embedding, rows, dX)
        grads.initial_state[...] += dh0


class JointNetwork:
    def __init__(self, params: JointParams) -> None:
        self.params = params

    def logits(self, f: np.ndarray, g: np.ndarray) -> np.ndarray:
        """Log-distribution over V_out+1 outputs; broadcasts over leading axes."""
        return log_softmax(np.tanh(f + g) @ self.params.W + self.params.b, axis=-1)


@dataclass(frozen=True)
class TransducerForward:
    """Everything the backward pass needs from one forward pass."""

    targets: np.ndarray
    F: np.ndarray
    encoder_cache: EncoderCache
    G: np.ndarray
    prediction_caches: list[GRUStepCache]
    prediction_rows: np.ndarray
    H: np.ndarray
    logprobs: np.ndarray
    lattice: Lattice


class TransducerNetwork:
    """Encoder, prediction and joint networks of one RNN-T model."""

    def __init__(self, params: TransducerParams) -> None:
        """
        Args:
            params (TransducerParams): Model parameters.
        """
        self.params = params
        self.encoder = Encoder(params.encoder)
        self.prediction = PredictionNetwork(params.prediction)
        self.joint = JointNetwork(params.joint)

    @property
    def output_vocab(self) -> int:
        return self.params.joint.W.shape[1] - 1

    def _check_targets(self, targets: np.ndarray) -> np.ndarray:
        targets = np.asarray(targets, dtype=np.int64).reshape(-1)
        if targets.size and (targets.min() < 1 or targets.max() > self.output_vocab):
            raise ContractViolation(
                f"Target labels must lie in [1, {self.output_vocab}], "
                f"got range [{targets.min()}, {targets.max()}]."
            )
        return targets

    def forward(self, tokens: np.ndarray, targets: np.ndarray) -> TransducerForward:
        """Run all three networks and build the (T, U) lattice.

        Raises:
            ContractViolation: If a token or target id is out of range.
        """
        targets = self._check_targets(targets)
        F, enc_cache = self.encoder.forward(tokens)
        G, pred_caches, rows = self.prediction.unroll(targets)
        H = np.tanh(F[:, None, :] + G[None, :, :])
        logprobs = log_softmax(H @ self.params.joint.W + self.params.joint.b, axis=-1)
        U = targets.size
        lattice = Lattice(
            label_logprob=logprobs[:, np.arange(U), targets],
            blank_logprob=logprobs[:, :, BLANK_ID],
        )
        return TransducerForward(
            targets=targets, F=F, encoder_cache=enc_cache, G=G,
            prediction_caches=pred_caches, prediction_rows=rows,
            H=H, logprobs=logprobs, lattice=lattice,
        )

    def backprop(self, tokens: np.ndarray, targets: np.ndarray, mode: LossMode) -> tuple[float, TransducerParams]:
        """Return the log-likelihood under ``mode`` and the NLL gradients.

        Raises:
            NoAdmissiblePathError: If the loss is -inf in this mode.
        """
        fwd = self.forward(tokens, targets)
        loss = LossSelector(fwd.lattice).select(mode)
        return loss.value(), self.backward(fwd, loss.gradients())

    def backprop_batch(
        self, inputs: list[tuple[np.ndarray, np.ndarray]], modes: list[LossMode], workers: int = 1
    ) -> list[tuple[float, TransducerParams]]:
        """Backprop a minibatch whose lattices are evaluated as one padded batch.

        Args:
            inputs (list[tuple[np.ndarray, np.ndarray]]): (tokens, targets) per example.
            modes (list[LossMode]): One loss mode per example.
            workers (int): Thread-pool size; results keep batch order.

        Raises:
            NoAdmissiblePathError: If any example's loss is -inf.
        """
        forwards = ordered_map(lambda pair: self.forward(*pair), inputs, workers)
        batch = LatticeBatch.stack([fwd.lattice for fwd in forwards])
        values = batch.losses(modes, workers)
        lat_grads = batch.gradients(modes, workers)
        grads = ordered_map(lambda i: self.backward(forwards[i], lat_grads[i]), range(len(forwards)), workers)
        return [(float(value), g) for value, g in zip(values, grads)]

    def backward(self, fwd: TransducerForward, lat_grads: LatticeGradients) -> TransducerParams:
        """Chain lattice-entry gradients through the joint, prediction and encoder."""
        grads = _tree.zeros_like(self.params)
        U = fwd.lattice.U
        dlogp = np.zeros_like(fwd.logprobs)
        dlogp[:, np.arange(U), fwd.targets] += lat_grads.d_label
        dlogp[:, :, BLANK_ID] += lat_grads.d_blank
        probs = np.exp(fwd.logprobs)
        dlogits = dlogp - probs * dlogp.sum(axis=-1, keepdims=True)

        grads.joint.W[...] += np.einsum("tud,tuv->dv", fwd.H, dlogits)
        grads.joint.b[...] += dlogits.sum(axis=(0, 1))
        dpre = (dlogits @ self.params.joint.W.T) * (1.0 - fwd.H * fwd.H)

        self.prediction.backward(dpre.sum(axis=0), fwd.prediction_caches, fwd.prediction_rows, grads.prediction)
        self.encoder.backward(dpre.sum(axis=1), fwd.encoder_cache, grads.encoder)
        return grads


class TransducerScorer(Scorer):
    """Beam-search scorer over a precomputed encoding.

    The state is the prediction network's hidden vector, which equals g.
    Blank leaves it unchanged.
    """

    def __init__(self, network: TransducerNetwork, tokens: np.ndarray) -> None:
        self.network = network
        self.F, _ = network.encoder.forward(tokens)

    @property
    def frames(self) -> int:
        return self.F.shape[0]

    def initial_state(self) -> np.ndarray:
        return self.network.prediction.initial()[1]

    def score(self, state: np.ndarray, t: int) -> np.ndarray:
        return self.network.joint.logits(self.F[t - 1], state)

    def advance(self, state: np.ndarray, label: int, t: int) -> np.ndarray:
        if label == BLANK_ID:
            return state
        return self.network.prediction.step(state, label)[1]
