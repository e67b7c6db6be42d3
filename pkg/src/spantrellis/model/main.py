"""Expose the desk-scale networks and their gradients.

Both architectures share the encoder. The RNN-T combines it with a
prediction and joint network and trains through the alignment lattice;
the seq-to-seq variant decodes with hard monotonic attention and trains
on a single fixed alignment.
"""

from pathlib import Path

import numpy as np

from spantrellis.decoder.core.main import Scorer
from spantrellis.lattice.core._loss import Constrained, Fixed, LossMode, Unconstrained
from spantrellis.lattice.core.main import AlignmentPath, Lattice
from spantrellis.utils.errors import ContractViolation
from spantrellis.utils.parallel import ordered_map

from .core import _tree
from .core._checkpoint import CheckpointReader, CheckpointWriter
from .core._encoder import Encoder
from .core._init import ParamInitializer
from .core._optim import Adam
from .core._seq2seq import HardAttentionDecoder, Seq2SeqNetwork, Seq2SeqScorer, Seq2SeqState
from .core._transducer import JointNetwork, PredictionNetwork, TransducerNetwork, TransducerScorer
from .core.main import (
    BLANK_ID,
    EOW_ID,
    AttentionLayerParams,
    BiGRULayerParams,
    EncoderParams,
    GRUParams,
    JointParams,
    ModelConfig,
    ModelParams,
    OptimizerConfig,
    PredictionParams,
    Seq2SeqHardAttnParams,
    Seq2SeqParams,
    TransducerParams,
)

__all__ = [
    "BLANK_ID",
    "EOW_ID",
    "Adam",
    "AttentionLayerParams",
    "BiGRULayerParams",
    "EncoderParams",
    "GRUParams",
    "JointParams",
    "ModelConfig",
    "ModelParams",
    "OptimizerConfig",
    "PredictionParams",
    "Seq2SeqHardAttnParams",
    "Seq2SeqParams",
    "Seq2SeqState",
    "TransducerParams",
    "backprop",
    "backprop_batch",
    "build_lattice",
    "encode",
    "init_params",
    "joint_logits",
    "load_checkpoint",
    "make_scorer",
    "path_lattice",
    "predict_step",
    "save_checkpoint",
    "seq2seq_hard_attn_logits",
    "start_state",
    "tree",
]

tree = _tree


def init_params(config: ModelConfig, rng: np.random.Generator | None = None) -> ModelParams:
    """Draw uniform(-init_scale, init_scale) parameters for ``config``."""
    return ParamInitializer(config, rng).build()


def encode(tokens: np.ndarray, params: EncoderParams) -> np.ndarray:
    """Map T input tokens to T frame vectors of size d.

    Raises:
        ContractViolation: If an id is outside [0, V_in).
    """
    return Encoder(params).forward(tokens)[0]


def start_state(params: PredictionParams) -> tuple[np.ndarray, np.ndarray]:
    """Return (g(0), state) from the initial state and the start token."""
    return PredictionNetwork(params).initial()


def predict_step(state: np.ndarray, label_id: int, params: PredictionParams) -> tuple[np.ndarray, np.ndarray]:
    """Feed one real label to the prediction network.

    Returns:
        tuple[np.ndarray, np.ndarray]: (g, new_state).

    Raises:
        ContractViolation: If ``label_id`` is blank or out of range.
    """
    if label_id == BLANK_ID:
        raise ContractViolation("Blank is never fed to the prediction network.")
    g, new_state, _ = PredictionNetwork(params).step(state, label_id)
    return g, new_state


def joint_logits(f_t: np.ndarray, g_u: np.ndarray, params: JointParams) -> np.ndarray:
    """log_softmax(tanh(f_t + g_u) W + b) over V_out+1 outputs."""
    return JointNetwork(params).logits(f_t, g_u)


def seq2seq_hard_attn_logits(
    emb_u: np.ndarray, enc_t: np.ndarray, state: np.ndarray, params: Seq2SeqHardAttnParams
) -> tuple[np.ndarray, np.ndarray]:
    """One hard-attention decoder step; returns (log-distribution, new_state)."""
    logprobs, h, _ = HardAttentionDecoder(params).step(emb_u, enc_t, state)
    return logprobs, h


def build_lattice(tokens: np.ndarray, targets: np.ndarray, params: TransducerParams) -> Lattice:
    """Fill a (T, U) lattice from the joint network.

    Raises:
        ContractViolation: If a target is blank or out of range.
    """
    return TransducerNetwork(params).forward(tokens, targets).lattice


def path_lattice(tokens: np.ndarray, targets: np.ndarray, path: AlignmentPath, params: Seq2SeqParams) -> Lattice:
    """Lattice of the seq-to-seq step log-probabilities along ``path``."""
    return Seq2SeqNetwork(params).path_lattice(tokens, targets, path)


def backprop(
    tokens: np.ndarray,
    targets: np.ndarray,
    mode: LossMode | AlignmentPath,
    params: ModelParams,
) -> tuple[float, ModelParams]:
    """Return the log-likelihood and the gradients of its negation.

    Args:
        tokens (np.ndarray): Input ids.
        targets (np.ndarray): Real output labels.
        mode (LossMode | AlignmentPath): Loss mode; a bare path means
            ``Fixed(path)``.
        params (ModelParams): RNN-T or seq-to-seq parameters.

    Raises:
        NoAdmissiblePathError: If the loss is -inf.
        ContractViolation: If the seq-to-seq model is given a mode other
            than a fixed path.
    """
    if isinstance(mode, AlignmentPath):
        mode = Fixed(mode)
    if isinstance(params, Seq2SeqParams):
        if not isinstance(mode, Fixed):
            raise ContractViolation(
                f"The seq2seq model trains on a fixed alignment only, got {type(mode).__name__}."
            )
        return Seq2SeqNetwork(params).backprop(tokens, targets, mode.path)
    if not isinstance(mode, (Unconstrained, Fixed, Constrained)):
        raise ContractViolation(f"Unsupported loss mode: {mode!r}.")
    return TransducerNetwork(params).backprop(tokens, targets, mode)


def backprop_batch(
    inputs: list[tuple[np.ndarray, np.ndarray]],
    modes: list[LossMode | AlignmentPath],
    params: ModelParams,
    workers: int = 1,
) -> list[tuple[float, ModelParams]]:
    """Per-example log-likelihoods and gradients of a minibatch, in input order.

    RNN-T lattices are stacked into one padded ``LatticeBatch``; the
    seq-to-seq model backprops each example on its own.

    Raises:
        NoAdmissiblePathError: If any example's loss is -inf.
        ContractViolation: On a mode the architecture does not support, or
            if ``modes`` and ``inputs`` differ in length.
    """
    if len(modes) != len(inputs):
        raise ContractViolation(f"Got {len(modes)} loss modes for {len(inputs)} examples.")
    modes = [Fixed(mode) if isinstance(mode, AlignmentPath) else mode for mode in modes]
    if isinstance(params, Seq2SeqParams) or not inputs:
        return ordered_map(
            lambda i: backprop(inputs[i][0], inputs[i][1], modes[i], params), range(len(inputs)), workers
        )
    for mode in modes:
        if not isinstance(mode, (Unconstrained, Fixed, Constrained)):
            raise ContractViolation(f"Unsupported loss mode: {mode!r}.")
    return TransducerNetwork(params).backprop_batch(inputs, modes, workers)


def make_scorer(tokens: np.ndarray, params: ModelParams) -> Scorer:
    """Beam-search scorer for either architecture over one input sequence."""
    if isinstance(params, Seq2SeqParams):
        return Seq2SeqScorer(Seq2SeqNetwork(params), tokens)
    return TransducerScorer(TransducerNetwork(params), tokens)


def save_checkpoint(path: str | Path, config: ModelConfig, params: ModelParams) -> Path:
    return CheckpointWriter(path).write(config, params)


def load_checkpoint(path: str | Path) -> tuple[ModelConfig, ModelParams]:
    """
    Raises:
        ContractViolation: If the file is not a readable checkpoint.
    """
    return CheckpointReader(path).read()
