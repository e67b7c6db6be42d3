"""Parameter containers and model configuration.

Output ids: 0 is blank (``eow`` for the seq-to-seq variant), real labels
are 1..V_out. The prediction network embeds label ``k`` at row ``k - 1``
and the start token ``V_out + 1`` at the last row; blank has no row.
"""

from dataclasses import dataclass
from typing import Literal

import numpy as np

from spantrellis.utils.errors import ConfigError

type Architecture = Literal["transducer", "seq2seq"]
type EncoderKind = Literal["attention", "bigru"]

BLANK_ID = 0
EOW_ID = 0


@dataclass(frozen=True)
class ModelConfig:
    """Architecture and size of a model.

    Attributes:
        input_vocab (int): Number of input token ids (V_in).
        output_vocab (int): Number of real output labels (V_out).
        architecture (Architecture): RNN-T or seq-to-seq with hard attention.
        encoder (EncoderKind): Windowed self-attention or bidirectional GRU.
        hidden (int): Hidden size d shared by all networks.
        embedding (int): Label embedding size of the seq-to-seq decoder.
        layers (int): Encoder depth.
        window (int): Attention half-width per layer, in tokens.
        seed (int): Initialization seed.
        init_scale (float): Weights start uniform in (-init_scale, init_scale).
    """

    input_vocab: int
    output_vocab: int
    architecture: Architecture = "transducer"
    encoder: EncoderKind = "attention"
    hidden: int = 32
    embedding: int = 32
    layers: int = 2
    window: int = 20
    seed: int = 0
    init_scale: float = 0.1

    def __post_init__(self) -> None:
        if self.architecture not in ("transducer", "seq2seq"):
            raise ConfigError(
                f"Invalid architecture: {self.architecture}. "
                f"Must be 'transducer' or 'seq2seq'."
            )
        if self.encoder not in ("attention", "bigru"):
            raise ConfigError(f"Invalid encoder: {self.encoder}. Must be 'attention' or 'bigru'.")
        for name in ("input_vocab", "output_vocab", "hidden", "embedding", "layers"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.window < 0:
            raise ConfigError(f"window must be >= 0, got {self.window}")
        if self.init_scale <= 0:
            raise ConfigError(f"init_scale must be > 0, got {self.init_scale}")

    @property
    def start_id(self) -> int:
        """Id of the prediction network's start token."""
        return self.output_vocab + 1


@dataclass(frozen=True)
class OptimizerConfig:
    """Adam with global-norm gradient clipping."""

    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    clip: float = 5.0

    def __post_init__(self) -> None:
        if self.lr <= 0 or self.clip <= 0:
            raise ConfigError(f"lr and clip must be > 0, got lr={self.lr}, clip={self.clip}")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ConfigError(f"betas must lie in [0, 1), got {self.beta1}, {self.beta2}")


@dataclass(frozen=True)
class GRUParams:
    """Gated recurrent cell: update (z), reset (r) and candidate (n) gates."""

    Wz: np.ndarray
    Uz: np.ndarray
    bz: np.ndarray
    Wr: np.ndarray
    Ur: np.ndarray
    br: np.ndarray
    Wn: np.ndarray
    Un: np.ndarray
    bn: np.ndarray


@dataclass(frozen=True)
class AttentionLayerParams:
    """Single-head windowed self-attention with a residual tanh output."""

    Wq: np.ndarray
    Wk: np.ndarray
    Wv: np.ndarray
    Wo: np.ndarray
    bo: np.ndarray


@dataclass(frozen=True)
class BiGRULayerParams:
    """Forward and backward cells; their outputs are summed."""

    forward: GRUParams
    backward: GRUParams


@dataclass(frozen=True)
class EncoderParams:
    """Transcription network.

    Attributes:
        embedding (np.ndarray): Token embedding table, (V_in, d).
        layers (tuple): Attention or BiGRU layer parameters.
        kind (EncoderKind): Layer type.
        window (int): Attention half-width w.
    """

    embedding: np.ndarray
    layers: tuple[AttentionLayerParams, ...] | tuple[BiGRULayerParams, ...]
    kind: EncoderKind
    window: int


@dataclass(frozen=True)
class PredictionParams:
    """Prediction network: label embeddings, one GRU cell, initial state."""

    embedding: np.ndarray
    cell: GRUParams
    initial_state: np.ndarray


@dataclass(frozen=True)
class JointParams:
    """Joint network projection, W: (d, V_out+1), b: (V_out+1,)."""

    W: np.ndarray
    b: np.ndarray


@dataclass(frozen=True)
class Seq2SeqHardAttnParams:
    """Decoder of the seq-to-seq model with hard attention.

    Attributes:
        embedding (np.ndarray): (V_out+1, d_e); row 0 is ``eow``, which is
            also the first input.
        cell (GRUParams): Cell over concat(emb[u], enc[t]).
        W (np.ndarray): Output projection, (d, V_out+1).
        b (np.ndarray): Output bias.
        initial_state (np.ndarray): (d,).
    """

    embedding: np.ndarray
    cell: GRUParams
    W: np.ndarray
    b: np.ndarray
    initial_state: np.ndarray


@dataclass(frozen=True)
class TransducerParams:
    encoder: EncoderParams
    prediction: PredictionParams
    joint: JointParams


@dataclass(frozen=True)
class Seq2SeqParams:
    encoder: EncoderParams
    decoder: Seq2SeqHardAttnParams


type ModelParams = TransducerParams | Seq2SeqParams
