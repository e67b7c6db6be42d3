"""Transcription network: token embeddings followed by stacked layers.

Two layer types are available. Windowed self-attention restricts every
position to the tokens at most ``window`` away, so after L layers f(t)
depends on tokens within L * window of t and nothing else. The BiGRU
layer sums a left-to-right and a right-to-left cell and sees the whole
sequence.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.special import softmax

from spantrellis.utils.errors import ContractViolation

from ._recurrent import GRUCell
from .main import AttentionLayerParams, BiGRULayerParams, EncoderParams


class LayerBase(ABC):
    """Define the interface shared by encoder layers."""

    @abstractmethod
    def forward(self, X: np.ndarray) -> tuple[np.ndarray, Any]:
        """Map (T, d) inputs to (T, d) outputs and a cache."""
        ...

    @abstractmethod
    def backward(self, dY: np.ndarray, cache: Any, grads: Any) -> np.ndarray:
        """Accumulate parameter gradients into ``grads``; return dX."""
        ...


@dataclass(frozen=True)
class _AttentionCache:
    X: np.ndarray
    Q: np.ndarray
    K: np.ndarray
    V: np.ndarray
    A: np.ndarray
    Z: np.ndarray
    H: np.ndarray


class WindowedAttentionLayer(LayerBase):
    """Y = X + tanh(softmax_w(Q K^T / sqrt(d)) V Wo + bo)."""

    def __init__(self, params: AttentionLayerParams, window: int) -> None:
        """
        Args:
            params (AttentionLayerParams): Projection weights.
            window (int): Positions i and j interact only when |i - j| <= window.
        """
        self.params = params
        self.window = window

    def _band(self, T: int) -> np.ndarray:
        idx = np.arange(T)
        return np.abs(idx[:, None] - idx[None, :]) <= self.window

    def forward(self, X: np.ndarray) -> tuple[np.ndarray, _AttentionCache]:
        p = self.params
        Q, K, V = X @ p.Wq, X @ p.Wk, X @ p.Wv
        scores = np.where(self._band(X.shape[0]), Q @ K.T / np.sqrt(Q.shape[1]), -np.inf)
        A = softmax(scores, axis=1)
        Z = A @ V
        H = np.tanh(Z @ p.Wo + p.bo)
        return X + H, _AttentionCache(X=X, Q=Q, K=K, V=V, A=A, Z=Z, H=H)

    def backward(self, dY: np.ndarray, cache: _AttentionCache, grads: AttentionLayerParams) -> np.ndarray:
        p = self.params
        scale = 1.0 / np.sqrt(cache.Q.shape[1])

        dpre = dY * (1.0 - cache.H * cache.H)
        grads.Wo[...] += cache.Z.T @ dpre
        grads.bo[...] += dpre.sum(axis=0)
        dZ = dpre @ p.Wo.T

        dA = dZ @ cache.V.T
        dV = cache.A.T @ dZ
        # Out-of-band entries have A == 0 and receive no gradient.
        dS = cache.A * (dA - np.sum(dA * cache.A, axis=1, keepdims=True)) * scale
        dQ = dS @ cache.K
        dK = dS.T @ cache.Q

        grads.Wq[...] += cache.X.T @ dQ
        grads.Wk[...] += cache.X.T @ dK
        grads.Wv[...] += cache.X.T @ dV
        return dY + dQ @ p.Wq.T + dK @ p.Wk.T + dV @ p.Wv.T


class BiGRULayer(LayerBase):
    """Sum of a forward and a time-reversed GRU pass, zero initial states."""

    def __init__(self, params: BiGRULayerParams) -> None:
        self.params = params
        self.fwd = GRUCell(params.forward)
        self.bwd = GRUCell(params.backward)

    def forward(self, X: np.ndarray) -> tuple[np.ndarray, tuple]:
        d = self.params.forward.Uz.shape[0]
        hf, cf = self.fwd.run(X, np.zeros(d))
        hb, cb = self.bwd.run(X[::-1], np.zeros(d))
        return hf + hb[::-1], (cf, cb)

    def backward(self, dY: np.ndarray, cache: tuple, grads: BiGRULayerParams) -> np.ndarray:
        cf, cb = cache
        dxf, _ = self.fwd.run_backward(dY, cf, grads.forward)
        dxb, _ = self.bwd.run_backward(dY[::-1], cb, grads.backward)
        return dxf + dxb[::-1]


class LayerSelector:
    """Select the layer implementation for an encoder's kind."""

    def __init__(self, params: EncoderParams) -> None:
        self.params = params

    def select(self, index: int) -> LayerBase:
        """Return layer ``index`` of the encoder.

        Raises:
            ValueError: If the encoder kind is unknown.
        """
        layer = self.params.layers[index]
        if self.params.kind == "attention":
            return WindowedAttentionLayer(layer, self.params.window)
        if self.params.kind == "bigru":
            return BiGRULayer(layer)
        raise ValueError(f"Invalid encoder kind: {self.params.kind}. Must be 'attention' or 'bigru'.")


@dataclass(frozen=True)
class EncoderCache:
    tokens: np.ndarray
    layer_caches: tuple


class Encoder:
    """Embed input tokens and run the layer stack."""

    def __init__(self, params: EncoderParams) -> None:
        """
        Args:
            params (EncoderParams): Embedding table and layer weights.
        """
        self.params = params
        selector = LayerSelector(params)
        self.layers = [selector.select(i) for i in range(len(params.layers))]

    def _check_tokens(self, tokens: np.ndarray) -> np.ndarray:
        tokens = np.asarray(tokens, dtype=np.int64)
        vocab = self.params.embedding.shape[0]
        if tokens.ndim != 1 or tokens.size == 0:
            raise ContractViolation(f"Expected a non-empty 1-D token sequence, got shape {tokens.shape}.")
        if tokens.min() < 0 or tokens.max() >= vocab:
            raise ContractViolation(f"Token ids must lie in [0, {vocab}), got range [{tokens.min()}, {tokens.max()}].")
        return tokens

    def forward(self, tokens: np.ndarray) -> tuple[np.ndarray, EncoderCache]:
        """Return F of shape (T, d) and the cache for ``backward``.

        Raises:
            ContractViolation: If a token id is out of range.
        """
        tokens = self._check_tokens(tokens)
        X = self.params.embedding[tokens]
        caches = []
        for layer in self.layers:
            X, cache = layer.forward(X)
            caches.append(cache)
        return X, EncoderCache(tokens=tokens, layer_caches=tuple(caches))

    def backward(self, dF: np.ndarray, cache: EncoderCache, grads: EncoderParams) -> None:
        dX = dF
        for i in range(len(self.layers) - 1, -1, -1):
            dX = self.layers[i].backward(dX, cache.layer_caches[i], grads.layers[i])
        np.add.at(grads.embedding, cache.tokens, dX)
