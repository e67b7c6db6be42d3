"""Gated recurrent cell with a hand-derived backward pass.

The same cell drives the prediction network, both directions of the
BiGRU encoder and the seq-to-seq decoder. Forward steps return a cache
that the backward step consumes; parameter gradients are accumulated in
place into a ``GRUParams`` of zero-initialized arrays.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .main import GRUParams


@dataclass(frozen=True)
class GRUStepCache:
    x: np.ndarray
    h: np.ndarray
    z: np.ndarray
    r: np.ndarray
    n: np.ndarray


class GRUCell:
    """h' = (1 - z) * h + z * tanh(x Wn + (r * h) Un + bn)."""

    def __init__(self, params: GRUParams) -> None:
        """
        Args:
            params (GRUParams): Cell weights.
        """
        self.params = params

    def step(self, x: np.ndarray, h: np.ndarray) -> tuple[np.ndarray, GRUStepCache]:
        p = self.params
        z = expit(x @ p.Wz + h @ p.Uz + p.bz)
        r = expit(x @ p.Wr + h @ p.Ur + p.br)
        n = np.tanh(x @ p.Wn + (r * h) @ p.Un + p.bn)
        h_new = (1.0 - z) * h + z * n
        return h_new, GRUStepCache(x=x, h=h, z=z, r=r, n=n)

    def step_backward(
        self, dh_new: np.ndarray, cache: GRUStepCache, grads: GRUParams
    ) -> tuple[np.ndarray, np.ndarray]:
        """Backpropagate one step.

        Args:
            dh_new (np.ndarray): Gradient w.r.t. the step output.
            cache (GRUStepCache): Values saved by ``step``.
            grads (GRUParams): Accumulator, updated in place.

        Returns:
            tuple[np.ndarray, np.ndarray]: Gradients w.r.t. x and h.
        """
        p = self.params
        x, h, z, r, n = cache.x, cache.h, cache.z, cache.r, cache.n

        dz = dh_new * (n - h)
        dh = dh_new * (1.0 - z)
        dan = dh_new * z * (1.0 - n * n)

        grads.Wn[...] += np.outer(x, dan)
        grads.Un[...] += np.outer(r * h, dan)
        grads.bn[...] += dan
        drh = dan @ p.Un.T
        dr = drh * h
        dh += drh * r
        dx = dan @ p.Wn.T

        daz = dz * z * (1.0 - z)
        grads.Wz[...] += np.outer(x, daz)
        grads.Uz[...] += np.outer(h, daz)
        grads.bz[...] += daz
        dx += daz @ p.Wz.T
        dh += daz @ p.Uz.T

        dar = dr * r * (1.0 - r)
        grads.Wr[...] += np.outer(x, dar)
        grads.Ur[...] += np.outer(h, dar)
        grads.br[...] += dar
        dx += dar @ p.Wr.T
        dh += dar @ p.Ur.T
        return dx, dh

    def run(self, xs: np.ndarray, h0: np.ndarray) -> tuple[np.ndarray, list[GRUStepCache]]:
        """Unroll over the rows of ``xs``; returns all hidden states."""
        hs = np.empty((xs.shape[0], h0.shape[0]))
        caches: list[GRUStepCache] = []
        h = h0
        for k, x in enumerate(xs):
            h, cache = self.step(x, h)
            hs[k] = h
            caches.append(cache)
        return hs, caches

    def run_backward(
        self, dhs: np.ndarray, caches: list[GRUStepCache], grads: GRUParams
    ) -> tuple[np.ndarray, np.ndarray]:
        """Backpropagate through ``run``; returns (d xs, d h0)."""
        dxs = np.empty((len(caches), caches[0].x.shape[0])) if caches else np.empty((0, 0))
        dh = np.zeros_like(dhs[0]) if len(dhs) else np.zeros(0)
        for k in range(len(caches) - 1, -1, -1):
            dxs[k], dh = self.step_backward(dhs[k] + dh, caches[k], grads)
        return dxs, dh
