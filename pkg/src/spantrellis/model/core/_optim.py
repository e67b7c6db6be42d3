"""Adam over parameter trees with global-norm gradient clipping."""

import math
from typing import Any

import numpy as np

from . import _tree
from .main import OptimizerConfig


class Adam:
    """Stateful Adam; ``step`` returns a new parameter tree."""

    def __init__(self, params: Any, config: OptimizerConfig) -> None:
        """
        Args:
            params (Any): Parameter tree the moments are shaped after.
            config (OptimizerConfig): Learning rate, betas, eps and clip norm.
        """
        self.config = config
        self.m = _tree.zeros_like(params)
        self.v = _tree.zeros_like(params)
        self.steps = 0

    def clip(self, grads: Any) -> tuple[Any, float]:
        """Scale ``grads`` down to ``config.clip`` global norm; returns the raw norm."""
        norm = _tree.global_norm(grads)
        if norm > self.config.clip:
            grads = _tree.scale(grads, self.config.clip / norm)
        return grads, norm

    def step(self, params: Any, grads: Any) -> Any:
        c = self.config
        self.steps += 1
        self.m = _tree.map_arrays(lambda m, g: c.beta1 * m + (1 - c.beta1) * g, self.m, grads)
        self.v = _tree.map_arrays(lambda v, g: c.beta2 * v + (1 - c.beta2) * g * g, self.v, grads)
        lr = c.lr * math.sqrt(1 - c.beta2**self.steps) / (1 - c.beta1**self.steps)
        return _tree.map_arrays(lambda p, m, v: p - lr * m / (np.sqrt(v) + c.eps), params, self.m, self.v)
