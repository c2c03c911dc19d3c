from typing import Dict

import numpy as np

from src.config.run_config import RunConfig
from src.errors import NumericalError
from src.pipeline.params import ModelParams


class AdamW:
    """
    Adam with decoupled weight decay, updating a ModelParams in place.

    Weight decay applies to every tensor: p <- p - lr * wd * p before the
    Adam step.

    Attributes:
        lr (float): Learning rate.
        beta1, beta2 (float): Moment decay rates.
        eps (float): Denominator guard.
        weight_decay (float): Decoupled decay coefficient.
        step_count (int): Steps taken.
    """
    def __init__(self, params: ModelParams, lr: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8, weight_decay: float = 1e-4):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.weight_decay = weight_decay
        self.step_count = 0
        self.m: Dict[str, np.ndarray] = params.zeros_like()
        self.v: Dict[str, np.ndarray] = params.zeros_like()

    @classmethod
    def from_config(cls, params: ModelParams, config: RunConfig) -> "AdamW":
        return cls(params, lr=config.lr, beta1=config.beta1, beta2=config.beta2,
                   eps=config.eps, weight_decay=config.weight_decay)

    def step(self, grads: Dict[str, np.ndarray]) -> None:
        """
        Applies one update.

        Raises:
            NumericalError: If a gradient is not finite.
        """
        self.step_count += 1
        bias1 = 1.0 - self.beta1 ** self.step_count
        bias2 = 1.0 - self.beta2 ** self.step_count
        for name, p in self.params.items():
            g = grads[name]
            if not np.all(np.isfinite(g)):
                raise NumericalError(f"non-finite gradient for '{name}'")
            self.m[name] = self.beta1 * self.m[name] + (1.0 - self.beta1) * g
            self.v[name] = self.beta2 * self.v[name] + (1.0 - self.beta2) * g * g
            p *= 1.0 - self.lr * self.weight_decay
            p -= self.lr * (self.m[name] / bias1) / (np.sqrt(self.v[name] / bias2) + self.eps)
