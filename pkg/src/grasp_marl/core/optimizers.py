"""
Optimizers

First-order update rules over flat float64 parameter vectors. Every optimizer
descends: callers that ascend pass the negated direction.
"""

from abc import ABC, abstractmethod
from typing import Optional

import numpy as np

from ..utils.constants import ADAM_BETA1, ADAM_BETA2, ADAM_EPSILON, OPTIMIZER_ADAM, OPTIMIZER_PLAIN


class Optimizer(ABC):
    """Stateful update rule ``params <- step(params, gradient)``."""

    def __init__(self, learning_rate: float):
        if learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        self.learning_rate = float(learning_rate)

    @abstractmethod
    def step(self, params: np.ndarray, gradient: np.ndarray) -> np.ndarray:
        """Return updated parameters; ``params`` is not modified."""

    def reset(self):
        """Forget accumulated state."""


class PlainOptimizer(Optimizer):
    """``params - lr * gradient``."""

    def step(self, params: np.ndarray, gradient: np.ndarray) -> np.ndarray:
        return params - self.learning_rate * gradient


class AdamOptimizer(Optimizer):
    """Adam with bias-corrected first and second moments."""

    def __init__(self, learning_rate: float, beta1: float = ADAM_BETA1,
                 beta2: float = ADAM_BETA2, eps: float = ADAM_EPSILON):
        super().__init__(learning_rate)
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self._m: Optional[np.ndarray] = None
        self._v: Optional[np.ndarray] = None
        self._t = 0

    def step(self, params: np.ndarray, gradient: np.ndarray) -> np.ndarray:
        if self._m is None or self._m.shape != gradient.shape:
            self._m = np.zeros_like(gradient)
            self._v = np.zeros_like(gradient)
            self._t = 0
        self._t += 1
        self._m = self.beta1 * self._m + (1.0 - self.beta1) * gradient
        self._v = self.beta2 * self._v + (1.0 - self.beta2) * gradient * gradient
        m_hat = self._m / (1.0 - self.beta1 ** self._t)
        v_hat = self._v / (1.0 - self.beta2 ** self._t)
        return params - self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)

    def reset(self):
        self._m = None
        self._v = None
        self._t = 0


def make_optimizer(name: str, learning_rate: float) -> Optimizer:
    """Build the optimizer named by a configuration value."""
    if name == OPTIMIZER_PLAIN:
        return PlainOptimizer(learning_rate)
    if name == OPTIMIZER_ADAM:
        return AdamOptimizer(learning_rate)
    raise ValueError(f"Unknown optimizer: {name}")
