"""SGD and Adam with per-parameter moment buffers keyed by name."""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .tensor import Parameter


class Optimizer:
    """Base update rule.  ``step`` consumes and zeroes the gradients."""

    def __init__(self, lr: float):
        if lr <= 0:
            raise ConfigError(f"learning rate must be positive, got {lr}")
        self.lr = float(lr)
        self.step_count = 0

    def step(self, params: list[Parameter]) -> None:
        self.step_count += 1
        for p in params:
            g = p.grad if p.grad is not None else np.zeros_like(p.data)
            self._update(p, g)
            p.zero_grad()

    def _update(self, p: Parameter, g: np.ndarray) -> None:
        raise NotImplementedError


class Sgd(Optimizer):
    def _update(self, p, g):
        p.data -= self.lr * g


class Adam(Optimizer):
    """Adam with bias correction (betas 0.9/0.999, eps 1e-8)."""

    def __init__(self, lr: float, beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8):
        super().__init__(lr)
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self._m: dict[str, np.ndarray] = {}
        self._v: dict[str, np.ndarray] = {}

    def _update(self, p, g):
        m = self._m.setdefault(p.name, np.zeros_like(p.data))
        v = self._v.setdefault(p.name, np.zeros_like(p.data))
        m *= self.beta1
        m += (1.0 - self.beta1) * g
        v *= self.beta2
        v += (1.0 - self.beta2) * g * g
        m_hat = m / (1.0 - self.beta1 ** self.step_count)
        v_hat = v / (1.0 - self.beta2 ** self.step_count)
        p.data -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def make_optimizer(algorithm: str, lr: float) -> Optimizer:
    if algorithm == "sgd":
        return Sgd(lr)
    if algorithm == "adam":
        return Adam(lr)
    raise ConfigError(f"unknown optimizer {algorithm!r}")
