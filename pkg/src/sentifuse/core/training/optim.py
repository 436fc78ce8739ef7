from typing import Sequence

import numpy as np

from sentifuse.core.autodiff import Tensor


def global_norm(parameters: Sequence[Tensor]) -> float:
    return float(
        np.sqrt(sum(float(np.sum(p.grad * p.grad)) for p in parameters if p.grad is not None))
    )


def clip_grad_norm(parameters: Sequence[Tensor], max_norm: float) -> float:
    """Rescales gradients in place so their global norm is at most `max_norm`; returns the norm before clipping."""
    norm = global_norm(parameters)
    if norm > max_norm:
        scale = max_norm / norm
        for p in parameters:
            if p.grad is not None:
                p.grad = p.grad * scale
    return norm


class Adam:
    def __init__(
        self,
        parameters: Sequence[Tensor],
        lr: float = 1e-3,
        betas: tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-8,
    ):
        self.parameters = list(parameters)
        self.lr = lr
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.steps = 0
        self.m = [np.zeros_like(p.data) for p in self.parameters]
        self.v = [np.zeros_like(p.data) for p in self.parameters]

    def zero_grad(self) -> None:
        for p in self.parameters:
            p.zero_grad()

    def step(self) -> None:
        self.steps += 1
        correction1 = 1.0 - self.beta1**self.steps
        correction2 = 1.0 - self.beta2**self.steps
        for p, m, v in zip(self.parameters, self.m, self.v):
            if p.grad is None:
                continue
            m *= self.beta1
            m += (1.0 - self.beta1) * p.grad
            v *= self.beta2
            v += (1.0 - self.beta2) * p.grad * p.grad
            p.data -= self.lr * (m / correction1) / (np.sqrt(v / correction2) + self.eps)
