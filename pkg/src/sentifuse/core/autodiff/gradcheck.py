from typing import Callable, Sequence

import numpy as np

from sentifuse.core.autodiff.tensor import Tensor, backward
from sentifuse.errors import ContractError


def _relative_error(numeric: float, analytic: float) -> float:
    return abs(numeric - analytic) / max(1.0, abs(analytic))


def _central_difference(f: Callable[[], Tensor], x: Tensor, flat_index: int, h: float) -> float:
    original = x.data.flat[flat_index]
    try:
        x.data.flat[flat_index] = original + h
        upper = f().item()
        x.data.flat[flat_index] = original - h
        lower = f().item()
    finally:
        x.data.flat[flat_index] = original
    return (upper - lower) / (2.0 * h)


def finite_difference_check(
    f: Callable[[Tensor], Tensor],
    x: Tensor,
    h: float = 1e-5,
    indices: Sequence[int] | None = None,
) -> float:
    """
    Compares backward() gradients of the scalar function `f` at `x` with
    central differences and returns the largest |numeric - analytic| /
    max(1, |analytic|). `x.data` is perturbed in place and restored.
    """
    if not 1e-6 <= h <= 1e-4:
        raise ContractError(f"finite difference step must lie in [1e-6, 1e-4], got {h}")

    was_tracked = x.requires_grad
    x.requires_grad = True
    x.grad = None
    try:
        out = f(x)
        if out.size != 1:
            raise ContractError(f"finite_difference_check needs a scalar function, got shape {out.shape}")
        analytic = np.zeros_like(x.data)
        if out.requires_grad:
            backward(out)
            if x.grad is not None:
                analytic = x.grad.copy()

        positions = range(x.size) if indices is None else indices
        worst = 0.0
        for flat_index in positions:
            numeric = _central_difference(lambda: f(x), x, flat_index, h)
            worst = max(worst, _relative_error(numeric, analytic.flat[flat_index]))
        return worst
    finally:
        x.requires_grad = was_tracked
        x.grad = None


def parameter_subset_check(
    loss_fn: Callable[[], Tensor],
    parameters: Sequence[Tensor],
    count: int = 32,
    h: float = 1e-5,
    seed: int = 0,
) -> float:
    """
    Runs the finite-difference comparison on `count` scalar entries drawn at
    random (without replacement) from all of `parameters`.
    """
    for parameter in parameters:
        parameter.grad = None
    backward(loss_fn())
    analytic = [
        p.grad.copy() if p.grad is not None else np.zeros_like(p.data) for p in parameters
    ]

    sizes = np.array([p.size for p in parameters])
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    rng = np.random.default_rng(seed)
    picks = rng.choice(offsets[-1], size=min(count, int(offsets[-1])), replace=False)

    worst = 0.0
    for pick in np.sort(picks):
        which = int(np.searchsorted(offsets, pick, side="right") - 1)
        flat_index = int(pick - offsets[which])
        numeric = _central_difference(loss_fn, parameters[which], flat_index, h)
        worst = max(worst, _relative_error(numeric, analytic[which].flat[flat_index]))

    for parameter in parameters:
        parameter.grad = None
    return worst
