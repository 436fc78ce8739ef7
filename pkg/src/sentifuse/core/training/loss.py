import math

from sentifuse.core.autodiff import Tensor, cross_entropy


def variational_loss(logits: Tensor, label: int, kld: Tensor, beta: float) -> Tensor:
    """Cross-entropy of softmax(logits) against `label` plus beta * kld."""
    return cross_entropy(logits, int(label)) + kld * beta


def kld_weight_at(step: int, total_steps: int, kld_weight: float, warmup_fraction: float) -> float:
    """
    Linear warm-up from 0 at step 0 to `kld_weight` after
    `warmup_fraction` of all steps.
    """
    warmup_steps = max(1, math.ceil(warmup_fraction * total_steps))
    return kld_weight * min(1.0, step / warmup_steps)
