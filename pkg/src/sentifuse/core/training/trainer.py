import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from sentifuse.core.autodiff import Graph, backward
from sentifuse.core.data.records import AlignedSample
from sentifuse.core.models import Model
from sentifuse.core.training.loss import kld_weight_at, variational_loss
from sentifuse.core.training.metrics import accuracy, softmax_rows
from sentifuse.core.training.optim import Adam, clip_grad_norm
from sentifuse.errors import ConfigurationError, ContractError, NumericalError

logger = logging.getLogger(__name__)

SamplePair = tuple[AlignedSample, AlignedSample]


@dataclass
class TrainConfig:
    epochs: int = 10
    batch_size: int = 16
    learning_rate: float = 1e-3
    kld_warmup_fraction: float = 0.1
    clip_norm: float = 5.0
    train_months: int = 12
    test_months: int = 2
    step_months: int = 2
    warm_start: bool = False
    stop_at_perfect: bool = False
    seed: int = 0

    def validate(self) -> None:
        positive = {
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "clip_norm": self.clip_norm,
            "train_months": self.train_months,
            "test_months": self.test_months,
            "step_months": self.step_months,
        }
        for name, value in positive.items():
            if value <= 0:
                raise ConfigurationError(f"{name} must be positive, got {value}")
        if self.learning_rate < 0:
            raise ConfigurationError(f"learning_rate must be non-negative, got {self.learning_rate}")
        if not 0.0 <= self.kld_warmup_fraction <= 1.0:
            raise ConfigurationError(
                f"kld_warmup_fraction must lie in [0, 1], got {self.kld_warmup_fraction}"
            )


@dataclass
class TrainResult:
    losses: list[float] = field(default_factory=list)
    train_accuracy: float = float("nan")
    steps: int = 0


def consecutive_pairs(samples: Sequence[AlignedSample]) -> list[SamplePair]:
    """(previous day, current day) for every sample that has a predecessor."""
    return [(samples[i - 1], samples[i]) for i in range(1, len(samples))]


def predict(model: Model, pairs: Sequence[SamplePair]) -> np.ndarray:
    """Eval-mode softmax scores, one row per pair."""
    if not pairs:
        return np.zeros((0, model.config.classes))
    logits = [model.forward(sample, prev, mode="eval").logits.numpy() for prev, sample in pairs]
    return softmax_rows(np.vstack([row.reshape(1, -1) for row in logits]))


def _raise_non_finite(loss, pair_timestamp: int) -> None:
    culprit = Graph.trace(loss).first_non_finite()
    op = culprit.op if culprit is not None else "unknown"
    raise NumericalError(
        f"Loss became non-finite on the sample at {pair_timestamp}; first produced by op '{op}'"
    )


def train_fold(
    model: Model,
    pairs: Sequence[SamplePair],
    config: TrainConfig,
    seed: int | None = None,
) -> TrainResult:
    """
    Mini-batch Adam on the summed per-sample losses of each batch, averaged
    over the batch, with global-norm clipping. The divergence weight ramps
    linearly from 0 over the first `kld_warmup_fraction` of all steps.
    """
    if len(pairs) < 2:
        raise ContractError(f"train_fold needs at least 2 samples, got {len(pairs)}")
    config.validate()

    rng = np.random.default_rng(config.seed if seed is None else seed)
    parameters = model.parameters()
    optimizer = Adam(parameters, lr=config.learning_rate)
    batches_per_epoch = -(-len(pairs) // config.batch_size)
    total_steps = config.epochs * batches_per_epoch
    kld_weight = model.config.kld_weight
    labels = [int(sample.label) for _, sample in pairs]

    result = TrainResult()
    for epoch in range(config.epochs):
        order = rng.permutation(len(pairs))
        epoch_loss = 0.0
        for start in range(0, len(pairs), config.batch_size):
            batch = order[start : start + config.batch_size]
            beta = kld_weight_at(result.steps, total_steps, kld_weight, config.kld_warmup_fraction)
            optimizer.zero_grad()
            for index in batch:
                prev, sample = pairs[index]
                out = model.forward(sample, prev, mode="train", rng=rng)
                loss = variational_loss(out.logits, sample.label, out.kld, beta) * (1.0 / len(batch))
                if not np.isfinite(loss.item()):
                    _raise_non_finite(loss, sample.timestamp)
                backward(loss)
                epoch_loss += loss.item() * len(batch)
            clip_grad_norm(parameters, config.clip_norm)
            optimizer.step()
            result.steps += 1

        result.losses.append(epoch_loss / len(pairs))
        logger.debug(f"epoch {epoch}: loss {result.losses[-1]:.6f}")

        if config.stop_at_perfect:
            result.train_accuracy = accuracy(predict(model, pairs), labels)
            if result.train_accuracy == 1.0:
                logger.debug(f"Reached perfect training accuracy after epoch {epoch}")
                break

    if not config.stop_at_perfect:
        result.train_accuracy = accuracy(predict(model, pairs), labels)
    return result
