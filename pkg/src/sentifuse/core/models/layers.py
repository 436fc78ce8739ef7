from dataclasses import dataclass
from typing import Sequence

import numpy as np

from sentifuse.core.autodiff import Tensor, concat, conv1d, sigmoid, tanh
from sentifuse.core.models.module import Module, uniform
from sentifuse.errors import ConfigurationError

FORGET_BIAS = 1.0

LstmState = tuple[Tensor, Tensor]


class Dense(Module):
    def __init__(self, in_features: int, out_features: int, rng: np.random.Generator, bias: bool = True):
        self.weight = uniform(rng, (in_features, out_features), in_features)
        self.bias = uniform(rng, (1, out_features), in_features) if bias else None

    def __call__(self, x: Tensor) -> Tensor:
        out = x @ self.weight
        return out if self.bias is None else out + self.bias


class LSTMCell(Module):
    """Gates are laid out as [input | forget | output | candidate] columns."""

    def __init__(self, in_features: int, hidden_size: int, rng: np.random.Generator):
        self.hidden_size = hidden_size
        fan_in = in_features + hidden_size
        self.weight_input = uniform(rng, (in_features, 4 * hidden_size), fan_in)
        self.weight_hidden = uniform(rng, (hidden_size, 4 * hidden_size), fan_in)
        self.bias = uniform(rng, (1, 4 * hidden_size), fan_in)
        self.bias.data[:, hidden_size : 2 * hidden_size] = FORGET_BIAS

    def initial_state(self) -> LstmState:
        return Tensor(np.zeros((1, self.hidden_size))), Tensor(np.zeros((1, self.hidden_size)))

    def __call__(self, x: Tensor, state: LstmState) -> LstmState:
        h, c = state
        gates = x @ self.weight_input + h @ self.weight_hidden + self.bias
        size = self.hidden_size
        i = sigmoid(gates[:, 0:size])
        f = sigmoid(gates[:, size : 2 * size])
        o = sigmoid(gates[:, 2 * size : 3 * size])
        g = tanh(gates[:, 3 * size : 4 * size])
        c_next = f * c + i * g
        return o * tanh(c_next), c_next


class LSTM(Module):
    """Stacked LSTM over the rows of a [time x features] tensor."""

    def __init__(self, in_features: int, hidden_size: int, layers: int, rng: np.random.Generator):
        self.cells = [
            LSTMCell(in_features if layer == 0 else hidden_size, hidden_size, rng)
            for layer in range(layers)
        ]

    def __call__(
        self, sequence: Tensor, states: Sequence[LstmState] | None = None
    ) -> tuple[list[Tensor], list[LstmState]]:
        """Returns the top layer's hidden row per step and the final state per layer."""
        states = list(states) if states is not None else [cell.initial_state() for cell in self.cells]
        outputs: list[Tensor] = []
        for t in range(sequence.shape[0]):
            x = sequence[t : t + 1, :]
            for layer, cell in enumerate(self.cells):
                states[layer] = cell(x, states[layer])
                x = states[layer][0]
            outputs.append(x)
        return outputs, states


@dataclass(frozen=True)
class FeatureGroup:
    """Contiguous frame rows [start, stop) that share one kernel bank."""

    name: str
    start: int
    stop: int

    @property
    def size(self) -> int:
        return self.stop - self.start


def contiguous_groups(named_sizes: Sequence[tuple[str, int]], offset: int = 0) -> list[FeatureGroup]:
    groups = []
    for name, size in named_sizes:
        groups.append(FeatureGroup(name, offset, offset + size))
        offset += size
    return groups


class CdtConv(Module):
    """
    Cross-data-type 1-D convolution: one kernel bank per feature group,
    shared by the group's rows only, outputs stacked along the channel axis.
    Width is preserved ("same" padding, odd kernel widths).

    With `grouped=False` a single bank spans every feature and has as many
    output channels as the grouped layer.
    """

    def __init__(
        self,
        groups: Sequence[FeatureGroup],
        channels: int,
        width: int,
        rng: np.random.Generator,
        grouped: bool = True,
    ):
        if width % 2 == 0:
            raise ConfigurationError(f"convolution width must be odd to preserve length, got {width}")
        self.features = sum(group.size for group in groups)
        if not grouped:
            channels = channels * len(groups)
            groups = [FeatureGroup("all", 0, self.features)]
        self.groups = list(groups)
        self.width = width
        self.kernels = [
            uniform(rng, (channels, group.size, width), group.size * width) for group in self.groups
        ]
        self.biases = [uniform(rng, (channels, 1), group.size * width) for group in self.groups]

    @property
    def out_channels(self) -> int:
        return sum(kernel.shape[0] for kernel in self.kernels)

    def __call__(self, frame: Tensor) -> Tensor:
        if frame.shape[0] != self.features:
            raise ConfigurationError(
                f"Frame has {frame.shape[0]} feature rows, the grouping "
                f"{[(group.name, group.size) for group in self.groups]} declares {self.features}"
            )
        outputs = [
            conv1d(frame[group.start : group.stop, :], kernel, padding=self.width // 2) + bias
            for group, kernel, bias in zip(self.groups, self.kernels, self.biases)
        ]
        return concat(outputs, axis=0)
