from typing import Sequence

import numpy as np

from sentifuse.core.autodiff import Tensor, concat, conv1d, sigmoid, tanh
from sentifuse.core.models.layers import FORGET_BIAS, LstmState
from sentifuse.core.models.module import Module, uniform
from sentifuse.errors import DimensionError


class ConvLSTMCell(Module):
    """
    LSTM whose input-to-state and state-to-state maps are 1-D convolutions
    over a window of intervals. Input is [channels x window], state planes
    are [hidden x window]; one kernel bank computes all four gates.
    """

    def __init__(self, in_channels: int, hidden_size: int, width: int, rng: np.random.Generator):
        self.in_channels = in_channels
        self.hidden_size = hidden_size
        self.width = width
        fan_in = (in_channels + hidden_size) * width
        self.kernel = uniform(rng, (4 * hidden_size, in_channels + hidden_size, width), fan_in)
        self.bias = uniform(rng, (4 * hidden_size, 1), fan_in)
        self.bias.data[hidden_size : 2 * hidden_size] = FORGET_BIAS

    def initial_state(self, window: int) -> LstmState:
        shape = (self.hidden_size, window)
        return Tensor(np.zeros(shape)), Tensor(np.zeros(shape))

    def __call__(self, x: Tensor, state: LstmState) -> LstmState:
        h, c = state
        if x.shape[0] != self.in_channels or h.shape != (self.hidden_size, x.shape[1]):
            raise DimensionError(
                f"convlstm_step: input {x.shape} and state {h.shape} do not fit a cell with "
                f"{self.in_channels} input channels and hidden size {self.hidden_size}"
            )
        gates = conv1d(concat([x, h], axis=0), self.kernel, padding=self.width // 2) + self.bias
        size = self.hidden_size
        i = sigmoid(gates[0:size, :])
        f = sigmoid(gates[size : 2 * size, :])
        o = sigmoid(gates[2 * size : 3 * size, :])
        g = tanh(gates[3 * size : 4 * size, :])
        c_next = f * c + i * g
        return o * tanh(c_next), c_next


class ConvLSTM(Module):
    """
    Stacked ConvLSTM reading a [channels x intervals] map one interval at a
    time. Step t sees the trailing `window` intervals ending at t, zero
    padded on the left; its summary is the window mean of the top hidden
    plane.
    """

    def __init__(
        self, in_channels: int, hidden_size: int, layers: int, width: int, window: int, rng: np.random.Generator
    ):
        self.window = window
        self.cells = [
            ConvLSTMCell(in_channels if layer == 0 else hidden_size, hidden_size, width, rng)
            for layer in range(layers)
        ]

    def initial_states(self) -> list[LstmState]:
        return [cell.initial_state(self.window) for cell in self.cells]

    def __call__(
        self, features: Tensor, states: Sequence[LstmState] | None = None
    ) -> tuple[Tensor, list[LstmState]]:
        """Returns per-step summaries [intervals x hidden] and the final state per layer."""
        states = list(states) if states is not None else self.initial_states()
        channels, intervals = features.shape
        padded = concat([Tensor(np.zeros((channels, self.window - 1))), features], axis=1)

        summaries: list[Tensor] = []
        for t in range(intervals):
            x = padded[:, t : t + self.window]
            for layer, cell in enumerate(self.cells):
                states[layer] = cell(x, states[layer])
                x = states[layer][0]
            summaries.append(x.mean(axis=1).reshape(1, -1))
        return concat(summaries, axis=0), states
