import math

import numpy as np

from sentifuse.core.autodiff import Tensor, softmax, tanh
from sentifuse.core.models.layers import Dense
from sentifuse.core.models.module import Module, uniform
from sentifuse.errors import DimensionError


class InterAttention(Module):
    """
    Additive attention of one decoder state over the encoder states:
    score_j = v . tanh(W1 enc_j + W2 dec).
    """

    def __init__(self, hidden_size: int, rng: np.random.Generator):
        self.encoder_map = Dense(hidden_size, hidden_size, rng, bias=False)
        self.decoder_map = Dense(hidden_size, hidden_size, rng, bias=True)
        self.score = uniform(rng, (hidden_size, 1), hidden_size)

    def __call__(self, encoder_states: Tensor, decoder_state: Tensor) -> tuple[Tensor, Tensor]:
        """Returns the [1 x hidden] context and the [steps x 1] attention weights."""
        if encoder_states.shape[0] < 1:
            raise DimensionError("inter_attention needs at least one encoder state")
        decoder_state = decoder_state.reshape(1, -1)
        scores = tanh(self.encoder_map(encoder_states) + self.decoder_map(decoder_state)) @ self.score
        weights = softmax(scores, axis=0)
        return weights.T @ encoder_states, weights


class SelfAttention(Module):
    """Single-head scaled dot-product attention with a residual connection."""

    def __init__(self, hidden_size: int, rng: np.random.Generator):
        self.hidden_size = hidden_size
        self.query = Dense(hidden_size, hidden_size, rng, bias=False)
        self.key = Dense(hidden_size, hidden_size, rng, bias=False)
        self.value = Dense(hidden_size, hidden_size, rng, bias=False)

    def __call__(self, states: Tensor) -> tuple[Tensor, Tensor]:
        """Returns states + A V and the [time x time] attention matrix A."""
        if states.shape[0] < 1:
            raise DimensionError("self_attention needs at least one step")
        logits = self.query(states) @ self.key(states).T * (1.0 / math.sqrt(self.hidden_size))
        weights = softmax(logits, axis=1)
        return states + weights @ self.value(states), weights
