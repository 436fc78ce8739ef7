from dataclasses import dataclass
from typing import Literal

import numpy as np

from sentifuse.core.autodiff import Tensor, concat, exp, gaussian_kl
from sentifuse.core.models.layers import LSTMCell
from sentifuse.core.models.module import Module, uniform
from sentifuse.errors import ContractError

Mode = Literal["train", "eval"]


@dataclass
class LatentState:
    mu_q: Tensor
    logvar_q: Tensor
    mu_p: Tensor
    logvar_p: Tensor
    z: Tensor
    kld: Tensor


class BackwardRecurrence(Module):
    """Runs an LSTM over the sequence reversed and returns states in forward order."""

    def __init__(self, hidden_size: int, rng: np.random.Generator):
        self.cell = LSTMCell(hidden_size, hidden_size, rng)

    def __call__(self, states: Tensor) -> Tensor:
        state = self.cell.initial_state()
        outputs: list[Tensor] = []
        for t in reversed(range(states.shape[0])):
            state = self.cell(states[t : t + 1, :], state)
            outputs.append(state[0])
        return concat(outputs[::-1], axis=0)


class VariationalPath(Module):
    """
    Gaussian latent per step. The prior reads the forward states; the
    approximate posterior reads forward and backward states. Posterior maps
    start as copies of the prior maps with zero weight on the backward
    states, so the divergence is exactly 0 at initialization.
    """

    def __init__(self, hidden_size: int, latent_size: int, rng: np.random.Generator):
        self.hidden_size = hidden_size
        self.latent_size = latent_size
        self.prior_mu = uniform(rng, (hidden_size, latent_size), hidden_size)
        self.prior_mu_bias = uniform(rng, (1, latent_size), hidden_size)
        self.prior_logvar = uniform(rng, (hidden_size, latent_size), hidden_size)
        self.prior_logvar_bias = uniform(rng, (1, latent_size), hidden_size)

        self.posterior_mu = Tensor(self._copy_prior(self.prior_mu), requires_grad=True)
        self.posterior_mu_bias = Tensor(self.prior_mu_bias.numpy(), requires_grad=True)
        self.posterior_logvar = Tensor(self._copy_prior(self.prior_logvar), requires_grad=True)
        self.posterior_logvar_bias = Tensor(self.prior_logvar_bias.numpy(), requires_grad=True)

    def _copy_prior(self, prior: Tensor) -> np.ndarray:
        return np.vstack([prior.numpy(), np.zeros((self.hidden_size, self.latent_size))])

    def __call__(
        self,
        h_forward: Tensor,
        h_backward: Tensor | None,
        mode: Mode,
        rng: np.random.Generator | None = None,
    ) -> LatentState:
        if mode == "train" and (h_backward is None or rng is None):
            raise ContractError("variational_path in train mode needs backward states and a generator")

        mu_p = h_forward @ self.prior_mu + self.prior_mu_bias
        logvar_p = h_forward @ self.prior_logvar + self.prior_logvar_bias
        if h_backward is None:
            return LatentState(mu_p, logvar_p, mu_p, logvar_p, z=mu_p, kld=Tensor(0.0))

        joint = concat([h_forward, h_backward], axis=1)
        mu_q = joint @ self.posterior_mu + self.posterior_mu_bias
        logvar_q = joint @ self.posterior_logvar + self.posterior_logvar_bias
        kld = gaussian_kl(mu_q, logvar_q, mu_p, logvar_p)

        if mode == "train":
            noise = Tensor(rng.standard_normal(mu_q.shape))
            z = mu_q + exp(logvar_q * 0.5) * noise
        else:
            z = mu_q
        return LatentState(mu_q, logvar_q, mu_p, logvar_p, z=z, kld=kld)
