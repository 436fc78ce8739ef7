from typing import Iterator, Mapping

import numpy as np

from sentifuse.core.autodiff import Tensor
from sentifuse.errors import ConfigurationError, DimensionError


def uniform(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int) -> Tensor:
    """Trainable tensor drawn from U(-sqrt(1/fan_in), sqrt(1/fan_in))."""
    bound = np.sqrt(1.0 / max(fan_in, 1))
    return Tensor(rng.uniform(-bound, bound, size=shape), requires_grad=True)


def zeros(shape: tuple[int, ...]) -> Tensor:
    return Tensor(np.zeros(shape), requires_grad=True)


class Module:
    """
    Base class for anything holding parameters.

    Parameters are the trainable Tensors stored as attributes, directly, in
    sub-modules or in lists of sub-modules. They are named by attribute path
    in assignment order, so names and order are deterministic.
    """

    def _children(self) -> Iterator[tuple[str, "Module | Tensor"]]:
        for name, value in vars(self).items():
            if isinstance(value, (Module, Tensor)):
                yield name, value
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, (Module, Tensor)):
                        yield f"{name}.{i}", item

    def named_parameters(self, prefix: str = "") -> list[tuple[str, Tensor]]:
        named: list[tuple[str, Tensor]] = []
        for name, value in self._children():
            full_name = f"{prefix}{name}"
            if isinstance(value, Module):
                named.extend(value.named_parameters(prefix=f"{full_name}."))
            elif value.requires_grad and value.is_leaf:
                named.append((full_name, value))
        return named

    def parameters(self) -> list[Tensor]:
        return [parameter for _, parameter in self.named_parameters()]

    def parameter_count(self) -> int:
        return sum(parameter.size for parameter in self.parameters())

    def zero_grad(self) -> None:
        for parameter in self.parameters():
            parameter.zero_grad()

    def state_dict(self) -> dict[str, np.ndarray]:
        return {name: parameter.numpy() for name, parameter in self.named_parameters()}

    def load_state_dict(self, state: Mapping[str, np.ndarray]) -> None:
        named = dict(self.named_parameters())
        missing = sorted(set(named) - set(state))
        unexpected = sorted(set(state) - set(named))
        if missing or unexpected:
            raise ConfigurationError(
                f"State does not match model: missing {missing}, unexpected {unexpected}"
            )
        for name, parameter in named.items():
            values = np.asarray(state[name], dtype=np.float64)
            if values.shape != parameter.shape:
                raise DimensionError(
                    f"Parameter {name} has shape {parameter.shape}, state has {values.shape}"
                )
            parameter.data[...] = values
