from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Callable

import polars as pl

from sentifuse.core.tables import schemas

if TYPE_CHECKING:
    from sentifuse.config import RunConfig


@dataclass
class ExperimentResult:
    name: str
    summary: pl.DataFrame = field(default_factory=schemas.experiment_summary.empty)
    notes: list[str] = field(default_factory=list)


ExperimentFn = Callable[["RunConfig"], ExperimentResult]


@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    func: ExperimentFn

    def __call__(self, config: "RunConfig") -> ExperimentResult:
        return self.func(config)


EXPERIMENTS: dict[str, Experiment] = {}


def experiment(*args: Any, **kwargs: Any) -> Any:
    """
    Registers a function as a named experiment. Usable bare (`@experiment`)
    or with a `name=` override; the docstring becomes the description.
    """

    def wrapper(func: ExperimentFn) -> Experiment:
        name = kwargs.get("name", func.__name__)
        registered = Experiment(
            name=name,
            description=func.__doc__.strip() if func.__doc__ else "",
            func=func,
        )
        EXPERIMENTS[name] = registered
        return registered

    if len(args) == 0:
        return wrapper
    else:
        return wrapper(args[0])


def experiments() -> list[str]:
    return sorted(EXPERIMENTS)


def get_experiment(name: str) -> Experiment:
    found = EXPERIMENTS.get(name)
    if found is None:
        raise KeyError(f"Experiment '{name}' not found. Available experiments: {experiments()}")
    return found


def render_experiment(result: ExperimentResult) -> str:
    lines = [
        f"experiment {result.name}",
        f"{'run':<16} {'variant':<20} {'density':>7} {'accuracy':>9} {'MAP':>8} {'samples':>7}",
    ]
    for row in result.summary.iter_rows(named=True):
        lines.append(
            f"{row['run']:<16} {row['variant']:<20} {row['density']:>7.2f} "
            f"{row['accuracy']:>9.2%} {row['map']:>8.2%} {row['samples']:>7}"
        )
    lines += result.notes
    return "\n".join(lines)
