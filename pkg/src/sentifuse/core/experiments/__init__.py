from sentifuse.core.experiments.catalog import (
    EXPERIMENTS,
    Experiment,
    ExperimentResult,
    experiment,
    experiments,
    get_experiment,
    render_experiment,
)
from sentifuse.core.experiments.definitions import (
    DENSITIES,
    ExperimentConfig,
    fusion_benefit,
    input_fusion_harm,
    sparsity_sweep,
)

__all__ = [
    "DENSITIES",
    "EXPERIMENTS",
    "Experiment",
    "ExperimentConfig",
    "ExperimentResult",
    "experiment",
    "experiments",
    "fusion_benefit",
    "get_experiment",
    "input_fusion_harm",
    "render_experiment",
    "sparsity_sweep",
]
