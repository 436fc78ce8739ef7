import logging
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING

import polars as pl

from sentifuse.core.backtest.positions import SCORE_COLUMNS
from sentifuse.core.data import SyntheticData, generate_synthetic, prepare_samples, stump_accuracy
from sentifuse.core.experiments.catalog import ExperimentResult, experiment
from sentifuse.core.models import ModelConfig
from sentifuse.core.tables import schemas
from sentifuse.core.training import (
    TrainConfig,
    accuracy,
    mean_average_precision,
    predictions_frame,
    walk_forward,
)
from sentifuse.errors import ConfigurationError, DatasetError

if TYPE_CHECKING:
    from sentifuse.config import RunConfig

logger = logging.getLogger(__name__)

DENSITIES = (1.0, 0.5, 0.2, 0.05, 0.0)


@dataclass
class ExperimentConfig:
    """
    Desk-scale overrides applied on top of the run's synthetic, model and
    training settings while an experiment trains.
    """

    days: int = 260
    train_months: int = 6
    test_months: int = 2
    step_months: int = 2
    epochs: int = 15
    batch_size: int = 8
    learning_rate: float = 1e-2
    hidden_size: int = 8
    conv_channels: int = 4
    latent_size: int = 4
    head_size: int = 16
    layers: int = 1
    densities: tuple[float, ...] = DENSITIES

    def validate(self) -> None:
        for name in ("days", "train_months", "test_months", "step_months", "epochs", "batch_size", "layers"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"experiment.{name} must be positive, got {getattr(self, name)}")
        if self.learning_rate <= 0:
            raise ConfigurationError(f"experiment.learning_rate must be positive, got {self.learning_rate}")
        if not self.densities or any(not 0.0 <= d <= 1.0 for d in self.densities):
            raise ConfigurationError(f"experiment.densities must lie in [0, 1], got {self.densities}")


def _dataset(config: "RunConfig", density: float) -> SyntheticData:
    synth = replace(
        config.synth,
        days=config.experiment.days,
        signal_channel="sentiment",
        sentiment_density=density,
    )
    return generate_synthetic(synth, seed=config.seed)


def _model_config(config: "RunConfig", variant: str) -> ModelConfig:
    scale = config.experiment
    return replace(
        config.model,
        variant=variant,
        use_sentiment=variant != "clvsa",
        hidden_size=scale.hidden_size,
        conv_channels=scale.conv_channels,
        latent_size=scale.latent_size,
        head_size=scale.head_size,
        layers=scale.layers,
    )


def _train_config(config: "RunConfig") -> TrainConfig:
    scale = config.experiment
    return replace(
        config.train,
        epochs=scale.epochs,
        batch_size=scale.batch_size,
        learning_rate=scale.learning_rate,
        train_months=scale.train_months,
        test_months=scale.test_months,
        step_months=scale.step_months,
        seed=config.seed,
    )


def _evaluate(
    config: "RunConfig",
    name: str,
    run: str,
    variant: str,
    density: float,
    data: SyntheticData,
) -> dict[str, object]:
    model_config = _model_config(config, variant)
    data_config = replace(
        config.data,
        interval_seconds=config.synth.interval_seconds,
        intervals_per_day=config.synth.intervals_per_day,
    )
    samples = prepare_samples(data.bars, data.trmi, data_config, model_config.use_indicators)
    folds = walk_forward(samples, model_config, _train_config(config), jobs=config.jobs)
    predictions = predictions_frame(folds)
    if predictions.is_empty():
        raise DatasetError(f"{name}/{run}: walk-forward produced no test predictions")

    scores = predictions.select(SCORE_COLUMNS).to_numpy()
    labels = predictions.get_column("label").to_numpy()
    row = {
        "experiment": name,
        "run": run,
        "variant": variant,
        "density": density,
        "accuracy": accuracy(scores, labels),
        "map": mean_average_precision(scores, labels),
        "samples": predictions.height,
    }
    logger.info(
        f"{name}/{run}: {variant} at density {density:.2f}, accuracy {row['accuracy']:.4f}, "
        f"MAP {row['map']:.4f} over {row['samples']} test days"
    )
    return row


def _summary(rows: list[dict[str, object]]) -> pl.DataFrame:
    return pl.DataFrame(rows, schema=schemas.experiment_summary.schema)


def _gap_note(summary: pl.DataFrame, better: str, worse: str) -> str:
    accuracies = dict(zip(summary.get_column("run"), summary.get_column("accuracy")))
    gap = accuracies[better] - accuracies[worse]
    return f"accuracy gap {better} - {worse}: {gap * 100:+.2f} points"


@experiment
def fusion_benefit(config: "RunConfig") -> ExperimentResult:
    """Trading-only clvsa against dual_clvsa on a sentiment-planted dataset."""
    config.experiment.validate()
    data = _dataset(config, density=1.0)
    rows = [
        _evaluate(config, "fusion_benefit", "trading_only", "clvsa", 1.0, data),
        _evaluate(config, "fusion_benefit", "dual", "dual_clvsa", 1.0, data),
    ]
    summary = _summary(rows)
    return ExperimentResult(
        name="fusion_benefit",
        summary=summary,
        notes=[
            _gap_note(summary, "dual", "trading_only"),
            f"sentiment stump accuracy on the dataset: {stump_accuracy(data.bars, data.trmi):.2%}",
        ],
    )


@experiment
def input_fusion_harm(config: "RunConfig") -> ExperimentResult:
    """Input-level fusion (clvsa_input_fusion) against dual_clvsa on the same dataset."""
    config.experiment.validate()
    data = _dataset(config, density=1.0)
    rows = [
        _evaluate(config, "input_fusion_harm", "input_fusion", "clvsa_input_fusion", 1.0, data),
        _evaluate(config, "input_fusion_harm", "dual", "dual_clvsa", 1.0, data),
    ]
    summary = _summary(rows)
    return ExperimentResult(
        name="input_fusion_harm",
        summary=summary,
        notes=[_gap_note(summary, "dual", "input_fusion")],
    )


@experiment
def sparsity_sweep(config: "RunConfig") -> ExperimentResult:
    """dual_clvsa across decreasing sentiment densities, with a trading-only reference."""
    config.experiment.validate()
    # prices do not depend on density, so one trading-only run serves every density
    reference = _evaluate(
        config, "sparsity_sweep", "trading_only", "clvsa", 1.0, _dataset(config, density=1.0)
    )
    rows = [reference]
    for density in config.experiment.densities:
        data = _dataset(config, density)
        rows.append(
            _evaluate(config, "sparsity_sweep", f"density_{density:.2f}", "dual_clvsa", density, data)
        )
    summary = _summary(rows)
    notes = [
        f"{row['run']}: {(row['accuracy'] - reference['accuracy']) * 100:+.2f} points over trading-only"
        for row in rows[1:]
    ]
    return ExperimentResult(name="sparsity_sweep", summary=summary, notes=notes)
