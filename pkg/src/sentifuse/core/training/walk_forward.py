import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Sequence

import numpy as np
import polars as pl

from sentifuse.core.data.records import AlignedSample
from sentifuse.core.data.streams import to_datetime
from sentifuse.core.models import Model, ModelConfig, build_model
from sentifuse.core.tables import schemas
from sentifuse.core.training.metrics import accuracy, mean_average_precision
from sentifuse.core.training.trainer import (
    SamplePair,
    TrainConfig,
    TrainResult,
    consecutive_pairs,
    predict,
    train_fold,
)
from sentifuse.errors import ConfigurationError

logger = logging.getLogger(__name__)


def month_index(timestamp: int) -> int:
    moment = datetime.fromtimestamp(timestamp, tz=timezone.utc)
    return moment.year * 12 + moment.month - 1


def month_label(index: int) -> str:
    return f"{index // 12:04d}-{index % 12 + 1:02d}"


@dataclass(frozen=True)
class FoldWindow:
    """Calendar-month windows: train [train_start, test_start), test [test_start, test_end)."""

    fold: int
    train_start: int
    test_start: int
    test_end: int


@dataclass
class FoldResult:
    fold: int
    window: FoldWindow
    timestamps: np.ndarray
    scores: np.ndarray
    labels: np.ndarray
    map: float
    accuracy: float
    train_timestamps: np.ndarray
    training: TrainResult = field(default_factory=TrainResult)
    model: Model | None = None


def fold_windows(samples: Sequence[AlignedSample], config: TrainConfig) -> list[FoldWindow]:
    """
    Rolling-origin windows over the calendar months the samples span. Fold
    k trains on months [first + k*step, first + k*step + train) and tests on
    the following `test_months`.
    """
    config.validate()
    if not samples:
        raise ConfigurationError("walk_forward needs samples")
    first = month_index(samples[0].timestamp)
    span = month_index(samples[-1].timestamp) - first + 1
    width = config.train_months + config.test_months
    if span < width:
        raise ConfigurationError(
            f"Data spans {span} months, walk-forward needs at least "
            f"{config.train_months} train + {config.test_months} test months"
        )

    windows = []
    for fold, offset in enumerate(range(0, span - width + 1, config.step_months)):
        train_start = first + offset
        test_start = train_start + config.train_months
        windows.append(FoldWindow(fold, train_start, test_start, test_start + config.test_months))
    return windows


def _split(pairs: Sequence[SamplePair], window: FoldWindow) -> tuple[list[SamplePair], list[SamplePair]]:
    train, test = [], []
    for pair in pairs:
        month = month_index(pair[1].timestamp)
        if window.train_start <= month < window.test_start:
            train.append(pair)
        elif window.test_start <= month < window.test_end:
            test.append(pair)
    return train, test


def _run_fold(
    window: FoldWindow,
    train: list[SamplePair],
    test: list[SamplePair],
    model_config: ModelConfig,
    train_config: TrainConfig,
    initial: Model | None,
) -> FoldResult:
    seed = train_config.seed + window.fold
    model = build_model(model_config, seed=seed)
    if initial is not None:
        model.load_state_dict(initial.state_dict())

    training = train_fold(model, train, train_config, seed=seed)
    scores = predict(model, test)
    labels = np.array([int(sample.label) for _, sample in test], dtype=np.int64)
    result = FoldResult(
        fold=window.fold,
        window=window,
        timestamps=np.array([sample.timestamp for _, sample in test], dtype=np.int64),
        scores=scores,
        labels=labels,
        map=mean_average_precision(scores, labels),
        accuracy=accuracy(scores, labels),
        train_timestamps=np.array([sample.timestamp for _, sample in train], dtype=np.int64),
        training=training,
        model=model,
    )
    logger.info(
        f"fold {window.fold}: train {month_label(window.train_start)}..{month_label(window.test_start - 1)} "
        f"({len(train)} samples), test {month_label(window.test_start)}..{month_label(window.test_end - 1)} "
        f"({len(test)} samples), MAP {result.map:.4f}, accuracy {result.accuracy:.4f}"
    )
    return result


def walk_forward(
    samples: Sequence[AlignedSample],
    model_config: ModelConfig,
    train_config: TrainConfig,
    jobs: int = 1,
) -> list[FoldResult]:
    """
    Trains and evaluates one model per fold window. Folds whose windows hold
    fewer than 2 training or no test samples are skipped. Cold-started folds
    run on `jobs` threads; warm-started folds run in order.
    """
    model_config.validate()
    windows = fold_windows(samples, train_config)
    pairs = consecutive_pairs(samples)

    planned = []
    for window in windows:
        train, test = _split(pairs, window)
        if len(train) < 2 or not test:
            logger.warning(
                f"Skipping fold {window.fold}: {len(train)} training and {len(test)} test samples"
            )
            continue
        planned.append((window, train, test))

    if train_config.warm_start:
        results: list[FoldResult] = []
        previous: Model | None = None
        for window, train, test in planned:
            result = _run_fold(window, train, test, model_config, train_config, previous)
            previous = result.model
            results.append(result)
        return results

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as executor:
        futures = [
            executor.submit(_run_fold, window, train, test, model_config, train_config, None)
            for window, train, test in planned
        ]
        results = [future.result() for future in futures]
    return sorted(results, key=lambda result: result.fold)


def predictions_frame(folds: Sequence[FoldResult]) -> pl.DataFrame:
    if not folds:
        return schemas.predictions.empty()
    timestamps = np.concatenate([fold.timestamps for fold in folds])
    scores = np.vstack([fold.scores for fold in folds])
    labels = np.concatenate([fold.labels for fold in folds])
    frame = pl.DataFrame(
        {
            "timestamp": to_datetime(timestamps),
            "score_down": scores[:, 0],
            "score_flat": scores[:, 1],
            "score_up": scores[:, 2],
            "label": labels,
        },
        schema=schemas.predictions.schema,
    )
    # overlapping test windows keep the earliest fold's prediction
    return frame.unique("timestamp", keep="first", maintain_order=True).sort("timestamp")


def training_log_frame(folds: Sequence[FoldResult]) -> pl.DataFrame:
    rows = [
        (fold.fold, epoch, loss)
        for fold in folds
        for epoch, loss in enumerate(fold.training.losses)
    ]
    return pl.DataFrame(rows, schema=schemas.training_log.schema, orient="row")
