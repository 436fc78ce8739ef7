import logging
from datetime import timedelta

import numpy as np
import polars as pl

from sentifuse.core.data.records import SECONDS_PER_DAY, Movement
from sentifuse.errors import DataError

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.34
SCORE_COLUMNS = ("score_down", "score_flat", "score_up")


def signal_positions(scores: np.ndarray, threshold: float = DEFAULT_THRESHOLD) -> np.ndarray:
    """
    +1 when up is the argmax class with at least `threshold` confidence, -1
    for down under the same rule, 0 otherwise.
    """
    scores = np.atleast_2d(np.asarray(scores, dtype=np.float64))
    if scores.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    best = np.argmax(scores, axis=1)
    confident = scores[np.arange(scores.shape[0]), best] >= threshold
    positions = np.zeros(scores.shape[0], dtype=np.int64)
    positions[(best == Movement.UP) & confident] = 1
    positions[(best == Movement.DOWN) & confident] = -1
    return positions


def signals_to_positions(
    predictions: pl.DataFrame, bars: pl.DataFrame, threshold: float = DEFAULT_THRESHOLD
) -> pl.DataFrame:
    """
    Per-bar positions: each bar holds the signal of the latest prediction at
    or before it. The span runs from the first prediction until one day
    after the last one, so every signal is held for as long as the others.
    """
    if predictions.is_empty():
        raise DataError("No predictions to trade on")
    predictions = predictions.sort("timestamp")
    first, last = predictions.get_column("timestamp")[0], predictions.get_column("timestamp")[-1]
    bar_start, bar_end = bars.get_column("timestamp").min(), bars.get_column("timestamp").max()
    if first < bar_start or last > bar_end:
        raise DataError(
            f"Predictions span {first}..{last} but bars only cover {bar_start}..{bar_end}"
        )

    signals = predictions.select(
        "timestamp",
        pl.Series(
            "position", signal_positions(predictions.select(SCORE_COLUMNS).to_numpy(), threshold)
        ),
    )
    horizon_end = last + timedelta(seconds=SECONDS_PER_DAY)
    positioned = (
        bars.select("timestamp", "close")
        .filter((pl.col("timestamp") >= first) & (pl.col("timestamp") < horizon_end))
        .sort("timestamp")
        .join_asof(signals, on="timestamp", strategy="backward")
        .with_columns(pl.col("position").fill_null(0))
    )
    logger.debug(f"Positioned {positioned.height} bars from {predictions.height} predictions")
    return positioned
