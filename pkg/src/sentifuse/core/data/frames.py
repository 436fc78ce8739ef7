import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import polars as pl

from sentifuse.core.autodiff import Tensor
from sentifuse.core.data.align import AlignedPair, align_frames, aligned_pairs_frame
from sentifuse.core.data.indicators import INDICATOR_COLUMNS, compute_indicators
from sentifuse.core.data.records import (
    DEFAULT_INTERVAL_SECONDS,
    PRICE_COLUMNS,
    SECONDS_PER_DAY,
    SENTIMENT_INDICES,
    TRADING_COLUMNS,
    AlignedSample,
    Movement,
)
from sentifuse.core.data.streams import epoch_seconds
from sentifuse.errors import ConfigurationError, ContractError, DatasetError

logger = logging.getLogger(__name__)

MAX_FILL_FRACTION = 0.2
DEFAULT_FLAT_BAND = 0.0005
# Rows with a smaller spread are treated as constant and normalize to 0.
STD_FLOOR = 1e-12


def movement_label(current: float, future: float, flat_band: float) -> tuple[Movement, float]:
    ret = (future - current) / current
    if abs(ret) <= flat_band:
        return Movement.FLAT, ret
    return (Movement.UP if ret > 0 else Movement.DOWN), ret


def zscore_rows(values: np.ndarray) -> np.ndarray:
    mean = values.mean(axis=1, keepdims=True)
    std = values.std(axis=1, keepdims=True)
    centered = values - mean
    return np.where(std > STD_FLOOR, centered / np.where(std > STD_FLOOR, std, 1.0), 0.0)


def sentiment_rows(buzz: np.ndarray, indices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    [log1p(buzz), sentiment, optimism, fear, joy] per interval plus the
    presence mask. Padded intervals and missing indices are exactly 0.0.
    """
    mask = (np.nan_to_num(buzz, nan=0.0) > 0).astype(np.float64)
    rows = np.vstack([np.log1p(np.nan_to_num(buzz, nan=0.0)), np.nan_to_num(indices, nan=0.0)])
    return rows * mask, mask


def build_day_frames(
    aligned: pl.DataFrame | Sequence[AlignedPair],
    intervals_per_day: int,
    horizon: int = 1,
    flat_band: float = DEFAULT_FLAT_BAND,
    use_indicators: bool = False,
    interval: int = DEFAULT_INTERVAL_SECONDS,
    max_fill_fraction: float = MAX_FILL_FRACTION,
) -> list[AlignedSample]:
    """
    Cuts an aligned bar/sentiment stream into one sample per trading day.

    A day is a UTC date; its slots start at the earliest time of day in the
    stream and step by `interval`. Days missing at most `max_fill_fraction`
    of their slots are forward-filled (previous close as OHLC, zero volume,
    padded sentiment), others are dropped. The label compares the close
    `horizon` bars after the day's last real bar with that bar's close.
    """
    if intervals_per_day < 1 or horizon < 1 or flat_band < 0:
        raise ContractError(
            "intervals_per_day and horizon must be positive and flat_band non-negative, got "
            f"{intervals_per_day}, {horizon}, {flat_band}"
        )
    if not isinstance(aligned, pl.DataFrame):
        aligned = aligned_pairs_frame(aligned)
    aligned = aligned.sort("timestamp")
    if aligned.is_empty():
        raise DatasetError("No aligned bars to build day frames from")

    seconds = epoch_seconds(aligned)
    closes = aligned.get_column("close").to_numpy().astype(np.float64)
    trading = aligned.select(TRADING_COLUMNS).to_numpy().astype(np.float64)
    buzz = aligned.get_column("buzz").fill_null(0.0).to_numpy().astype(np.float64)
    indices = aligned.select(SENTIMENT_INDICES).to_numpy().astype(np.float64)

    warmup = np.zeros(aligned.height, dtype=bool)
    if use_indicators:
        indicator_frame = compute_indicators(aligned)
        trading = np.hstack(
            [trading, indicator_frame.select(INDICATOR_COLUMNS).to_numpy().astype(np.float64)]
        )
        warmup = indicator_frame.get_column("warmup").to_numpy()

    session_open = int((seconds % SECONDS_PER_DAY).min())
    days = seconds // SECONDS_PER_DAY
    slots = ((seconds % SECONDS_PER_DAY) - session_open) // interval
    max_missing = math.floor(max_fill_fraction * intervals_per_day + 1e-9)

    samples: list[AlignedSample] = []
    dropped = {"incomplete": 0, "warmup": 0, "no_future": 0}
    last_close: float | None = None

    for day in np.unique(days):
        rows = np.flatnonzero((days == day) & (slots >= 0) & (slots < intervals_per_day))
        if rows.size == 0:
            continue
        day_last_close = closes[rows[-1]]
        previous_close = last_close
        last_close = day_last_close

        if intervals_per_day - rows.size > max_missing:
            dropped["incomplete"] += 1
            continue
        if warmup[rows].any():
            dropped["warmup"] += 1
            continue
        future = rows[-1] + horizon
        if future >= aligned.height:
            dropped["no_future"] += 1
            continue

        day_slots = slots[rows]
        fill_from = np.full(intervals_per_day, -1)
        fill_from[day_slots] = rows
        real = fill_from >= 0

        trading_day = np.empty((trading.shape[1], intervals_per_day))
        close_day = np.empty(intervals_per_day)
        buzz_day = np.zeros(intervals_per_day)
        indices_day = np.zeros((len(SENTIMENT_INDICES), intervals_per_day))
        first_real = fill_from[real][0]
        carry = -1
        for slot in range(intervals_per_day):
            if real[slot]:
                carry = fill_from[slot]
                trading_day[:, slot] = trading[carry]
                buzz_day[slot] = buzz[carry]
                indices_day[:, slot] = indices[carry]
                close_day[slot] = closes[carry]
                continue
            if carry >= 0:
                source, price = carry, closes[carry]
            else:
                # leading gap: carry the previous day's close
                source = first_real
                price = closes[first_real] if previous_close is None else previous_close
            trading_day[:, slot] = trading[source]
            trading_day[: len(PRICE_COLUMNS), slot] = price
            trading_day[len(PRICE_COLUMNS), slot] = 0.0
            close_day[slot] = price

        label, forward_return = movement_label(closes[rows[-1]], closes[future], flat_band)
        sentiment_day, mask = sentiment_rows(buzz_day, indices_day)
        timestamps = int(day) * SECONDS_PER_DAY + session_open + interval * np.arange(intervals_per_day)

        samples.append(
            AlignedSample(
                day_index=int(day),
                timestamp=int(timestamps[-1]),
                timestamps=timestamps,
                trading_frame=Tensor(zscore_rows(trading_day)),
                sentiment_frame=Tensor(sentiment_day),
                sentiment_mask=mask,
                label=label,
                close_prices=close_day,
                forward_return=forward_return,
            )
        )

    logger.info(
        f"Built {len(samples)} day samples; dropped {dropped['incomplete']} incomplete, "
        f"{dropped['warmup']} warm-up and {dropped['no_future']} unlabeled days"
    )
    if len(samples) < 2:
        raise DatasetError(f"Need at least 2 complete days, got {len(samples)}")
    return samples


@dataclass
class DataConfig:
    """How aligned streams are cut into labeled day samples."""

    interval_seconds: int = DEFAULT_INTERVAL_SECONDS
    intervals_per_day: int = 13
    horizon: int = 1
    flat_band: float = DEFAULT_FLAT_BAND
    max_fill_fraction: float = MAX_FILL_FRACTION

    def validate(self) -> None:
        if self.interval_seconds < 1 or self.intervals_per_day < 1 or self.horizon < 1:
            raise ConfigurationError(
                "interval_seconds, intervals_per_day and horizon must be positive, got "
                f"{self.interval_seconds}, {self.intervals_per_day}, {self.horizon}"
            )
        if self.flat_band < 0:
            raise ConfigurationError(f"flat_band must be non-negative, got {self.flat_band}")
        if not 0.0 <= self.max_fill_fraction < 1.0:
            raise ConfigurationError(
                f"max_fill_fraction must lie in [0, 1), got {self.max_fill_fraction}"
            )


def prepare_samples(
    bars: pl.DataFrame,
    trmi: pl.DataFrame,
    config: DataConfig,
    use_indicators: bool = False,
) -> list[AlignedSample]:
    """Aligns bars with sentiment and builds the day samples the models read."""
    config.validate()
    return build_day_frames(
        align_frames(bars, trmi, config.interval_seconds),
        config.intervals_per_day,
        horizon=config.horizon,
        flat_band=config.flat_band,
        use_indicators=use_indicators,
        interval=config.interval_seconds,
        max_fill_fraction=config.max_fill_fraction,
    )
