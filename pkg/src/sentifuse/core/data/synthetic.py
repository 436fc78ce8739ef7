import logging
from dataclasses import dataclass
from typing import Literal, NamedTuple

import numpy as np
import polars as pl

from sentifuse.core.data.records import (
    DEFAULT_INTERVAL_SECONDS,
    SECONDS_PER_DAY,
    SENTIMENT_INDICES,
    TrmiPolarity,
)
from sentifuse.core.data.streams import to_datetime
from sentifuse.core.data.trmi import DEFAULT_PSYCHVARS, aggregate_trmi_frame, default_polarity
from sentifuse.core.tables import schemas
from sentifuse.errors import ConfigurationError

logger = logging.getLogger(__name__)

SignalChannel = Literal["price", "sentiment", "both", "none"]
SIGNAL_CHANNELS = ("price", "sentiment", "both", "none")

# Planted moves are this many volatility units, so the flat band never hides them.
SIGNAL_MOVE = 3.0
# Keeps per-record jitter inside [-1, 1].
INDEX_LIMIT = 0.95
RECORD_JITTER = 0.05
PRICE_DECIMALS = 6


@dataclass
class SynthConfig:
    days: int = 320
    intervals_per_day: int = 13
    interval_seconds: int = DEFAULT_INTERVAL_SECONDS
    session_open_seconds: int = 14 * 3600 + 30 * 60
    start_date: str = "2015-01-02"
    sentiment_density: float = 1.0
    signal_channel: SignalChannel = "sentiment"
    signal_strength: float = 1.0
    volatility: float = 0.002
    base_price: float = 100.0
    max_records_per_interval: int = 3

    def validate(self) -> None:
        if self.days < 1:
            raise ConfigurationError(f"days must be at least 1, got {self.days}")
        if self.intervals_per_day < 1 or self.interval_seconds < 1:
            raise ConfigurationError(
                "intervals_per_day and interval_seconds must be positive, got "
                f"{self.intervals_per_day}, {self.interval_seconds}"
            )
        if self.session_open_seconds + self.intervals_per_day * self.interval_seconds > SECONDS_PER_DAY:
            raise ConfigurationError("the trading session must end within its UTC day")
        if not 0.0 <= self.sentiment_density <= 1.0:
            raise ConfigurationError(
                f"sentiment_density must lie in [0, 1], got {self.sentiment_density}"
            )
        if self.signal_channel not in SIGNAL_CHANNELS:
            raise ConfigurationError(
                f"signal_channel must be one of {SIGNAL_CHANNELS}, got {self.signal_channel!r}"
            )
        if not 0.0 <= self.signal_strength <= 1.0:
            raise ConfigurationError(
                f"signal_strength must lie in [0, 1], got {self.signal_strength}"
            )
        if self.volatility <= 0 or self.base_price <= 0:
            raise ConfigurationError("volatility and base_price must be positive")
        if not 1 <= self.max_records_per_interval <= self.interval_seconds:
            raise ConfigurationError(
                f"max_records_per_interval must lie in [1, interval_seconds], got "
                f"{self.max_records_per_interval}"
            )
        try:
            np.datetime64(self.start_date, "D")
        except ValueError:
            raise ConfigurationError(f"start_date {self.start_date!r} is not an ISO date") from None


class SyntheticData(NamedTuple):
    bars: pl.DataFrame
    trmi: pl.DataFrame
    trmi_raw: pl.DataFrame


@dataclass
class _Paths:
    timestamps: np.ndarray
    directions: np.ndarray
    sentiment: np.ndarray
    present: np.ndarray


def _session_timestamps(config: SynthConfig) -> np.ndarray:
    dates = np.busday_offset(
        np.datetime64(config.start_date, "D"), np.arange(config.days), roll="forward"
    )
    day_seconds = dates.astype("datetime64[s]").astype(np.int64)
    offsets = config.session_open_seconds + config.interval_seconds * np.arange(config.intervals_per_day)
    return (day_seconds[:, None] + offsets[None, :]).reshape(-1)


def _simulate_paths(config: SynthConfig, seed: int) -> tuple[_Paths, np.random.Generator, np.random.Generator]:
    # Independent streams keep prices and sentiment identical across densities.
    price_rng, sentiment_rng, presence_rng, record_rng = (
        np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(4)
    )
    timestamps = _session_timestamps(config)
    n = timestamps.size

    directions = price_rng.choice(np.array([-1.0, 1.0]), size=n)
    strength = config.signal_strength
    if config.signal_channel in ("sentiment", "both"):
        sentiment = directions * sentiment_rng.uniform(0.2, 1.0, size=n) * strength + (
            1.0 - strength
        ) * sentiment_rng.normal(0.0, 0.3, size=n)
    else:
        sentiment = sentiment_rng.normal(0.0, 0.3, size=n)
    sentiment = np.clip(sentiment, -INDEX_LIMIT, INDEX_LIMIT)
    present = presence_rng.random(n) < config.sentiment_density

    paths = _Paths(timestamps=timestamps, directions=directions, sentiment=sentiment, present=present)
    return paths, price_rng, record_rng


def _bars(config: SynthConfig, paths: _Paths, rng: np.random.Generator) -> pl.DataFrame:
    n = paths.timestamps.size
    sigma = config.volatility
    noise = rng.normal(0.0, 1.0, size=n)
    planted = config.signal_channel != "none"

    returns = sigma * noise
    if planted:
        # The move into interval t + 1 follows the direction drawn at t.
        returns[1:] += config.signal_strength * SIGNAL_MOVE * sigma * paths.directions[:-1]
    returns[0] = 0.0

    closes = config.base_price * np.cumprod(1.0 + returns)
    opens = np.concatenate([[config.base_price], closes[:-1]])
    wick = np.abs(rng.normal(0.0, 0.5 * sigma, size=(2, n)))
    upper, lower = wick[0], wick[1]
    if config.signal_channel in ("price", "both"):
        # A long lower shadow announces an up move and vice versa.
        cue = config.signal_strength * sigma
        lower = lower + cue * (paths.directions > 0)
        upper = upper + cue * (paths.directions < 0)
    highs = np.maximum(opens, closes) * (1.0 + upper)
    lows = np.minimum(opens, closes) * (1.0 - lower)
    volumes = np.round(rng.lognormal(10.0, 0.3, size=n))

    return pl.DataFrame(
        {
            "timestamp": to_datetime(paths.timestamps),
            "open": np.round(opens, PRICE_DECIMALS),
            "high": np.round(highs, PRICE_DECIMALS),
            "low": np.round(lows, PRICE_DECIMALS),
            "close": np.round(closes, PRICE_DECIMALS),
            "volume": volumes,
        },
        schema=schemas.bars.schema,
    )


def _index_values(sentiment: np.ndarray, rng: np.random.Generator) -> dict[str, np.ndarray]:
    n = sentiment.size
    return {
        "sentiment": sentiment,
        "optimism": np.clip(0.8 * sentiment + rng.normal(0.0, 0.1, n), -INDEX_LIMIT, INDEX_LIMIT),
        "fear": np.clip(-0.6 * sentiment + rng.normal(0.0, 0.1, n), -INDEX_LIMIT, INDEX_LIMIT),
        "joy": np.clip(0.5 * sentiment + rng.normal(0.0, 0.1, n), -INDEX_LIMIT, INDEX_LIMIT),
    }


def _raw_records(config: SynthConfig, paths: _Paths, rng: np.random.Generator) -> pl.DataFrame:
    n = paths.timestamps.size
    values = _index_values(paths.sentiment, rng)
    counts = rng.integers(1, config.max_records_per_interval + 1, size=n)
    owner = np.repeat(np.arange(n), counts)
    total = owner.size

    starts = np.repeat(np.cumsum(counts) - counts, counts)
    rank = np.arange(total) - starts
    slot = config.interval_seconds // config.max_records_per_interval
    offsets = rank * slot + rng.integers(0, slot, size=total)
    buzz = np.round(rng.lognormal(1.0, 0.5, size=total), PRICE_DECIMALS)
    jitter = rng.uniform(-RECORD_JITTER, RECORD_JITTER, size=(len(SENTIMENT_INDICES), total))

    keep = paths.present[owner]
    return pl.DataFrame(
        {
            "timestamp": to_datetime((paths.timestamps[owner] + offsets)[keep]),
            "buzz": buzz[keep],
            **{
                index: np.round(np.clip(values[index][owner] + jitter[i], -1.0, 1.0), PRICE_DECIMALS)[keep]
                for i, index in enumerate(SENTIMENT_INDICES)
            },
        },
        schema=schemas.trmi_raw.schema,
    )


def generate_synthetic(config: SynthConfig, seed: int) -> SyntheticData:
    """
    Geometric random walk bars with a planted direction signal, plus
    sub-interval sentiment records and their interval aggregates.

    Each interval draws a direction; the next interval's return moves that
    way with size `signal_strength * 3 * volatility` on top of the noise.
    The direction is visible in the current interval's sentiment, its
    candle shape, both, or nowhere, per `signal_channel`. Sentiment for an
    interval is kept with probability `sentiment_density`.
    """
    config.validate()
    paths, price_rng, record_rng = _simulate_paths(config, seed)
    bars = _bars(config, paths, price_rng)
    trmi_raw = _raw_records(config, paths, record_rng)
    trmi = aggregate_trmi_frame(trmi_raw, config.interval_seconds)
    logger.info(
        f"Generated {bars.height} bars and {trmi_raw.height} sentiment records "
        f"({trmi.height} intervals) with seed {seed}"
    )
    return SyntheticData(bars=bars, trmi=trmi, trmi_raw=trmi_raw)


def generate_psychvars(config: SynthConfig, seed: int) -> tuple[pl.DataFrame, TrmiPolarity]:
    """
    Interval-level PsychVar scores whose sentiment index follows the same
    planted path as generate_synthetic, with the default polarity table.
    """
    config.validate()
    paths, _, record_rng = _simulate_paths(config, seed)
    values = _index_values(paths.sentiment, record_rng)
    n = paths.timestamps.size
    magnitude = record_rng.lognormal(1.0, 0.5, size=n)

    positive = magnitude * (1.0 + values["sentiment"]) / 2.0
    negative = magnitude * (1.0 - values["sentiment"]) / 2.0
    calm = magnitude * 0.1 * (1.0 - values["fear"]) / 2.0
    anxious = magnitude * 0.1 * (1.0 + values["fear"]) / 2.0
    scores = {
        "praise": 0.5 * positive,
        "criticism": 0.5 * negative,
        "bullish_talk": 0.3 * positive,
        "bearish_talk": 0.3 * negative,
        "worry": anxious,
        "reassurance": calm,
        "delight": 0.2 * positive,
        "gloom": 0.2 * negative,
    }
    keep = paths.present
    frame = pl.DataFrame(
        {
            "timestamp": to_datetime(paths.timestamps[keep]),
            **{name: np.round(scores[name][keep], PRICE_DECIMALS) for name in DEFAULT_PSYCHVARS},
        }
    )
    return frame, default_polarity()


def stump_accuracy(bars: pl.DataFrame, trmi: pl.DataFrame, horizon: int = 1) -> float:
    """
    Accuracy of predicting the sign of the `horizon`-interval forward return
    from the sign of the current interval's sentiment index, over intervals
    with sentiment and a non-zero move.
    """
    joined = (
        bars.select("timestamp", "close")
        .join(trmi.select("timestamp", "sentiment"), on="timestamp", how="left")
        .sort("timestamp")
        .with_columns((pl.col("close").shift(-horizon) / pl.col("close") - 1.0).alias("forward"))
        .filter(
            pl.col("sentiment").is_not_null()
            & (pl.col("sentiment") != 0)
            & pl.col("forward").is_not_null()
            & (pl.col("forward") != 0)
        )
    )
    if joined.is_empty():
        return float("nan")
    hits = joined.select((pl.col("sentiment").sign() == pl.col("forward").sign()).mean()).item()
    return float(hits)
