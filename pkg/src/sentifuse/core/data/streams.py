import logging
from pathlib import Path
from typing import Sequence

import numpy as np
import polars as pl

from sentifuse.core.data.records import (
    SENTIMENT_INDICES,
    TRADING_COLUMNS,
    Bar,
    TrmiRecord,
)
from sentifuse.core.tables import InputFilters
from sentifuse.core.tables import schemas
from sentifuse.errors import ContractError, DataError

logger = logging.getLogger(__name__)


def to_datetime(seconds: Sequence[int] | np.ndarray) -> pl.Series:
    """UTC epoch seconds to a timezone-aware microsecond datetime series."""
    micros = pl.Series("timestamp", np.asarray(seconds, dtype=np.int64) * 1_000_000)
    return micros.cast(pl.Datetime("us")).dt.replace_time_zone("UTC")


def epoch_seconds(df: pl.DataFrame, column: str = "timestamp") -> np.ndarray:
    return df.get_column(column).dt.epoch("s").to_numpy().astype(np.int64)


def bars_frame(bars: Sequence[Bar]) -> pl.DataFrame:
    return pl.DataFrame(
        {
            "timestamp": to_datetime([bar.timestamp for bar in bars]),
            **{column: [float(getattr(bar, column)) for bar in bars] for column in TRADING_COLUMNS},
        },
        schema=schemas.bars.schema,
    )


def bars_from_frame(df: pl.DataFrame) -> list[Bar]:
    seconds = epoch_seconds(df)
    return [
        Bar(int(ts), *(float(value) for value in row))
        for ts, row in zip(seconds, df.select(TRADING_COLUMNS).iter_rows())
    ]


def trmi_frame(records: Sequence[TrmiRecord]) -> pl.DataFrame:
    return pl.DataFrame(
        {
            "timestamp": to_datetime([record.timestamp for record in records]),
            "buzz": [record.buzz for record in records],
            **{index: [record.indices.get(index) for record in records] for index in SENTIMENT_INDICES},
        },
        schema=schemas.trmi.schema,
    )


def trmi_from_frame(df: pl.DataFrame) -> list[TrmiRecord]:
    seconds = epoch_seconds(df)
    records = []
    for ts, row in zip(seconds, df.select("buzz", *SENTIMENT_INDICES).iter_rows(named=True)):
        buzz = row["buzz"] or 0.0
        if buzz == 0.0:
            records.append(TrmiRecord.missing(int(ts)))
        else:
            records.append(
                TrmiRecord(int(ts), buzz, {index: row[index] for index in SENTIMENT_INDICES})
            )
    return records


def check_bars(df: pl.DataFrame, source: str = "bars") -> pl.DataFrame:
    """
    Validates price sanity and strictly increasing timestamps; returns `df`
    unchanged.
    """
    if df.is_empty():
        raise DataError(f"{source}: no bars")
    non_positive = df.filter(pl.min_horizontal(*TRADING_COLUMNS[:4]) <= 0)
    if not non_positive.is_empty():
        raise DataError(
            f"{source}: non-positive price at {non_positive.get_column('timestamp')[0]}"
        )
    broken = df.filter(
        (pl.col("low") > pl.min_horizontal("open", "close"))
        | (pl.col("high") < pl.max_horizontal("open", "close"))
        | (pl.col("volume") < 0)
    )
    if not broken.is_empty():
        raise DataError(
            f"{source}: bar at {broken.get_column('timestamp')[0]} violates "
            "low <= open/close <= high or has negative volume"
        )
    if not bool((df.get_column("timestamp").diff().drop_nulls().dt.total_microseconds() > 0).all()):
        raise ContractError(f"{source}: timestamps are not strictly increasing")
    return df


def load_bars(path: str | Path, filters: InputFilters | None = None) -> pl.DataFrame:
    df = check_bars(schemas.bars.read(path, filters=filters), source=str(path))
    logger.info(f"Loaded {df.height} bars from {path}")
    return df


def load_trmi(path: str | Path, filters: InputFilters | None = None) -> pl.DataFrame:
    df = schemas.trmi.read(path, filters=filters).sort("timestamp")
    out_of_range = df.filter(
        pl.any_horizontal(pl.col(index).abs() > 1.0 for index in SENTIMENT_INDICES)
        | (pl.col("buzz") < 0)
    )
    if not out_of_range.is_empty():
        raise DataError(
            f"{path}: sentiment record at {out_of_range.get_column('timestamp')[0]} "
            "has an index outside [-1, 1] or negative buzz"
        )
    logger.info(f"Loaded {df.height} sentiment records from {path}")
    return df

