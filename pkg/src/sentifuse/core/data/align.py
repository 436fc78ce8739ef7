import logging
from typing import Sequence

import polars as pl

from sentifuse.core.data.records import SENTIMENT_INDICES, TRADING_COLUMNS, Bar, TrmiRecord
from sentifuse.core.data.streams import epoch_seconds, to_datetime
from sentifuse.core.data.trmi import aggregate_trmi, aggregate_trmi_frame
from sentifuse.core.tables import schemas
from sentifuse.errors import ContractError

logger = logging.getLogger(__name__)

AlignedPair = tuple[Bar, TrmiRecord]


def _check_sorted(name: str, timestamps: Sequence[int], strict: bool) -> None:
    for previous, current in zip(timestamps, timestamps[1:]):
        if current < previous or (strict and current == previous):
            raise ContractError(f"{name} timestamps are not sorted: {current} follows {previous}")


def bind_align(
    bars: Sequence[Bar], trmi: Sequence[TrmiRecord], interval: int
) -> list[AlignedPair]:
    """
    Right-joins sentiment onto the bar grid. Records inside
    [bar.timestamp, bar.timestamp + interval) are aggregated into that bar's
    record; bars with none get a fully missing record (the padding). Records
    outside every bar's interval are dropped.
    """
    if interval <= 0:
        raise ContractError(f"interval must be positive, got {interval}")
    _check_sorted("bar", [bar.timestamp for bar in bars], strict=True)
    _check_sorted("sentiment", [record.timestamp for record in trmi], strict=False)

    aligned: list[AlignedPair] = []
    cursor = 0
    for bar in bars:
        while cursor < len(trmi) and trmi[cursor].timestamp < bar.timestamp:
            cursor += 1
        window: list[TrmiRecord] = []
        while cursor < len(trmi) and trmi[cursor].timestamp < bar.timestamp + interval:
            window.append(trmi[cursor])
            cursor += 1
        aligned.append((bar, aggregate_trmi(window, timestamp=bar.timestamp)))

    padded = sum(1 for _, record in aligned if record.is_padding)
    logger.debug(f"Aligned {len(aligned)} bars, {padded} padded")
    return aligned


def aligned_pairs_frame(aligned: Sequence[AlignedPair]) -> pl.DataFrame:
    return pl.DataFrame(
        {
            "timestamp": to_datetime([bar.timestamp for bar, _ in aligned]),
            **{column: [float(getattr(bar, column)) for bar, _ in aligned] for column in TRADING_COLUMNS},
            "buzz": [record.buzz for _, record in aligned],
            **{
                index: [record.indices.get(index) for _, record in aligned]
                for index in SENTIMENT_INDICES
            },
            "mask": [0 if record.is_padding else 1 for _, record in aligned],
        },
        schema=schemas.aligned.schema,
    )


def align_frames(bars: pl.DataFrame, trmi: pl.DataFrame, interval: int) -> pl.DataFrame:
    """
    Frame-level bind_align. Bars must sit on the epoch-aligned interval grid;
    sentiment records at any resolution are aggregated into their window first.
    """
    seconds = epoch_seconds(bars)
    off_grid = seconds % interval != 0
    if off_grid.any():
        raise ContractError(
            f"bar at epoch {int(seconds[off_grid.argmax()])} is not on the {interval}s grid"
        )
    _check_sorted("bar", seconds.tolist(), strict=True)
    _check_sorted("sentiment", epoch_seconds(trmi).tolist(), strict=False)

    windows = aggregate_trmi_frame(trmi, interval)
    aligned = (
        bars.select("timestamp", *TRADING_COLUMNS)
        .join(windows, on="timestamp", how="left")
        .with_columns(pl.col("buzz").fill_null(0.0))
        .with_columns((pl.col("buzz") > 0).cast(pl.Int64).alias("mask"))
        .sort("timestamp")
    )
    padded = aligned.height - int(aligned.get_column("mask").sum())
    logger.info(f"Aligned {aligned.height} bars with sentiment, {padded} intervals padded")
    return aligned
