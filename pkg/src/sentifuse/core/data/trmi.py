import logging
import math
from pathlib import Path
from typing import Sequence

import polars as pl

from sentifuse.core.data.records import (
    SENTIMENT_INDICES,
    PsychVarRecord,
    TrmiPolarity,
    TrmiRecord,
)
from sentifuse.errors import ConfigurationError, ContractError, DataError

logger = logging.getLogger(__name__)

# Fixed PsychVar vocabulary for synthetic data; only the formulas depend on it.
DEFAULT_PSYCHVARS = (
    "praise",
    "criticism",
    "bullish_talk",
    "bearish_talk",
    "worry",
    "reassurance",
    "delight",
    "gloom",
)


def default_polarity() -> TrmiPolarity:
    additive = {
        "sentiment": ("praise", "bullish_talk", "delight"),
        "optimism": ("bullish_talk", "reassurance"),
        "fear": ("worry",),
        "joy": ("delight", "praise"),
    }
    subtractive = {
        "sentiment": ("criticism", "bearish_talk", "gloom"),
        "optimism": ("bearish_talk",),
        "fear": ("reassurance",),
        "joy": ("gloom",),
    }

    signs: dict[tuple[str, str], int] = {}
    for index in SENTIMENT_INDICES:
        for psychvar in DEFAULT_PSYCHVARS:
            if psychvar in additive[index]:
                signs[(index, psychvar)] = 1
            elif psychvar in subtractive[index]:
                signs[(index, psychvar)] = -1
            else:
                signs[(index, psychvar)] = 0
    return TrmiPolarity(signs=signs)


def compute_trmi_from_psychvars(
    rec: PsychVarRecord, polarity: TrmiPolarity, index: str
) -> tuple[float | None, float]:
    """
    Buzz is the sum of absolute PsychVar scores in the record; the index is
    the polarity-signed sum divided by buzz. Zero buzz gives a missing index.
    """
    if not rec.values:
        raise ContractError(f"PsychVar record at {rec.timestamp} is empty")
    if index not in polarity.indices:
        raise ConfigurationError(
            f"Index '{index}' not found in polarity table. Available indices: {polarity.indices}"
        )

    buzz = math.fsum(abs(value) for value in rec.values.values())
    if buzz == 0.0:
        return None, 0.0

    signed = math.fsum(polarity.sign(index, name) * value for name, value in rec.values.items())
    return min(1.0, max(-1.0, signed / buzz)), buzz


def trmi_record_from_psychvars(rec: PsychVarRecord, polarity: TrmiPolarity) -> TrmiRecord:
    values: dict[str, float | None] = {}
    buzz = 0.0
    for index in SENTIMENT_INDICES:
        values[index], buzz = compute_trmi_from_psychvars(rec, polarity, index)
    if buzz == 0.0:
        return TrmiRecord.missing(rec.timestamp)
    return TrmiRecord(timestamp=rec.timestamp, buzz=buzz, indices=values)


def aggregate_trmi(records: Sequence[TrmiRecord], timestamp: int | None = None) -> TrmiRecord:
    """
    Buzz-weighted mean of each index over the records where it is present.
    The aggregate buzz is the total buzz of the window.
    """
    if timestamp is None:
        timestamp = records[0].timestamp if records else 0

    total_buzz = math.fsum(record.buzz for record in records)
    if total_buzz == 0.0:
        return TrmiRecord.missing(timestamp)

    values: dict[str, float | None] = {}
    for index in SENTIMENT_INDICES:
        contributors = [
            (record.buzz, record.indices[index])
            for record in records
            if record.indices.get(index) is not None and record.buzz > 0.0
        ]
        if not contributors:
            values[index] = None
        elif len(contributors) == 1:
            values[index] = contributors[0][1]
        else:
            weight = math.fsum(buzz for buzz, _ in contributors)
            values[index] = math.fsum(buzz * value for buzz, value in contributors) / weight

    return TrmiRecord(timestamp=timestamp, buzz=total_buzz, indices=values)


def window_start(timestamp_expr: pl.Expr, interval: int) -> pl.Expr:
    epoch = timestamp_expr.dt.epoch("s")
    floored = (epoch - epoch % interval) * 1_000_000
    return floored.cast(pl.Datetime("us")).dt.replace_time_zone("UTC")


def aggregate_trmi_frame(trmi: pl.DataFrame, interval: int) -> pl.DataFrame:
    """
    Frame-level aggregate_trmi: one row per interval window that holds at
    least one record, labeled by the window start.
    """
    present_buzz = {
        index: pl.col("buzz").filter(pl.col(index).is_not_null() & (pl.col("buzz") > 0)).sum()
        for index in SENTIMENT_INDICES
    }
    aggregated = (
        trmi.with_columns(window_start(pl.col("timestamp"), interval).alias("window"))
        .group_by("window")
        .agg(
            pl.col("buzz").sum().alias("buzz"),
            *[
                (
                    (pl.col("buzz") * pl.col(index)).filter(pl.col("buzz") > 0).sum()
                    / present_buzz[index]
                ).alias(index)
                for index in SENTIMENT_INDICES
            ],
            *[present_buzz[index].alias(f"_{index}_weight") for index in SENTIMENT_INDICES],
        )
        .with_columns(
            pl.when((pl.col(f"_{index}_weight") > 0) & (pl.col("buzz") > 0))
            .then(pl.col(index))
            .otherwise(None)
            .alias(index)
            for index in SENTIMENT_INDICES
        )
        .rename({"window": "timestamp"})
        .select("timestamp", "buzz", *SENTIMENT_INDICES)
        .sort("timestamp")
    )
    logger.info(f"Aggregated {trmi.height} sentiment records into {aggregated.height} windows")
    return aggregated


def psychvars_to_trmi(psychvars: pl.DataFrame, polarity: TrmiPolarity) -> pl.DataFrame:
    """Applies compute_trmi_from_psychvars to every row of a PsychVar frame."""
    names = [column for column in psychvars.columns if column != "timestamp"]
    if not names:
        raise DataError("PsychVar frame has no PsychVar columns")
    for index in SENTIMENT_INDICES:
        if index not in polarity.indices:
            raise ConfigurationError(
                f"Index '{index}' not found in polarity table. Available indices: {polarity.indices}"
            )

    buzz = pl.sum_horizontal(pl.col(name).fill_null(0.0).abs() for name in names)
    indices = {
        index: pl.sum_horizontal(
            pl.col(name).fill_null(0.0) * polarity.sign(index, name) for name in names
        )
        / pl.col("buzz")
        for index in SENTIMENT_INDICES
    }
    return (
        psychvars.with_columns(buzz.alias("buzz"))
        .with_columns(
            pl.when(pl.col("buzz") > 0).then(expr.clip(-1.0, 1.0)).otherwise(None).alias(index)
            for index, expr in indices.items()
        )
        .select("timestamp", "buzz", *SENTIMENT_INDICES)
    )


def psychvar_records(psychvars: pl.DataFrame, asset: str = "") -> list[PsychVarRecord]:
    names = [column for column in psychvars.columns if column != "timestamp"]
    return [
        PsychVarRecord(
            timestamp=row["timestamp"],
            values={name: row[name] or 0.0 for name in names},
            asset=asset,
        )
        for row in psychvars.with_columns(pl.col("timestamp").dt.epoch("s")).iter_rows(named=True)
    ]


def load_polarity(path: str | Path) -> TrmiPolarity:
    frame = pl.read_csv(path, infer_schema=False)
    missing = {"index", "psychvar", "polarity"} - set(frame.columns)
    if missing:
        raise DataError(f"Polarity table {path} is missing columns {sorted(missing)}")

    signs: dict[tuple[str, str], int] = {}
    for index, psychvar, text in frame.select("index", "psychvar", "polarity").iter_rows():
        sign = int(text)
        if sign not in (-1, 0, 1):
            raise DataError(f"Polarity for ({index}, {psychvar}) must be +1, -1 or 0, got {sign}")
        signs[(index, psychvar)] = sign
    return TrmiPolarity(signs=signs)


def polarity_frame(polarity: TrmiPolarity) -> pl.DataFrame:
    rows = sorted(polarity.signs.items())
    return pl.DataFrame(
        {
            "index": [index for (index, _), _ in rows],
            "psychvar": [psychvar for (_, psychvar), _ in rows],
            "polarity": [sign for _, sign in rows],
        },
        schema={"index": pl.String, "psychvar": pl.String, "polarity": pl.Int64},
    )
