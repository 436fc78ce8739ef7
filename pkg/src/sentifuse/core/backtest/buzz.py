from typing import Literal

import polars as pl

from sentifuse.core.tables import schemas
from sentifuse.errors import ConfigurationError, ContractError

Grouping = Literal["hour_of_day", "calendar_month"]
GROUPINGS: tuple[Grouping, ...] = ("hour_of_day", "calendar_month")

_GROUP_EXPRS = {
    "hour_of_day": pl.col("timestamp").dt.hour(),
    "calendar_month": pl.col("timestamp").dt.month(),
}


def buzz_stats(trmi: pl.DataFrame, grouping: Grouping = "hour_of_day") -> pl.DataFrame:
    """
    Five-number summary of buzz per hour of day (0-23, UTC) or calendar
    month (1-12), with linearly interpolated quartiles. Groups without
    records do not appear.
    """
    if grouping not in _GROUP_EXPRS:
        raise ConfigurationError(f"grouping must be one of {GROUPINGS}, got {grouping!r}")
    if trmi.is_empty():
        raise ContractError("buzz_stats needs at least one record")

    buzz = pl.col("buzz")
    return (
        trmi.lazy()
        .select(_GROUP_EXPRS[grouping].cast(pl.Int64).alias("group"), buzz)
        .group_by("group")
        .agg(
            pl.len().cast(pl.Int64).alias("count"),
            buzz.min().alias("min"),
            buzz.quantile(0.25, interpolation="linear").alias("q1"),
            buzz.median().alias("median"),
            buzz.quantile(0.75, interpolation="linear").alias("q3"),
            buzz.max().alias("max"),
        )
        .with_columns(pl.lit(grouping).alias("grouping"))
        .select(list(schemas.buzz_stats.schema))
        .cast(schemas.buzz_stats.schema)
        .sort("group")
        .collect()
    )


def all_buzz_stats(trmi: pl.DataFrame) -> pl.DataFrame:
    return pl.concat([buzz_stats(trmi, grouping) for grouping in GROUPINGS])
