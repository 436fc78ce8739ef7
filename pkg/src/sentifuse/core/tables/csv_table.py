import logging
from pathlib import Path
from typing import Any, Mapping, Sequence

import polars as pl

from sentifuse.core.dataframe import Frame
from sentifuse.core.tables.filters import InputFilters, filters_to_expr, normalize_filters
from sentifuse.core.tables.metadata import TableMetadata, TableProtocol, TableSchema
from sentifuse.errors import DataError

logger = logging.getLogger(__name__)

TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M:%SZ"
TIMESTAMP_DTYPE = pl.Datetime("us", "UTC")


class CsvTable(TableProtocol):
    """
    A CSV file format with a declared schema.

    Timestamp columns are stored as ISO-8601 UTC text (`2015-01-02T14:30:00Z`)
    and read back as timezone-aware datetimes. Columns not in the schema are
    kept and cast to `extra_dtype` when one is given (the PsychVar file has a
    column per PsychVar), otherwise dropped.
    """

    def __init__(
        self,
        name: str,
        schema: Mapping[str, pl.DataType | type[pl.DataType]],
        description: str = "",
        file_name: str | None = None,
        producer: str | None = None,
        extra_dtype: pl.DataType | type[pl.DataType] | None = None,
    ):
        self.name = name
        self.schema = dict(schema)
        self.extra_dtype = extra_dtype
        self.timestamp_columns = [
            column for column, dtype in self.schema.items() if dtype == TIMESTAMP_DTYPE
        ]
        self.table_metadata = TableMetadata(
            table_type="CSV",
            description=description,
            file_name=file_name or f"{name}.csv",
            producer=producer,
        )

    def get_schema(self) -> TableSchema:
        return TableSchema(
            columns=[{"name": column, "type": str(dtype)} for column, dtype in self.schema.items()]
        )

    def __call__(
        self,
        path: str | Path,
        filters: InputFilters | None = None,
        columns: Sequence[str] | None = None,
        **kwargs: Any,
    ) -> Frame:
        path = Path(path)
        if not path.exists():
            raise DataError(f"{self.name}: file {path} does not exist")

        df = pl.scan_csv(path, infer_schema=False)
        present = df.collect_schema().names()
        missing = [column for column in self.schema if column not in present]
        if missing:
            raise DataError(f"{self.name}: file {path} is missing columns {missing}")

        extra = [column for column in present if column not in self.schema]
        df = df.with_columns(self._parse(column, dtype) for column, dtype in self.schema.items())
        if self.extra_dtype is not None and extra:
            df = df.with_columns(pl.col(extra).cast(self.extra_dtype))
        else:
            df = df.select(list(self.schema))

        filter_expr = filters_to_expr(normalize_filters(filters))
        if filter_expr is not None:
            df = df.filter(filter_expr)

        if columns:
            df = df.select(columns)

        return df

    def read(self, path: str | Path, **kwargs: Any) -> pl.DataFrame:
        try:
            return self(path, **kwargs).collect()
        except pl.exceptions.PolarsError as e:
            raise DataError(f"{self.name}: could not parse {path}: {e}") from e

    def write(self, frame: pl.DataFrame, path: str | Path) -> Path:
        """
        Writes `frame` in the declared column order; empty frames produce a
        header-only file.
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)

        missing = [column for column in self.schema if column not in frame.columns]
        if missing:
            raise DataError(f"{self.name}: frame is missing columns {missing}")

        extra = [column for column in frame.columns if column not in self.schema]
        ordered = list(self.schema) + (extra if self.extra_dtype is not None else [])
        out = frame.select(ordered).with_columns(
            pl.col(column).dt.strftime(TIMESTAMP_FORMAT) for column in self.timestamp_columns
        )
        out.write_csv(path)
        logger.debug(f"{self.name}: wrote {out.height} rows to {path}")
        return path

    def empty(self) -> pl.DataFrame:
        return pl.DataFrame(schema=self.schema)

    def _parse(self, column: str, dtype: Any) -> pl.Expr:
        if dtype == TIMESTAMP_DTYPE:
            return (
                pl.col(column)
                .str.to_datetime(TIMESTAMP_FORMAT, time_unit="us")
                .dt.replace_time_zone("UTC")
            )
        if dtype == pl.String:
            return pl.col(column)
        return pl.col(column).cast(dtype)
