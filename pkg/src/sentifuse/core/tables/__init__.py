from sentifuse.core.tables.csv_table import TIMESTAMP_DTYPE, TIMESTAMP_FORMAT, CsvTable
from sentifuse.core.tables.filters import Filter, InputFilters, normalize_filters
from sentifuse.core.tables.metadata import TableMetadata, TableProtocol, TableSchema
from sentifuse.core.tables.schemas import TABLES, get_table

__all__ = [
    "CsvTable",
    "Filter",
    "InputFilters",
    "TABLES",
    "TIMESTAMP_DTYPE",
    "TIMESTAMP_FORMAT",
    "TableMetadata",
    "TableProtocol",
    "TableSchema",
    "get_table",
    "normalize_filters",
]
