from dataclasses import dataclass
from pathlib import Path
from typing import Any, Protocol, TypedDict

from sentifuse.core.dataframe.frame import Frame


@dataclass
class TableMetadata:
    """
    Information about a table, used for documentation and lookups.
    """

    table_type: str
    description: str
    file_name: str
    producer: str | None = None


class TableColumn(TypedDict):
    name: str
    type: str


@dataclass
class TableSchema:
    columns: list[TableColumn]


class TableProtocol(Protocol):
    table_metadata: TableMetadata

    def __call__(self, path: str | Path, **kwargs: Any) -> Frame: ...

    def get_schema(self) -> TableSchema:
        """
        Returns the declared columns of the table.
        """
        ...
