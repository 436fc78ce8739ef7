import json
import logging
from pathlib import Path

import numpy as np
import pyarrow as pa
import pyarrow.parquet as pq

from sentifuse.core.models.zoo import Model, ModelConfig, build_model
from sentifuse.errors import DataError

logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "sentifuse-checkpoint"
CHECKPOINT_VERSION = "1"

CHECKPOINT_SCHEMA = pa.schema(
    [
        pa.field("name", pa.string()),
        pa.field("shape", pa.list_(pa.int64())),
        pa.field("values", pa.list_(pa.float64())),
    ]
)


def save_checkpoint(model: Model, path: str | Path) -> Path:
    """
    Writes every named parameter as one Parquet row (name, shape, flattened
    values). The model config travels in the schema metadata.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    named = model.named_parameters()
    table = pa.table(
        {
            "name": [name for name, _ in named],
            "shape": [list(parameter.shape) for _, parameter in named],
            "values": [parameter.data.reshape(-1).tolist() for _, parameter in named],
        },
        schema=CHECKPOINT_SCHEMA,
    ).replace_schema_metadata(
        {
            "format": CHECKPOINT_FORMAT,
            "version": CHECKPOINT_VERSION,
            "variant": model.config.variant,
            "config": json.dumps(model.config.to_dict(), sort_keys=True),
        }
    )
    pq.write_table(table, path)
    logger.debug(f"Saved {len(named)} parameters to {path}")
    return path


def load_checkpoint(path: str | Path) -> Model:
    table = pq.read_table(path)
    metadata = {key.decode(): value.decode() for key, value in (table.schema.metadata or {}).items()}
    if metadata.get("format") != CHECKPOINT_FORMAT:
        raise DataError(f"{path} is not a sentifuse checkpoint")
    if metadata.get("version") != CHECKPOINT_VERSION:
        raise DataError(
            f"{path} has checkpoint version {metadata.get('version')}, expected {CHECKPOINT_VERSION}"
        )

    model = build_model(ModelConfig(**json.loads(metadata["config"])), seed=0)
    rows = table.to_pydict()
    model.load_state_dict(
        {
            name: np.asarray(values, dtype=np.float64).reshape(shape)
            for name, shape, values in zip(rows["name"], rows["shape"], rows["values"])
        }
    )
    return model
