import polars as pl

from sentifuse.core.tables.csv_table import TIMESTAMP_DTYPE, CsvTable

bars = CsvTable(
    name="bars",
    schema={
        "timestamp": TIMESTAMP_DTYPE,
        "open": pl.Float64,
        "high": pl.Float64,
        "low": pl.Float64,
        "close": pl.Float64,
        "volume": pl.Float64,
    },
    description="One OHLCV row per interval; the timestamp is the interval start.",
    producer="gen-data",
)

trmi = CsvTable(
    name="trmi",
    schema={
        "timestamp": TIMESTAMP_DTYPE,
        "buzz": pl.Float64,
        "sentiment": pl.Float64,
        "optimism": pl.Float64,
        "fear": pl.Float64,
        "joy": pl.Float64,
    },
    description="Buzz and sentiment indices; empty cells are missing indices.",
    producer="gen-data",
)

trmi_raw = CsvTable(
    name="trmi_raw",
    schema=dict(trmi.schema),
    description="Sub-interval sentiment records before buzz-weighted aggregation.",
    producer="gen-data",
)

psychvars = CsvTable(
    name="psychvars",
    schema={"timestamp": TIMESTAMP_DTYPE},
    description="Raw signed PsychVar scores, one column per PsychVar.",
    producer="gen-data --psychvars",
    extra_dtype=pl.Float64,
)

polarity = CsvTable(
    name="polarity",
    schema={"index": pl.String, "psychvar": pl.String, "polarity": pl.Int64},
    description="Whether each PsychVar adds to (+1), subtracts from (-1) or is irrelevant (0) to an index.",
    producer="gen-data --psychvars",
)

aligned = CsvTable(
    name="aligned",
    schema={
        "timestamp": TIMESTAMP_DTYPE,
        "open": pl.Float64,
        "high": pl.Float64,
        "low": pl.Float64,
        "close": pl.Float64,
        "volume": pl.Float64,
        "buzz": pl.Float64,
        "sentiment": pl.Float64,
        "optimism": pl.Float64,
        "fear": pl.Float64,
        "joy": pl.Float64,
        "mask": pl.Int64,
    },
    description="Bars right-joined with interval sentiment; mask=0 rows are padding.",
    producer="preprocess",
)

predictions = CsvTable(
    name="predictions",
    schema={
        "timestamp": TIMESTAMP_DTYPE,
        "score_down": pl.Float64,
        "score_flat": pl.Float64,
        "score_up": pl.Float64,
        "label": pl.Int64,
    },
    description="Out-of-sample softmax scores per decision time with the realized label.",
    producer="train",
)

training_log = CsvTable(
    name="training_log",
    schema={"fold": pl.Int64, "epoch": pl.Int64, "loss": pl.Float64},
    description="Mean training loss per fold and epoch.",
    producer="train",
)

equity = CsvTable(
    name="equity",
    schema={"timestamp": TIMESTAMP_DTYPE, "cumret": pl.Float64},
    description="Cumulative strategy return after each interval.",
    producer="backtest",
)

monthly = CsvTable(
    name="monthly",
    schema={"month": pl.String, "ret": pl.Float64},
    description="Compounded strategy return per calendar month.",
    producer="backtest",
)

trades = CsvTable(
    name="trades",
    schema={
        "entry_timestamp": TIMESTAMP_DTYPE,
        "entry_price": pl.Float64,
        "exit_timestamp": TIMESTAMP_DTYPE,
        "exit_price": pl.Float64,
        "direction": pl.String,
        "ret": pl.Float64,
    },
    description="Closed trades.",
    producer="backtest",
)

buzz_stats = CsvTable(
    name="buzz_stats",
    schema={
        "grouping": pl.String,
        "group": pl.Int64,
        "count": pl.Int64,
        "min": pl.Float64,
        "q1": pl.Float64,
        "median": pl.Float64,
        "q3": pl.Float64,
        "max": pl.Float64,
    },
    description="Five-number summaries of buzz per hour of day or calendar month.",
    producer="backtest",
)

metrics = CsvTable(
    name="metrics",
    schema={
        "source": pl.String,
        "map": pl.Float64,
        "aar": pl.Float64,
        "sr": pl.Float64,
        "dja": pl.Float64,
        "yja": pl.Float64,
    },
    description="One metric row per prediction file, in MAP, AAR, SR, DJA, YJA order.",
    producer="backtest",
)

experiment_summary = CsvTable(
    name="experiment_summary",
    schema={
        "experiment": pl.String,
        "run": pl.String,
        "variant": pl.String,
        "density": pl.Float64,
        "accuracy": pl.Float64,
        "map": pl.Float64,
        "samples": pl.Int64,
    },
    description="Out-of-sample accuracy and MAP per trained configuration of a canned experiment.",
    producer="experiment",
)

TABLES: dict[str, CsvTable] = {
    table.name: table
    for table in (
        bars,
        trmi,
        trmi_raw,
        psychvars,
        polarity,
        aligned,
        predictions,
        training_log,
        equity,
        monthly,
        trades,
        buzz_stats,
        metrics,
        experiment_summary,
    )
}


def get_table(name: str) -> CsvTable:
    table = TABLES.get(name)
    if table is None:
        raise KeyError(f"Table '{name}' not found. Available tables: {list(TABLES)}")
    return table
