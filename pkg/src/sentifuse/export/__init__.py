from sentifuse.export.artifacts import (
    write_backtest,
    write_experiment,
    write_metrics,
    write_report_text,
    write_training,
)

__all__ = [
    "write_backtest",
    "write_experiment",
    "write_metrics",
    "write_report_text",
    "write_training",
]
