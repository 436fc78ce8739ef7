import logging
from pathlib import Path
from typing import Sequence

import polars as pl

from sentifuse.core.backtest import BacktestReport, metrics_row
from sentifuse.core.experiments import ExperimentResult, render_experiment
from sentifuse.core.models import save_checkpoint
from sentifuse.core.tables import schemas
from sentifuse.core.training import FoldResult, predictions_frame, training_log_frame

logger = logging.getLogger(__name__)


def write_training(folds: Sequence[FoldResult], out_dir: str | Path) -> dict[str, Path]:
    """Predictions, per-epoch losses and one checkpoint per fold."""
    out_dir = Path(out_dir)
    written = {
        "predictions": schemas.predictions.write(predictions_frame(folds), out_dir / "predictions.csv"),
        "training_log": schemas.training_log.write(
            training_log_frame(folds), out_dir / "training_log.csv"
        ),
    }
    for fold in folds:
        if fold.model is not None:
            written[f"fold_{fold.fold}"] = save_checkpoint(
                fold.model, out_dir / "checkpoints" / f"fold_{fold.fold:02d}.parquet"
            )
    logger.debug(f"Wrote {len(written)} training artifacts to {out_dir}")
    return written


def write_backtest(report: BacktestReport, directory: str | Path) -> dict[str, Path]:
    directory = Path(directory)
    return {
        "equity": schemas.equity.write(report.equity, directory / "equity.csv"),
        "monthly": schemas.monthly.write(report.monthly, directory / "monthly.csv"),
        "trades": schemas.trades.write(report.trades_frame(), directory / "trades.csv"),
    }


def write_metrics(reports: dict[str, BacktestReport], path: str | Path) -> Path:
    rows = [metrics_row(report, source) for source, report in reports.items()]
    return schemas.metrics.write(pl.DataFrame(rows, schema=schemas.metrics.schema), path)


def write_report_text(text: str, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text + "\n")
    return path


def write_experiment(result: ExperimentResult, out_dir: str | Path) -> dict[str, Path]:
    out_dir = Path(out_dir)
    return {
        "summary": schemas.experiment_summary.write(
            result.summary, out_dir / f"experiment_{result.name}.csv"
        ),
        "report": write_report_text(
            render_experiment(result), out_dir / f"experiment_{result.name}.txt"
        ),
    }
