import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np
import polars as pl

from sentifuse.core.backtest.metrics import (
    TRADING_DAYS_PER_YEAR,
    annualized_return,
    daily_returns,
    jensen_alpha,
    max_drawdown,
    monthly_returns,
    per_period_rate,
    sharpe,
    yearly_alpha,
)
from sentifuse.core.backtest.positions import DEFAULT_THRESHOLD, SCORE_COLUMNS, signals_to_positions
from sentifuse.core.backtest.simulate import Simulation, Trade, simulate
from sentifuse.core.data.streams import epoch_seconds, to_datetime
from sentifuse.core.tables import Filter, normalize_filters, schemas
from sentifuse.core.tables.filters import filters_to_expr
from sentifuse.core.training.metrics import mean_average_precision
from sentifuse.errors import ConfigurationError, DataError, UndefinedMetricError

logger = logging.getLogger(__name__)


@dataclass
class BacktestConfig:
    threshold: float = DEFAULT_THRESHOLD
    cost_per_side: float = 0.0
    risk_free_annual: float = 0.0
    intervals_per_day: int = 13
    days_per_year: int = TRADING_DAYS_PER_YEAR
    start: str | None = None
    end: str | None = None

    def validate(self) -> None:
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigurationError(f"threshold must lie in [0, 1], got {self.threshold}")
        if self.cost_per_side < 0:
            raise ConfigurationError(f"cost_per_side must be non-negative, got {self.cost_per_side}")
        if self.intervals_per_day < 1 or self.days_per_year < 1:
            raise ConfigurationError("intervals_per_day and days_per_year must be positive")
        start, end = self.period()
        if start is not None and end is not None and start >= end:
            raise ConfigurationError(f"start {self.start} must precede end {self.end}")

    def period(self) -> tuple[datetime | None, datetime | None]:
        return parse_date(self.start), parse_date(self.end)

    def assumptions(self) -> dict[str, str]:
        return {
            "cost_per_side": f"{self.cost_per_side:.6g}",
            "risk_free_annual": f"{self.risk_free_annual:.6g}",
            "benchmark": "buy-and-hold of the traded instrument",
            "shorting": "allowed, no margin constraints",
            "signal": f"argmax class with confidence >= {self.threshold:.6g}, held until the next prediction",
        }


def parse_date(text: str | None) -> datetime | None:
    if text is None:
        return None
    try:
        return datetime.fromisoformat(text.replace("Z", "+00:00")).replace(tzinfo=None)
    except ValueError:
        raise ConfigurationError(f"{text!r} is not an ISO date") from None


def period_filters(start: datetime | None, end: datetime | None) -> list[Filter]:
    """[start, end) on the timestamp column; naive datetimes are read as UTC."""
    filters = []
    if start is not None:
        filters.append(Filter("timestamp", ">=", _utc(start)))
    if end is not None:
        filters.append(Filter("timestamp", "<", _utc(end)))
    return filters


def _utc(moment: datetime) -> datetime:
    return moment.replace(tzinfo=timezone.utc)


@dataclass
class BacktestReport:
    simulation: Simulation
    trades: list[Trade]
    equity: pl.DataFrame
    monthly: pl.DataFrame
    map: float | None
    aar: float | None
    sharpe: float | None
    daily_jensen_alpha: float | None
    yearly_jensen_alpha: float | None
    beta: float | None
    cumulative_return: float
    benchmark_cumulative_return: float
    max_drawdown: float
    start: datetime
    end: datetime
    trading_days: int
    assumptions: dict[str, str] = field(default_factory=dict)
    undefined: dict[str, str] = field(default_factory=dict)

    @property
    def trade_count(self) -> int:
        return len(self.trades)

    @property
    def wins(self) -> int:
        return sum(1 for trade in self.trades if trade.is_win)

    @property
    def losses(self) -> int:
        return self.trade_count - self.wins

    @property
    def mean_monthly_return(self) -> float:
        return float(self.monthly.get_column("ret").mean()) if not self.monthly.is_empty() else 0.0

    @property
    def positive_months(self) -> int:
        return int((self.monthly.get_column("ret") > 0).sum())

    def trades_frame(self) -> pl.DataFrame:
        return pl.DataFrame(
            {
                "entry_timestamp": to_datetime([trade.entry_timestamp for trade in self.trades]),
                "entry_price": [trade.entry_price for trade in self.trades],
                "exit_timestamp": to_datetime([trade.exit_timestamp for trade in self.trades]),
                "exit_price": [trade.exit_price for trade in self.trades],
                "direction": [trade.direction for trade in self.trades],
                "ret": [trade.ret for trade in self.trades],
            },
            schema=schemas.trades.schema,
        )


def _metric(name: str, undefined: dict[str, str], fn, *args) -> float | None:
    try:
        return fn(*args)
    except UndefinedMetricError as e:
        undefined[name] = str(e)
        return None


def aggregate_report(
    simulation: Simulation,
    predictions: pl.DataFrame,
    config: BacktestConfig,
) -> BacktestReport:
    """
    Every reported metric for one simulated span. Metrics without a value
    for the span (zero variance, too few periods) are None and explained in
    `undefined`.
    """
    timestamps = simulation.timestamps
    if len(timestamps) == 0:
        raise DataError("Cannot report on an empty span")

    undefined: dict[str, str] = {}
    days_per_year = config.days_per_year
    daily = daily_returns(timestamps, simulation.returns)
    benchmark_interval = np.zeros(len(simulation.closes))
    benchmark_interval[:-1] = simulation.closes[1:] / simulation.closes[:-1] - 1.0
    benchmark_daily = daily_returns(timestamps, benchmark_interval)
    trading_days = len(daily)

    scores = predictions.select(SCORE_COLUMNS).to_numpy()
    labels = predictions.get_column("label").to_numpy()
    alpha = _metric(
        "jensen_alpha",
        undefined,
        jensen_alpha,
        daily,
        benchmark_daily,
        per_period_rate(config.risk_free_annual, days_per_year),
    )

    return BacktestReport(
        simulation=simulation,
        trades=simulation.trades,
        equity=pl.DataFrame(
            {"timestamp": to_datetime(timestamps), "cumret": simulation.equity[1:]},
            schema=schemas.equity.schema,
        ),
        monthly=monthly_returns(timestamps, simulation.returns),
        map=mean_average_precision(scores, labels) if len(labels) else None,
        aar=_metric(
            "aar", undefined, annualized_return, simulation.cumulative_return, trading_days / days_per_year
        ),
        sharpe=_metric(
            "sharpe",
            undefined,
            sharpe,
            simulation.returns,
            days_per_year * config.intervals_per_day,
            config.risk_free_annual,
        ),
        daily_jensen_alpha=alpha.alpha if alpha else None,
        yearly_jensen_alpha=yearly_alpha(alpha.alpha, days_per_year) if alpha else None,
        beta=alpha.beta if alpha else None,
        cumulative_return=simulation.cumulative_return,
        benchmark_cumulative_return=float(np.prod(1.0 + benchmark_interval) - 1.0),
        max_drawdown=max_drawdown(simulation.equity),
        start=to_datetime(timestamps[:1])[0],
        end=to_datetime(timestamps[-1:])[0],
        trading_days=trading_days,
        assumptions=config.assumptions(),
        undefined=undefined,
    )


def run_backtest(
    predictions: pl.DataFrame, bars: pl.DataFrame, config: BacktestConfig
) -> BacktestReport:
    """Positions, simulation and report for `predictions` traded on `bars`, optionally restricted to a period."""
    config.validate()
    start, end = config.period()
    predictions = predictions.sort("timestamp")
    if start is not None or end is not None:
        expr = filters_to_expr(normalize_filters(period_filters(start, end)))
        bar_start, bar_end = bars.get_column("timestamp").min(), bars.get_column("timestamp").max()
        predictions = predictions.filter(expr)
        bars = bars.filter(expr)
        if bars.is_empty() or predictions.is_empty():
            raise DataError(
                f"Period {config.start}..{config.end} lies outside the data span {bar_start}..{bar_end}"
            )

    positioned = signals_to_positions(predictions, bars, config.threshold)
    simulation = simulate(
        positioned.get_column("position").to_numpy(),
        positioned.get_column("close").to_numpy(),
        config.cost_per_side,
        timestamps=epoch_seconds(positioned),
    )
    report = aggregate_report(simulation, predictions, config)
    logger.info(
        f"Backtest {report.start}..{report.end}: {report.trade_count} trades, "
        f"cumulative return {report.cumulative_return:.4%}"
    )
    return report


def _fmt(value: float | None, percent: bool = True) -> str:
    if value is None:
        return "undefined"
    return f"{value:.2%}" if percent else f"{value:.4f}"


def metrics_row(report: BacktestReport, source: str) -> dict[str, object]:
    return {
        "source": source,
        "map": report.map,
        "aar": report.aar,
        "sr": report.sharpe,
        "dja": report.daily_jensen_alpha,
        "yja": report.yearly_jensen_alpha,
    }


def render_report(reports: dict[str, BacktestReport]) -> str:
    """Plain-text report: one metric row per prediction file, then per-file details."""
    lines = [f"{'source':<32} {'MAP':>8} {'AAR':>9} {'SR':>8} {'DJA':>9} {'YJA':>9}"]
    for source, report in reports.items():
        lines.append(
            f"{source:<32} {_fmt(report.map):>8} {_fmt(report.aar):>9} "
            f"{_fmt(report.sharpe, percent=False):>8} {_fmt(report.daily_jensen_alpha):>9} "
            f"{_fmt(report.yearly_jensen_alpha):>9}"
        )
    for source, report in reports.items():
        lines += [
            "",
            f"[{source}] {report.start:%Y-%m-%d} .. {report.end:%Y-%m-%d} ({report.trading_days} trading days)",
            f"  cumulative return     {_fmt(report.cumulative_return)}",
            f"  benchmark cumulative  {_fmt(report.benchmark_cumulative_return)}",
            f"  max drawdown          {_fmt(report.max_drawdown)}",
            f"  beta                  {_fmt(report.beta, percent=False)}",
            f"  TC / WT / LT          {report.trade_count} / {report.wins} / {report.losses}",
            f"  MR                    {_fmt(report.mean_monthly_return)}",
            f"  positive months       {report.positive_months} of {report.monthly.height}",
        ]
        lines += [f"  assumption {key}: {value}" for key, value in report.assumptions.items()]
        lines += [f"  undefined {key}: {reason}" for key, reason in report.undefined.items()]
    return "\n".join(lines)
