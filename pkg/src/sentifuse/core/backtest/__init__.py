from sentifuse.core.backtest.buzz import GROUPINGS, all_buzz_stats, buzz_stats
from sentifuse.core.backtest.metrics import (
    TRADING_DAYS_PER_YEAR,
    JensenAlpha,
    annualized_return,
    compound_by,
    daily_returns,
    jensen_alpha,
    max_drawdown,
    monthly_returns,
    per_period_rate,
    sharpe,
    yearly_alpha,
)
from sentifuse.core.backtest.positions import (
    DEFAULT_THRESHOLD,
    SCORE_COLUMNS,
    signal_positions,
    signals_to_positions,
)
from sentifuse.core.backtest.report import (
    BacktestConfig,
    BacktestReport,
    aggregate_report,
    metrics_row,
    render_report,
    run_backtest,
)
from sentifuse.core.backtest.simulate import Simulation, Trade, closed_trades, simulate

__all__ = [
    "DEFAULT_THRESHOLD",
    "GROUPINGS",
    "SCORE_COLUMNS",
    "TRADING_DAYS_PER_YEAR",
    "BacktestConfig",
    "BacktestReport",
    "JensenAlpha",
    "Simulation",
    "Trade",
    "aggregate_report",
    "all_buzz_stats",
    "annualized_return",
    "buzz_stats",
    "closed_trades",
    "compound_by",
    "daily_returns",
    "jensen_alpha",
    "max_drawdown",
    "metrics_row",
    "monthly_returns",
    "per_period_rate",
    "render_report",
    "run_backtest",
    "sharpe",
    "signal_positions",
    "signals_to_positions",
    "simulate",
    "yearly_alpha",
]
