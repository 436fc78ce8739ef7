from dataclasses import dataclass
from typing import Sequence

import numpy as np
import polars as pl

from sentifuse.core.data.streams import to_datetime
from sentifuse.errors import UndefinedMetricError

TRADING_DAYS_PER_YEAR = 252
# Spreads below this (relative to the mean) count as zero variance.
VARIANCE_FLOOR = 1e-14


def per_period_rate(annual_rate: float, periods_per_year: float) -> float:
    return (1.0 + annual_rate) ** (1.0 / periods_per_year) - 1.0


def sharpe(
    returns: Sequence[float], periods_per_year: float, risk_free_annual: float = 0.0
) -> float:
    """Annualized mean excess return over its sample standard deviation."""
    returns = np.asarray(returns, dtype=np.float64)
    if returns.size < 2:
        raise UndefinedMetricError(f"Sharpe ratio needs at least 2 returns, got {returns.size}")
    excess = returns - per_period_rate(risk_free_annual, periods_per_year)
    mean = excess.mean()
    std = excess.std(ddof=1)
    if std <= VARIANCE_FLOOR * max(1.0, abs(mean)):
        raise UndefinedMetricError("Sharpe ratio is undefined for zero-variance returns")
    return float(mean / std * np.sqrt(periods_per_year))


@dataclass(frozen=True)
class JensenAlpha:
    alpha: float
    beta: float


def jensen_alpha(
    strategy: Sequence[float],
    benchmark: Sequence[float],
    risk_free_per_period: float = 0.0,
) -> JensenAlpha:
    """Least-squares intercept and slope of strategy excess returns on benchmark excess returns."""
    strategy = np.asarray(strategy, dtype=np.float64) - risk_free_per_period
    benchmark = np.asarray(benchmark, dtype=np.float64) - risk_free_per_period
    if strategy.size != benchmark.size:
        raise UndefinedMetricError(
            f"Strategy and benchmark differ in length: {strategy.size} and {benchmark.size}"
        )
    if strategy.size < 3:
        raise UndefinedMetricError(f"Jensen alpha needs at least 3 periods, got {strategy.size}")

    centered_benchmark = benchmark - benchmark.mean()
    variance = float(np.dot(centered_benchmark, centered_benchmark))
    if variance <= VARIANCE_FLOOR * max(1.0, float(np.abs(benchmark).max())):
        raise UndefinedMetricError("Jensen alpha is undefined for a zero-variance benchmark")
    beta = float(np.dot(centered_benchmark, strategy - strategy.mean()) / variance)
    return JensenAlpha(alpha=float(strategy.mean() - beta * benchmark.mean()), beta=beta)


def yearly_alpha(daily_alpha: float, days_per_year: int = TRADING_DAYS_PER_YEAR) -> float:
    return (1.0 + daily_alpha) ** days_per_year - 1.0


def annualized_return(cumulative: float, years: float) -> float:
    if years <= 0:
        raise UndefinedMetricError(f"Annualized return needs a positive span, got {years} years")
    return (1.0 + cumulative) ** (1.0 / years) - 1.0


def max_drawdown(equity: Sequence[float]) -> float:
    """Largest peak-to-trough loss of wealth (1 + equity) as a positive fraction."""
    wealth = 1.0 + np.asarray(equity, dtype=np.float64)
    peaks = np.maximum.accumulate(wealth)
    return float(np.max(1.0 - wealth / peaks))


def compound_by(timestamps: np.ndarray, returns: np.ndarray, period: str) -> pl.DataFrame:
    """
    Compounds interval returns per calendar period of their UTC timestamps;
    `period` is a polars truncation string ("1d", "1mo").
    """
    return (
        pl.DataFrame({"timestamp": to_datetime(timestamps), "ret": returns})
        .group_by(pl.col("timestamp").dt.truncate(period).alias("period"), maintain_order=True)
        .agg(((pl.col("ret") + 1.0).product() - 1.0).alias("ret"))
        .sort("period")
    )


def daily_returns(timestamps: np.ndarray, returns: np.ndarray) -> np.ndarray:
    return compound_by(timestamps, returns, "1d").get_column("ret").to_numpy()


def monthly_returns(timestamps: np.ndarray, returns: np.ndarray) -> pl.DataFrame:
    return compound_by(timestamps, returns, "1mo").select(
        pl.col("period").dt.strftime("%Y-%m").alias("month"), "ret"
    )
