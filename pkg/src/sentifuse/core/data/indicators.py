import logging

import polars as pl

from sentifuse.errors import DatasetError

logger = logging.getLogger(__name__)

INDICATOR_COLUMNS = ("sma_10", "ema_10", "rsi_14", "macd", "macd_signal", "bb_pct_b")
# The slow MACD average needs 26 closes before it means anything.
WARMUP_BARS = 26
RSI_NEUTRAL = 50.0
BOLLINGER_WINDOW = 20
BOLLINGER_WIDTH = 2.0
# Rolling variance of a constant window is not exactly zero.
BAND_FLOOR = 1e-6


def sma(expr: pl.Expr, window: int) -> pl.Expr:
    return expr.rolling_mean(window_size=window)


def ema(expr: pl.Expr, span: int) -> pl.Expr:
    return expr.ewm_mean(span=span, adjust=False)


def rsi(expr: pl.Expr, period: int = 14) -> pl.Expr:
    """
    Relative strength index with simple moving averages of gains and losses.
    Windows with no movement at all are emitted as 50.
    """
    delta = expr.diff()
    gain = delta.clip(lower_bound=0.0).rolling_mean(window_size=period)
    loss = (-delta).clip(lower_bound=0.0).rolling_mean(window_size=period)
    movement = gain + loss
    return pl.when(movement > 0).then(100.0 * gain / movement).otherwise(RSI_NEUTRAL)


def macd(expr: pl.Expr, fast: int = 12, slow: int = 26) -> pl.Expr:
    return ema(expr, fast) - ema(expr, slow)


def bollinger_pct_b(expr: pl.Expr, window: int = BOLLINGER_WINDOW, width: float = BOLLINGER_WIDTH) -> pl.Expr:
    """
    %B = (close - lower) / (upper - lower) over a trailing window with
    population standard deviation, null before the window fills. A band
    narrower than BAND_FLOOR of the mean gives 0.5.
    """
    mid = expr.rolling_mean(window_size=window)
    band = 2.0 * width * expr.rolling_std(window_size=window, ddof=0)
    floor = BAND_FLOOR * pl.max_horizontal(pl.lit(1.0), mid.abs())
    return (
        pl.when(band.is_null())
        .then(pl.lit(None, dtype=pl.Float64))
        .when(band > floor)
        .then(0.5 + (expr - mid) / band)
        .otherwise(0.5)
    )


def compute_indicators(bars: pl.DataFrame) -> pl.DataFrame:
    """
    Per-bar SMA(10), EMA(10), RSI(14), MACD(12, 26) with its 9-period signal
    line and Bollinger %B(20, 2). The first WARMUP_BARS - 1 rows are flagged
    in `warmup`.
    """
    if bars.height < WARMUP_BARS:
        raise DatasetError(
            f"Indicators need at least {WARMUP_BARS} bars of warm-up, got {bars.height}"
        )

    close = pl.col("close")
    indicators = bars.select(
        "timestamp",
        sma(close, 10).alias("sma_10"),
        ema(close, 10).alias("ema_10"),
        rsi(close, 14).alias("rsi_14"),
        macd(close).alias("macd"),
        ema(macd(close), 9).alias("macd_signal"),
        bollinger_pct_b(close).alias("bb_pct_b"),
        (pl.int_range(pl.len()) < WARMUP_BARS - 1).alias("warmup"),
    )
    logger.debug(f"Computed indicators for {indicators.height} bars")
    return indicators
