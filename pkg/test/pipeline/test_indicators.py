import numpy as np
import polars as pl
import pytest
from numpy import testing as np_testing

from sentifuse.core.data import INDICATOR_COLUMNS, compute_indicators
from sentifuse.core.data.indicators import WARMUP_BARS, bollinger_pct_b
from sentifuse.errors import DatasetError
from test.data.builders import make_bars


def test_needs_warm_up_bars():
    with pytest.raises(DatasetError) as exc_info:
        compute_indicators(make_bars([100.0] * (WARMUP_BARS - 1)))

    assert f"at least {WARMUP_BARS} bars" in str(exc_info.value)


def test_columns_and_warm_up_flag():
    closes = 100.0 + np.sin(np.arange(40) / 3.0)

    indicators = compute_indicators(make_bars(list(closes)))

    assert indicators.columns == ["timestamp", *INDICATOR_COLUMNS, "warmup"]
    assert indicators.get_column("warmup").to_list() == [True] * (WARMUP_BARS - 1) + [False] * (
        40 - WARMUP_BARS + 1
    )
    after_warm_up = indicators.slice(WARMUP_BARS - 1)
    assert after_warm_up.select(INDICATOR_COLUMNS).null_count().sum_horizontal().item() == 0


def test_flat_prices():
    indicators = compute_indicators(make_bars([50.0] * 30))

    last = indicators.row(-1, named=True)
    assert last["rsi_14"] == 50.0
    assert last["bb_pct_b"] == 0.5
    assert last["sma_10"] == pytest.approx(50.0)
    assert last["macd"] == pytest.approx(0.0)


def test_rising_prices_saturate_rsi():
    indicators = compute_indicators(make_bars(list(100.0 + np.arange(30.0))))

    assert indicators.get_column("rsi_14")[-1] == pytest.approx(100.0)
    assert indicators.get_column("macd")[-1] > 0


def test_sma_matches_numpy():
    closes = np.random.default_rng(0).uniform(90, 110, size=30)

    indicators = compute_indicators(make_bars(list(closes)))

    np_testing.assert_allclose(
        indicators.get_column("sma_10").to_numpy()[9:], np.convolve(closes, np.ones(10) / 10, mode="valid")
    )


def _pct_b(closes, **kwargs):
    return pl.DataFrame({"close": closes}).select(bollinger_pct_b(pl.col("close"), **kwargs)).to_series()


def test_bollinger_pct_b():
    closes = np.array([1.0, 2.0, 3.0, 4.0, 5.0])

    out = _pct_b(closes, window=5, width=2.0)

    assert out[:4].null_count() == 4
    std = closes.std()
    assert out[4] == pytest.approx(0.5 + 2.0 / (4.0 * std))


def test_bollinger_short_series_is_all_null():
    assert _pct_b(np.ones(3), window=5).null_count() == 3


def test_bollinger_matches_population_std():
    closes = 100.0 + np.random.default_rng(0).normal(size=30)

    out = _pct_b(closes, window=20, width=2.0).to_numpy()

    for t in range(19, 30):
        window = closes[t - 19 : t + 1]
        expected = 0.5 + (closes[t] - window.mean()) / (4.0 * window.std())
        assert out[t] == pytest.approx(expected, rel=1e-6)
