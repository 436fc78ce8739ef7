import polars as pl
import pytest
from polars import testing as pl_testing

from sentifuse.core.data import bars_frame, bars_from_frame, load_bars, load_trmi, trmi_from_frame
from sentifuse.core.data.streams import check_bars
from sentifuse.core.tables import Filter, schemas
from sentifuse.errors import ContractError, DataError
from test.data.builders import HALF_HOUR, SESSION_OPEN, make_bars, make_trmi


class TestCheckBars:
    def test_valid_bars_pass_through(self):
        bars = make_bars([100.0, 101.0])

        assert check_bars(bars) is bars

    def test_empty(self):
        with pytest.raises(DataError):
            check_bars(make_bars([]))

    def test_non_positive_price(self):
        with pytest.raises(DataError) as exc_info:
            check_bars(make_bars([100.0, 0.0]))

        assert "non-positive price" in str(exc_info.value)

    def test_high_below_close(self):
        bars = make_bars([100.0, 101.0]).with_columns(pl.col("high") * 0.99)

        with pytest.raises(DataError):
            check_bars(bars)

    def test_negative_volume(self):
        bars = make_bars([100.0]).with_columns(pl.lit(-1.0).alias("volume"))

        with pytest.raises(DataError):
            check_bars(bars)

    def test_repeated_timestamp(self):
        with pytest.raises(ContractError):
            check_bars(make_bars([100.0, 101.0], step=0))


class TestLoading:
    def test_bars_round_trip(self, tmp_path):
        bars = make_bars([100.0, 101.5, 99.25])
        path = schemas.bars.write(bars, tmp_path / "bars.csv")

        pl_testing.assert_frame_equal(load_bars(path), bars)

    def test_bars_with_filter(self, tmp_path):
        bars = make_bars([100.0, 101.5, 99.25])
        path = schemas.bars.write(bars, tmp_path / "bars.csv")

        loaded = load_bars(path, filters=[Filter("close", ">", 100.0)])

        assert loaded.get_column("close").to_list() == [101.5]

    def test_trmi_is_sorted_and_keeps_missing(self, tmp_path):
        trmi = make_trmi([(SESSION_OPEN + HALF_HOUR, 1.0, None), (SESSION_OPEN, 2.0, 0.5)])
        path = schemas.trmi.write(trmi, tmp_path / "trmi.csv")

        loaded = load_trmi(path)

        assert loaded.get_column("sentiment").to_list() == [0.5, None]

    @pytest.mark.parametrize("row", [(SESSION_OPEN, 1.0, 1.5), (SESSION_OPEN, -1.0, 0.0)])
    def test_trmi_out_of_range(self, tmp_path, row):
        path = schemas.trmi.write(make_trmi([row]), tmp_path / "trmi.csv")

        with pytest.raises(DataError):
            load_trmi(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            load_bars(tmp_path / "nope.csv")


def test_record_conversions():
    bars = make_bars([100.0, 101.0])
    trmi = make_trmi([(SESSION_OPEN, 0.0, None), (SESSION_OPEN + HALF_HOUR, 1.0, 0.25)])

    pl_testing.assert_frame_equal(bars_frame(bars_from_frame(bars)), bars)
    records = trmi_from_frame(trmi)
    assert records[0].is_padding
    assert records[1].indices["fear"] == -0.25
