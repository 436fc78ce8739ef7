import numpy as np
import polars as pl
import pytest
from polars import testing as pl_testing

from sentifuse.core.data import (
    PsychVarRecord,
    TrmiPolarity,
    TrmiRecord,
    aggregate_trmi,
    aggregate_trmi_frame,
    compute_trmi_from_psychvars,
    default_polarity,
    load_polarity,
    psychvars_to_trmi,
)
from sentifuse.core.data.records import SENTIMENT_INDICES
from sentifuse.core.data.streams import epoch_seconds, trmi_frame
from sentifuse.core.data.trmi import polarity_frame
from sentifuse.core.tables import schemas
from sentifuse.errors import ConfigurationError, ContractError, DataError

POLARITY = TrmiPolarity(
    signs={(index, name): sign for index in SENTIMENT_INDICES for name, sign in (("p1", 1), ("p2", -1), ("p3", 0))}
)


def _record(timestamp: int, buzz: float, value: float | None) -> TrmiRecord:
    return TrmiRecord(timestamp, buzz, {index: value for index in SENTIMENT_INDICES})


class TestComputeTrmi:
    @pytest.mark.parametrize(
        ("values", "expected_trmi", "expected_buzz"),
        [
            ({"p1": 0.4, "p2": -0.2, "p3": 0.1}, 0.6 / 0.7, 0.7),
            ({"p1": 0.5}, 1.0, 0.5),
            ({"p2": 0.3}, -1.0, 0.3),
            ({"p3": 0.9}, 0.0, 0.9),
        ],
    )
    def test_examples(self, values, expected_trmi, expected_buzz):
        trmi, buzz = compute_trmi_from_psychvars(PsychVarRecord(0, values), POLARITY, "sentiment")

        assert trmi == pytest.approx(expected_trmi, abs=1e-12)
        assert buzz == pytest.approx(expected_buzz, abs=1e-12)

    def test_zero_buzz_is_missing(self):
        assert compute_trmi_from_psychvars(PsychVarRecord(0, {"p1": 0.0}), POLARITY, "joy") == (None, 0.0)

    def test_empty_record(self):
        with pytest.raises(ContractError):
            compute_trmi_from_psychvars(PsychVarRecord(0, {}), POLARITY, "joy")

    def test_unknown_index(self):
        with pytest.raises(ConfigurationError) as exc_info:
            compute_trmi_from_psychvars(PsychVarRecord(0, {"p1": 1.0}), POLARITY, "greed")

        assert "Index 'greed' not found" in str(exc_info.value)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(0)
        names = [f"v{i}" for i in range(6)]
        signs = rng.choice([-1, 0, 1], size=len(names))
        polarity = TrmiPolarity({("sentiment", name): int(sign) for name, sign in zip(names, signs)})

        for _ in range(1000):
            values = dict(zip(names, rng.normal(size=len(names))))
            trmi, buzz = compute_trmi_from_psychvars(PsychVarRecord(0, values), polarity, "sentiment")

            expected_buzz = sum(abs(v) for v in values.values())
            expected = sum(int(s) * values[n] for n, s in zip(names, signs)) / expected_buzz
            assert buzz == pytest.approx(expected_buzz, abs=1e-12)
            assert trmi == pytest.approx(expected, abs=1e-12)
            assert abs(trmi) <= 1.0

    def test_frame_version_matches_records(self):
        rng = np.random.default_rng(1)
        psychvars = pl.DataFrame(
            {
                "timestamp": pl.Series([0, 60, 120]).cast(pl.Datetime("us")).dt.replace_time_zone("UTC"),
                "p1": rng.uniform(0, 1, 3),
                "p2": rng.uniform(0, 1, 3),
                "p3": [0.0, 0.0, 0.0],
            }
        )

        frame = psychvars_to_trmi(psychvars, POLARITY)

        for row in psychvars.iter_rows(named=True):
            values = {name: row[name] for name in ("p1", "p2", "p3")}
            trmi, buzz = compute_trmi_from_psychvars(PsychVarRecord(0, values), POLARITY, "fear")
            match = frame.filter(pl.col("timestamp") == row["timestamp"])
            assert match.get_column("buzz")[0] == pytest.approx(buzz)
            assert match.get_column("fear")[0] == pytest.approx(trmi)


class TestAggregateTrmi:
    def test_buzz_weighted_mean(self):
        aggregated = aggregate_trmi([_record(0, 2.0, 0.5), _record(10, 1.0, -0.1)])

        assert aggregated.indices["sentiment"] == pytest.approx(0.3)
        assert aggregated.buzz == 3.0

    def test_equal_buzz_is_arithmetic_mean(self):
        aggregated = aggregate_trmi([_record(0, 1.5, 0.2), _record(1, 1.5, 0.6), _record(2, 1.5, -0.2)])

        assert aggregated.indices["joy"] == pytest.approx(0.2)

    def test_missing_index_is_skipped(self):
        partial = TrmiRecord(0, 5.0, {"sentiment": None, "optimism": 0.4, "fear": 0.1, "joy": 0.2})

        aggregated = aggregate_trmi([partial, _record(1, 1.0, 0.8)])

        assert aggregated.indices["sentiment"] == 0.8
        assert aggregated.indices["optimism"] == pytest.approx((5.0 * 0.4 + 0.8) / 6.0)

    @pytest.mark.parametrize("records", [[], [TrmiRecord.missing(0)]])
    def test_zero_buzz_is_padding(self, records):
        aggregated = aggregate_trmi(records, timestamp=0)

        assert aggregated.is_padding
        assert not any(aggregated.present.values())

    def test_split_and_reaggregate(self):
        rng = np.random.default_rng(2)
        records = [_record(i, float(rng.uniform(0.1, 3.0)), float(rng.uniform(-1, 1))) for i in range(9)]

        whole = aggregate_trmi(records)
        halves = [aggregate_trmi(records[:4]), aggregate_trmi(records[4:])]
        rejoined = aggregate_trmi(halves)

        for index in SENTIMENT_INDICES:
            assert rejoined.indices[index] == pytest.approx(whole.indices[index], abs=1e-12)
        assert rejoined.buzz == pytest.approx(whole.buzz)

    @pytest.mark.parametrize("seed", range(20))
    def test_record_order_does_not_matter(self, seed):
        rng = np.random.default_rng(seed)
        records = [_record(i, float(rng.uniform(0.0, 3.0)), float(rng.uniform(-1, 1))) for i in range(8)]
        records.append(TrmiRecord(8, 2.0, {index: None if index == "fear" else 0.5 for index in SENTIMENT_INDICES}))

        original = aggregate_trmi(records, timestamp=0)
        shuffled = aggregate_trmi([records[i] for i in rng.permutation(len(records))], timestamp=0)

        assert shuffled.buzz == pytest.approx(original.buzz, abs=1e-12)
        for index in SENTIMENT_INDICES:
            assert shuffled.indices[index] == pytest.approx(original.indices[index], abs=1e-12)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(3)
        for _ in range(1000):
            n = int(rng.integers(1, 6))
            buzz = rng.uniform(0.0, 2.0, size=n)
            values = rng.uniform(-1.0, 1.0, size=n)

            aggregated = aggregate_trmi([_record(i, float(b), float(v)) for i, (b, v) in enumerate(zip(buzz, values))])

            assert aggregated.indices["sentiment"] == pytest.approx(
                float(np.sum(buzz * values) / np.sum(buzz)), abs=1e-12
            )
            assert abs(aggregated.indices["sentiment"]) <= 1.0

    def test_frame_matches_records(self):
        rng = np.random.default_rng(4)
        records = [
            _record(int(ts), float(rng.uniform(0.1, 2.0)), float(rng.uniform(-1, 1)))
            for ts in sorted(rng.choice(7200, size=25, replace=False))
        ]

        frame = aggregate_trmi_frame(trmi_frame(records), interval=1800)

        assert frame.height == len({record.timestamp // 1800 for record in records})
        for start, row in zip(epoch_seconds(frame), frame.iter_rows(named=True)):
            window = [r for r in records if start <= r.timestamp < start + 1800]
            expected = aggregate_trmi(window)
            assert row["buzz"] == pytest.approx(expected.buzz)
            assert row["sentiment"] == pytest.approx(expected.indices["sentiment"], abs=1e-12)

    def test_frame_window_of_only_zero_buzz_is_missing(self):
        frame = aggregate_trmi_frame(trmi_frame([TrmiRecord.missing(0), TrmiRecord.missing(60)]), 1800)

        assert frame.height == 1
        assert frame.get_column("buzz")[0] == 0.0
        assert frame.get_column("sentiment")[0] is None


class TestPolarity:
    def test_default_table_covers_every_index(self):
        polarity = default_polarity()

        assert polarity.indices == sorted(SENTIMENT_INDICES)
        assert len(polarity.signs) == 4 * len(polarity.psychvars)

    def test_round_trip_through_csv(self, tmp_path):
        path = schemas.polarity.write(polarity_frame(default_polarity()), tmp_path / "polarity.csv")

        assert load_polarity(path) == default_polarity()

    def test_bad_sign(self, tmp_path):
        path = tmp_path / "polarity.csv"
        path.write_text("index,psychvar,polarity\nsentiment,praise,2\n")

        with pytest.raises(DataError):
            load_polarity(path)

    def test_missing_column(self, tmp_path):
        path = tmp_path / "polarity.csv"
        path.write_text("index,polarity\nsentiment,1\n")

        with pytest.raises(DataError):
            load_polarity(path)


def test_trmi_frame_keeps_missing_indices():
    frame = trmi_frame([TrmiRecord.missing(0), _record(1800, 1.0, 0.5)])

    pl_testing.assert_series_equal(
        frame.get_column("sentiment"), pl.Series("sentiment", [None, 0.5], dtype=pl.Float64)
    )
