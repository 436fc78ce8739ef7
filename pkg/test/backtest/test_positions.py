import numpy as np
import pytest
from numpy import testing as np_testing

from sentifuse.core.backtest import signal_positions, signals_to_positions, simulate
from sentifuse.errors import DataError
from test.data.builders import HALF_HOUR, SESSION_OPEN, make_bars, make_predictions


@pytest.mark.parametrize(
    ("scores", "expected"),
    [
        ((0.1, 0.1, 0.8), 1),
        ((0.4, 0.3, 0.3), 0),
        ((0.7, 0.2, 0.1), -1),
        ((0.2, 0.6, 0.2), 0),
        ((0.5, 0.0, 0.5), -1),
    ],
)
def test_signal_rule(scores, expected):
    assert signal_positions(np.array([scores]), threshold=0.5).tolist() == [expected]


def test_threshold_is_inclusive():
    assert signal_positions(np.array([[0.2, 0.3, 0.5]]), threshold=0.5).tolist() == [1]


def test_no_scores():
    assert signal_positions(np.zeros((0, 3))).size == 0


def test_alternating_signals_close_three_trades():
    positions = signal_positions(np.array([[0.1, 0.1, 0.8], [0.8, 0.1, 0.1]] * 2), threshold=0.5)

    simulation = simulate(positions, [100.0, 101.0, 100.0, 101.0])

    assert positions.tolist() == [1, -1, 1, -1]
    assert len(simulation.trades) == 3
    assert [trade.direction for trade in simulation.trades] == ["long", "short", "long"]


class TestSignalsToPositions:
    def test_signal_is_held_until_next_prediction(self):
        bars = make_bars([100.0] * 6)
        predictions = make_predictions(
            [SESSION_OPEN + HALF_HOUR, SESSION_OPEN + 3 * HALF_HOUR],
            [(0.1, 0.1, 0.8), (0.8, 0.1, 0.1)],
        )

        positioned = signals_to_positions(predictions, bars, threshold=0.5)

        assert positioned.get_column("position").to_list() == [1, 1, -1, -1, -1]

    def test_span_ends_one_day_after_last_prediction(self):
        bars = make_bars([100.0] * 60)
        predictions = make_predictions([SESSION_OPEN], [(0.1, 0.1, 0.8)])

        positioned = signals_to_positions(predictions, bars)

        assert positioned.height == 48
        np_testing.assert_array_equal(positioned.get_column("position").to_numpy(), np.ones(48))

    def test_predictions_outside_bars(self):
        bars = make_bars([100.0] * 3)
        predictions = make_predictions([SESSION_OPEN + 10 * HALF_HOUR], [(0.1, 0.1, 0.8)])

        with pytest.raises(DataError):
            signals_to_positions(predictions, bars)

    def test_no_predictions(self):
        with pytest.raises(DataError):
            signals_to_positions(make_predictions([], []), make_bars([100.0]))
