from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from sentifuse.errors import DataError

Direction = Literal["long", "short"]


@dataclass(frozen=True)
class Trade:
    entry_timestamp: int
    entry_price: float
    exit_timestamp: int
    exit_price: float
    direction: Direction
    ret: float

    @property
    def is_win(self) -> bool:
        return self.ret > 0


@dataclass
class Simulation:
    """`returns[t]` is the net return earned while holding `positions[t]`; `equity[0]` is 0."""

    timestamps: np.ndarray
    positions: np.ndarray
    closes: np.ndarray
    returns: np.ndarray
    equity: np.ndarray
    trades: list[Trade] = field(default_factory=list)

    @property
    def cumulative_return(self) -> float:
        return float(self.equity[-1])


def closed_trades(
    positions: np.ndarray, closes: np.ndarray, timestamps: np.ndarray, cost_per_side: float
) -> list[Trade]:
    """One trade per exit from a non-zero position; a position still open at the end is not a trade."""
    trades = []
    entry: int | None = None
    for t in range(len(positions)):
        previous = positions[t - 1] if t > 0 else 0
        if positions[t] == previous:
            continue
        if previous != 0 and entry is not None:
            direction = 1.0 if previous > 0 else -1.0
            trades.append(
                Trade(
                    entry_timestamp=int(timestamps[entry]),
                    entry_price=float(closes[entry]),
                    exit_timestamp=int(timestamps[t]),
                    exit_price=float(closes[t]),
                    direction="long" if direction > 0 else "short",
                    ret=direction * (closes[t] - closes[entry]) / closes[entry] - 2.0 * cost_per_side,
                )
            )
        entry = t if positions[t] != 0 else None
    return trades


def round_trip_costs(positions: np.ndarray, cost_per_side: float) -> np.ndarray:
    """Per-interval cost: units closed pay both sides, units open at the end pay one."""
    previous = np.concatenate([[0], positions[:-1]])
    flipped = np.sign(positions) != np.sign(previous)
    closed = np.where(flipped, np.abs(previous), np.maximum(np.abs(previous) - np.abs(positions), 0))
    costs = 2.0 * cost_per_side * closed
    costs[-1] += cost_per_side * abs(positions[-1])
    return costs


def simulate(
    positions: Sequence[int],
    closes: Sequence[float],
    cost_per_side: float = 0.0,
    timestamps: Sequence[int] | None = None,
) -> Simulation:
    """
    Interval accounting: holding position p_t over interval t earns
    p_t * (close[t+1] / close[t] - 1). The final interval has no next close
    and earns nothing. Equity compounds and is reported as a cumulative
    fraction.

    Each unit closed at interval t pays its round trip, 2 * `cost_per_side`,
    in that interval, so one round trip on flat prices costs exactly
    2 * `cost_per_side` like its Trade. Units still open at the end pay their
    entry side in the final interval.
    """
    positions = np.asarray(positions, dtype=np.int64)
    closes = np.asarray(closes, dtype=np.float64)
    timestamps = np.arange(len(closes)) if timestamps is None else np.asarray(timestamps)
    if not len(positions) == len(closes) == len(timestamps):
        raise DataError(
            f"positions, closes and timestamps differ in length: "
            f"{len(positions)}, {len(closes)}, {len(timestamps)}"
        )
    if len(closes) == 0:
        raise DataError("Nothing to simulate: empty price series")
    if np.any(closes <= 0) or not np.all(np.isfinite(closes)):
        raise DataError(f"Prices must be positive and finite, got {closes[(closes <= 0) | ~np.isfinite(closes)][0]}")
    if cost_per_side < 0:
        raise DataError(f"cost_per_side must be non-negative, got {cost_per_side}")

    gross = np.zeros(len(closes))
    gross[:-1] = positions[:-1] * (closes[1:] / closes[:-1] - 1.0)
    returns = gross - round_trip_costs(positions, cost_per_side)
    equity = np.concatenate([[0.0], np.cumprod(1.0 + returns) - 1.0])

    return Simulation(
        timestamps=timestamps,
        positions=positions,
        closes=closes,
        returns=returns,
        equity=equity,
        trades=closed_trades(positions, closes, timestamps, cost_per_side),
    )
