from dataclasses import dataclass, field
from enum import IntEnum
from typing import Mapping

import numpy as np

from sentifuse.core.autodiff import Tensor
from sentifuse.errors import DataError

SENTIMENT_INDICES = ("sentiment", "optimism", "fear", "joy")
SENTIMENT_FEATURES = ("buzz",) + SENTIMENT_INDICES
PRICE_COLUMNS = ("open", "high", "low", "close")
TRADING_COLUMNS = PRICE_COLUMNS + ("volume",)

DEFAULT_INTERVAL_SECONDS = 30 * 60
SECONDS_PER_DAY = 24 * 60 * 60


class Movement(IntEnum):
    """Direction of the price move over the prediction horizon."""

    DOWN = 0
    FLAT = 1
    UP = 2


@dataclass(frozen=True)
class Bar:
    """One OHLCV record. `timestamp` is the interval start in UTC epoch seconds."""

    timestamp: int
    open: float
    high: float
    low: float
    close: float
    volume: float

    def validate(self) -> None:
        if not self.low <= min(self.open, self.close) <= max(self.open, self.close) <= self.high:
            raise DataError(
                f"Bar at {self.timestamp} violates low <= open/close <= high: "
                f"{self.open}, {self.high}, {self.low}, {self.close}"
            )
        if self.volume < 0:
            raise DataError(f"Bar at {self.timestamp} has negative volume {self.volume}")


@dataclass(frozen=True)
class PsychVarRecord:
    timestamp: int
    values: Mapping[str, float]
    asset: str = ""


@dataclass(frozen=True)
class TrmiPolarity:
    """I(t, p): +1 additive, -1 subtractive, 0 irrelevant, keyed by (index, psychvar)."""

    signs: Mapping[tuple[str, str], int]

    @property
    def indices(self) -> list[str]:
        return sorted({index for index, _ in self.signs})

    @property
    def psychvars(self) -> list[str]:
        return sorted({psychvar for _, psychvar in self.signs})

    def sign(self, index: str, psychvar: str) -> int:
        return self.signs.get((index, psychvar), 0)


@dataclass(frozen=True)
class TrmiRecord:
    """
    Buzz plus the four sentiment indices at a timestamp. A missing index is
    stored as None; zero buzz means every index is missing.
    """

    timestamp: int
    buzz: float
    indices: Mapping[str, float | None] = field(default_factory=dict)

    @classmethod
    def missing(cls, timestamp: int) -> "TrmiRecord":
        return cls(timestamp=timestamp, buzz=0.0, indices={name: None for name in SENTIMENT_INDICES})

    @property
    def present(self) -> dict[str, bool]:
        return {name: self.indices.get(name) is not None for name in SENTIMENT_INDICES}

    @property
    def is_padding(self) -> bool:
        return self.buzz == 0.0


@dataclass(frozen=True)
class AlignedSample:
    """
    One trading day as model input. Frames are [features x intervals_per_day];
    `timestamp` is the decision time (start of the day's last interval).
    """

    day_index: int
    timestamp: int
    timestamps: np.ndarray
    trading_frame: Tensor
    sentiment_frame: Tensor
    sentiment_mask: np.ndarray
    label: Movement
    close_prices: np.ndarray
    forward_return: float = 0.0

    @property
    def intervals(self) -> int:
        return self.trading_frame.shape[1]
