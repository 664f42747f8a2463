"""Daily price ingestion, calendar alignment and return construction."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from .ambiguity import SampleSet

logger = logging.getLogger(__name__)

TRADING_DAYS_PER_YEAR = 252


class MarketDataError(ValueError):
    """Raised for unusable price or rate input."""


@dataclass(frozen=True)
class IngestOptions:
    tickers: tuple[str, ...] | None = None
    risk_free_path: str | Path | None = None
    day_count: int = TRADING_DAYS_PER_YEAR


@dataclass(frozen=True)
class PriceSeries:
    """Aligned daily prices, one column per asset, plus an annualized risk-free rate per day."""

    tickers: tuple[str, ...]
    prices: np.ndarray
    risk_free: np.ndarray
    calendar: tuple[str, ...]
    day_count: int = TRADING_DAYS_PER_YEAR
    dropped_days: int = 0

    def __post_init__(self):
        prices = np.asarray(self.prices, dtype=float)
        if prices.ndim == 1:
            prices = prices[:, None]
        if prices.shape[1] != len(self.tickers):
            raise MarketDataError(f"{prices.shape[1]} price columns for {len(self.tickers)} tickers")
        if prices.shape[0] != len(self.calendar):
            raise MarketDataError("calendar length does not match price rows")
        if not np.all(np.isfinite(prices)):
            raise MarketDataError("prices contain missing or non-finite values")
        if np.any(prices <= 0):
            raise MarketDataError("non-positive price")
        rf = np.broadcast_to(np.asarray(self.risk_free, dtype=float), (prices.shape[0],)).copy()
        prices.setflags(write=False)
        rf.setflags(write=False)
        object.__setattr__(self, "prices", prices)
        object.__setattr__(self, "risk_free", rf)
        object.__setattr__(self, "tickers", tuple(self.tickers))
        object.__setattr__(self, "calendar", tuple(str(d) for d in self.calendar))

    @property
    def n_days(self) -> int:
        return self.prices.shape[0]

    @property
    def n_assets(self) -> int:
        return self.prices.shape[1]

    def daily_risk_free(self) -> np.ndarray:
        """Per-day simple risk-free return, ``rate / day_count``."""
        return self.risk_free / self.day_count

    def slice(self, start: int, stop: int) -> "PriceSeries":
        return PriceSeries(
            self.tickers,
            self.prices[start:stop],
            self.risk_free[start:stop],
            self.calendar[start:stop],
            self.day_count,
        )

    def select(self, tickers) -> "PriceSeries":
        idx = [self.tickers.index(t) for t in tickers]
        return PriceSeries(tuple(tickers), self.prices[:, idx], self.risk_free, self.calendar, self.day_count)

    def column(self, ticker: str) -> np.ndarray:
        return self.prices[:, self.tickers.index(ticker)]


@dataclass(frozen=True)
class ReturnMatrix:
    """Per-period simple returns; row k holds S(k+1)/S(k) - 1."""

    values: np.ndarray
    horizon: int = 1
    calendar: tuple[str, ...] = field(default=())

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if np.any(values <= -1):
            raise MarketDataError("returns must exceed -1")
        object.__setattr__(self, "values", values)

    @property
    def n_periods(self) -> int:
        return self.values.shape[0]


def _read_table(path: Path) -> pd.DataFrame:
    if not path.exists():
        raise FileNotFoundError(f"file not found: {path}")
    try:
        frame = pd.read_csv(path, sep=",", decimal=".")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise MarketDataError(f"malformed CSV {path}: {exc}") from exc
    if frame.shape[1] < 2:
        raise MarketDataError(f"malformed CSV {path}: expected a date column and at least one value column")
    date_col = frame.columns[0]
    try:
        dates = pd.to_datetime(frame[date_col], format="ISO8601")
    except (ValueError, TypeError) as exc:
        raise MarketDataError(f"malformed CSV {path}: unparseable date in column {date_col!r}") from exc
    frame = frame.drop(columns=[date_col])
    frame.index = dates.dt.strftime("%Y-%m-%d")
    if frame.index.has_duplicates:
        raise MarketDataError(f"malformed CSV {path}: duplicate dates")
    try:
        frame = frame.apply(pd.to_numeric, errors="raise")
    except (ValueError, TypeError) as exc:
        raise MarketDataError(f"malformed CSV {path}: non-numeric value ({exc})") from exc
    return frame.sort_index()


def load_csv(path, config: IngestOptions | None = None) -> PriceSeries:
    """Load adjusted closes from ``path`` and align them to a common calendar.

    Days on which any selected asset (or the risk-free rate, when a rate file is
    given) has no value are dropped; the drop count is logged and stored on the
    result.
    """
    config = config or IngestOptions()
    frame = _read_table(Path(path))
    if config.tickers is not None:
        missing = [t for t in config.tickers if t not in frame.columns]
        if missing:
            raise MarketDataError(f"tickers not in {path}: {missing}")
        frame = frame[list(config.tickers)]
    values = frame.to_numpy(dtype=float)
    if np.any(values[np.isfinite(values)] <= 0):
        raise MarketDataError("non-positive price")

    if config.risk_free_path is not None:
        rates = _read_table(Path(config.risk_free_path)).iloc[:, 0].rename("__rf__")
        frame = frame.join(rates, how="left")
    else:
        frame = frame.assign(__rf__=0.0)

    total = len(frame)
    frame = frame.dropna(how="any")
    dropped = total - len(frame)
    if dropped:
        logger.warning("dropped %d day(s) with missing data out of %d", dropped, total)
    if len(frame) < 2:
        raise MarketDataError("fewer than 2 usable rows after alignment")

    rf = frame.pop("__rf__").to_numpy(dtype=float)
    return PriceSeries(
        tickers=tuple(str(c) for c in frame.columns),
        prices=frame.to_numpy(dtype=float),
        risk_free=rf,
        calendar=tuple(frame.index),
        day_count=config.day_count,
        dropped_days=dropped,
    )


def write_prices_csv(series: PriceSeries, path) -> None:
    frame = pd.DataFrame(series.prices, columns=list(series.tickers))
    frame.insert(0, "date", list(series.calendar))
    frame.to_csv(path, index=False, float_format="%.17g")


def per_period_returns(p: PriceSeries) -> ReturnMatrix:
    if p.n_days < 2:
        raise MarketDataError("need at least 2 price rows")
    s = p.prices
    return ReturnMatrix(s[1:] / s[:-1] - 1.0, 1, p.calendar[1:])


def compound_returns(r: ReturnMatrix, n: int, overlapping: bool = False) -> SampleSet:
    """n-period compound returns, prod(1 + X(k)) - 1 over each block of n rows.

    Blocks are consecutive and non-overlapping unless ``overlapping`` is set, in
    which case every window of n consecutive rows yields a sample.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    values = r.values
    if n > values.shape[0]:
        raise MarketDataError(f"horizon n={n} exceeds the {values.shape[0]} available periods")
    if n == 1:
        # (1 + x) - 1 is not exact in floating point
        return SampleSet(values)
    growth = 1.0 + values
    if overlapping:
        log_growth = np.log(growth)
        csum = np.vstack([np.zeros((1, values.shape[1])), np.cumsum(log_growth, axis=0)])
        # exact products for short blocks, log-sum otherwise
        if n <= 64:
            blocks = np.stack([growth[k : k + n].prod(axis=0) for k in range(values.shape[0] - n + 1)])
        else:
            blocks = np.exp(csum[n:] - csum[:-n])
    else:
        n_blocks = values.shape[0] // n
        blocks = growth[: n_blocks * n].reshape(n_blocks, n, -1).prod(axis=1)
    return SampleSet(blocks - 1.0)
