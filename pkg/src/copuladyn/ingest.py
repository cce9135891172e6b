"""Price ingestion, trading calendar, and intraday return computation.

Input CSV is UTF-8 with header ``timestamp,symbol,price``: ISO-8601 timestamps
at seconds resolution, one row per (timestamp, symbol). Rows outside the
trading calendar's sessions are dropped and counted; rows inside are assembled
into a dense panel over the union of observed timestamps, with NaN marking an
asset that has no quote at a given panel timestamp.

Returns are arithmetic, r(t) = (P(t + dt) - P(t)) / P(t), computed on a fixed
per-session endpoint grid (session open, open + dt, ...). Prices at endpoints
resolve by previous tick within the session; no return ever spans a session
boundary, so there are no overnight returns.
"""

from __future__ import annotations

import csv
import datetime as dt
import logging
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PriceDataError",
    "CalendarError",
    "TradingCalendar",
    "PricePanel",
    "ReturnMatrix",
    "load_calendar",
    "load_prices",
    "compute_returns",
    "pair_view",
]

logger = logging.getLogger(__name__)


class PriceDataError(ValueError):
    """Raised when price input violates the CSV contract or panel invariants."""


class CalendarError(ValueError):
    """Raised when a calendar config file cannot be parsed."""


def _weekday(days: np.ndarray) -> np.ndarray:
    # datetime64 epoch 1970-01-01 was a Thursday
    return (days.astype(np.int64) + 3) % 7


@dataclass(frozen=True)
class TradingCalendar:
    """Trading session definition: open/close clock times, weekdays, holidays."""

    open_time: dt.time = dt.time(9, 30)
    close_time: dt.time = dt.time(16, 0)
    holidays: frozenset = frozenset()

    def __post_init__(self):
        if self.close_time <= self.open_time:
            raise CalendarError("session close must be after session open")

    @property
    def session_minutes(self) -> int:
        open_min = self.open_time.hour * 60 + self.open_time.minute
        close_min = self.close_time.hour * 60 + self.close_time.minute
        return close_min - open_min

    def _holiday_array(self) -> np.ndarray:
        return np.array(sorted(self.holidays), dtype="datetime64[D]")

    def is_trading_day(self, day) -> bool:
        d = np.datetime64(day, "D")
        return bool(_weekday(np.array([d]))[0] < 5) and d.item() not in {
            np.datetime64(h, "D").item() for h in self.holidays
        }

    def in_session_mask(self, timestamps: np.ndarray) -> np.ndarray:
        """Boolean mask of timestamps inside a trading session (bounds inclusive)."""
        ts = timestamps.astype("datetime64[s]")
        days = ts.astype("datetime64[D]")
        seconds = (ts - days).astype("timedelta64[s]").astype(np.int64)
        open_s = self.open_time.hour * 3600 + self.open_time.minute * 60
        close_s = self.close_time.hour * 3600 + self.close_time.minute * 60
        mask = (_weekday(days) < 5) & (seconds >= open_s) & (seconds <= close_s)
        if self.holidays:
            mask &= ~np.isin(days, self._holiday_array())
        return mask

    def trading_days(self, start, count: int) -> np.ndarray:
        """First ``count`` trading days at or after ``start``."""
        day = np.datetime64(start, "D")
        out = []
        while len(out) < count:
            if self.is_trading_day(day):
                out.append(day)
            day += np.timedelta64(1, "D")
        return np.array(out, dtype="datetime64[D]")


def load_calendar(source) -> TradingCalendar:
    """Parse a calendar config: ``open=HH:MM``, ``close=HH:MM``, holiday dates one per line."""
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    else:
        lines = source.readlines()
    open_time = dt.time(9, 30)
    close_time = dt.time(16, 0)
    holidays = set()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            if line.startswith("open="):
                open_time = dt.time.fromisoformat(line.split("=", 1)[1])
            elif line.startswith("close="):
                close_time = dt.time.fromisoformat(line.split("=", 1)[1])
            else:
                holidays.add(dt.date.fromisoformat(line))
        except ValueError as exc:
            raise CalendarError(f"calendar config line {lineno}: {line!r}") from exc
    return TradingCalendar(open_time=open_time, close_time=close_time, holidays=frozenset(holidays))


@dataclass(frozen=True)
class PricePanel:
    """Dense price panel over the union of in-session quote timestamps.

    ``prices[k, t]`` is asset k's price at ``timestamps[t]``; NaN marks a gap.
    ``excluded_count`` reports how many input rows fell outside trading
    sessions and were dropped.
    """

    asset_ids: list
    timestamps: np.ndarray
    prices: np.ndarray
    calendar: TradingCalendar
    excluded_count: int = 0

    def __post_init__(self):
        if self.prices.shape != (len(self.asset_ids), self.timestamps.size):
            raise PriceDataError("price matrix shape does not match assets x timestamps")
        if self.timestamps.size == 0:
            raise PriceDataError("panel has no in-session rows")
        if np.any(np.diff(self.timestamps).astype(np.int64) <= 0):
            raise PriceDataError("panel timestamps must be strictly increasing")
        present = ~np.isnan(self.prices)
        if not np.all(np.isfinite(self.prices[present])) or np.any(self.prices[present] <= 0.0):
            raise PriceDataError("present prices must be strictly positive and finite")
        if not bool(self.calendar.in_session_mask(self.timestamps).all()):
            raise PriceDataError("panel timestamps must lie inside trading sessions")


@dataclass(frozen=True)
class ReturnMatrix:
    """Aligned K x T matrix of intraday arithmetic returns.

    Column t covers the interval ending at ``timestamps[t]`` inside trading
    session ``session_dates[t]``; every asset shares the same columns, so any
    two rows are synchronous by construction. Instances are immutable and safe
    for concurrent read access.
    """

    asset_ids: list
    interval: int
    returns: np.ndarray
    timestamps: np.ndarray = field(repr=False)
    session_dates: np.ndarray = field(repr=False)

    def __post_init__(self):
        k, t = self.returns.shape
        if k != len(self.asset_ids):
            raise ValueError("returns row count does not match asset_ids")
        if t < 1:
            raise ValueError("return matrix must contain at least one column")
        if self.timestamps.size != t or self.session_dates.size != t:
            raise ValueError("timestamps/session_dates must align with return columns")

    @property
    def n_assets(self) -> int:
        return self.returns.shape[0]

    @property
    def n_observations(self) -> int:
        return self.returns.shape[1]

    @property
    def period(self):
        """(start date, end date) of the covered trading sessions."""
        return (self.session_dates[0].item(), self.session_dates[-1].item())


_HEADER = ["timestamp", "symbol", "price"]


def load_prices(source, calendar: TradingCalendar) -> PricePanel:
    """Parse a price CSV stream or path into a PricePanel.

    Rows with timestamps outside the calendar's sessions are dropped and
    counted in ``excluded_count``. Malformed rows, non-positive prices, and
    per-symbol timestamp regressions fail with the offending line number.
    Assets are ordered alphabetically in the panel.
    """
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            return _parse_price_rows(csv.reader(fh), calendar)
    return _parse_price_rows(csv.reader(source), calendar)


def _parse_price_rows(reader, calendar: TradingCalendar) -> PricePanel:
    try:
        header = next(reader)
    except StopIteration:
        raise PriceDataError("empty input: missing header row") from None
    if [h.strip() for h in header] != _HEADER:
        raise PriceDataError(f"line 1: header must be {','.join(_HEADER)!r}")

    raw_ts = []
    raw_sym = []
    raw_px = []
    lines = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise PriceDataError(f"line {lineno}: expected 3 fields, got {len(row)}")
        ts_text, symbol, price_text = (f.strip() for f in row)
        if not symbol:
            raise PriceDataError(f"line {lineno}: empty symbol")
        try:
            ts = np.datetime64(ts_text, "s")
        except ValueError:
            raise PriceDataError(f"line {lineno}: unparseable timestamp {ts_text!r}") from None
        try:
            price = float(price_text)
        except ValueError:
            raise PriceDataError(f"line {lineno}: unparseable price {price_text!r}") from None
        if not np.isfinite(price) or price <= 0.0:
            raise PriceDataError(f"line {lineno}: price must be strictly positive, got {price_text}")
        raw_ts.append(ts)
        raw_sym.append(symbol)
        raw_px.append(price)
        lines.append(lineno)

    if not raw_ts:
        raise PriceDataError("input contains no data rows")

    ts_arr = np.array(raw_ts, dtype="datetime64[s]")
    keep = calendar.in_session_mask(ts_arr)
    excluded = int(np.count_nonzero(~keep))
    if excluded:
        logger.info("load_prices: excluded %d rows outside trading sessions", excluded)
    if not keep.any():
        raise PriceDataError("all rows fall outside trading sessions")

    symbols = sorted({raw_sym[k] for k in range(len(raw_sym)) if keep[k]})
    sym_index = {s: k for k, s in enumerate(symbols)}
    panel_ts = np.unique(ts_arr[keep])
    prices = np.full((len(symbols), panel_ts.size), np.nan)
    last_seen = {}
    for k in range(len(raw_ts)):
        if not keep[k]:
            continue
        sym = raw_sym[k]
        prev = last_seen.get(sym)
        if prev is not None and raw_ts[k] <= prev:
            raise PriceDataError(
                f"line {lines[k]}: timestamps for symbol {sym!r} must be strictly increasing"
            )
        last_seen[sym] = raw_ts[k]
        col = int(np.searchsorted(panel_ts, raw_ts[k]))
        prices[sym_index[sym], col] = raw_px[k]

    return PricePanel(
        asset_ids=symbols,
        timestamps=panel_ts,
        prices=prices,
        calendar=calendar,
        excluded_count=excluded,
    )


def compute_returns(panel: PricePanel, interval: int) -> ReturnMatrix:
    """Arithmetic returns on a fixed per-session endpoint grid.

    Endpoints are session open plus whole multiples of ``interval`` minutes up
    to the close; per session that yields floor(session_minutes / interval)
    return intervals. Endpoint prices resolve by previous tick within the
    session. If any asset has no price at or before an endpoint, every return
    column touching that endpoint is dropped for all assets, keeping the panel
    aligned and every kept return spanning exactly one interval.
    """
    if interval <= 0:
        raise PriceDataError("interval must be positive")
    session_minutes = panel.calendar.session_minutes
    if interval > session_minutes:
        raise PriceDataError(
            f"interval {interval} min exceeds the {session_minutes} min session"
        )
    per_session = session_minutes // interval
    n_assets = len(panel.asset_ids)

    day_of = panel.timestamps.astype("datetime64[D]")
    open_delta = np.timedelta64(
        panel.calendar.open_time.hour * 3600 + panel.calendar.open_time.minute * 60, "s"
    )
    step = np.timedelta64(interval * 60, "s")

    out_cols = []
    out_ts = []
    out_days = []
    for day in np.unique(day_of):
        lo = int(np.searchsorted(day_of, day, side="left"))
        hi = int(np.searchsorted(day_of, day, side="right"))
        sess_ts = panel.timestamps[lo:hi]
        sess_px = panel.prices[:, lo:hi]
        endpoints = day.astype("datetime64[s]") + open_delta + np.arange(per_session + 1) * step
        # previous tick: index of the last in-session quote at or before each endpoint
        pos = np.searchsorted(sess_ts, endpoints, side="right") - 1
        valid = ~np.isnan(sess_px)
        col_idx = np.where(valid, np.arange(sess_ts.size)[None, :], -1)
        last_valid = np.maximum.accumulate(col_idx, axis=1)
        grid = np.full((n_assets, per_session + 1), np.nan)
        have_quote = pos >= 0
        if have_quote.any():
            lv = last_valid[:, pos[have_quote]]
            resolved = lv >= 0
            gathered = np.take_along_axis(sess_px, np.maximum(lv, 0), axis=1)
            grid[:, have_quote] = np.where(resolved, gathered, np.nan)
        endpoint_ok = ~np.isnan(grid).any(axis=0)
        col_ok = endpoint_ok[:-1] & endpoint_ok[1:]
        if not col_ok.any():
            continue
        prev = grid[:, :-1][:, col_ok]
        nxt = grid[:, 1:][:, col_ok]
        out_cols.append((nxt - prev) / prev)
        out_ts.append(endpoints[1:][col_ok])
        out_days.append(np.full(int(col_ok.sum()), day, dtype="datetime64[D]"))

    if not out_cols:
        raise PriceDataError("no complete return intervals could be formed")
    return ReturnMatrix(
        asset_ids=list(panel.asset_ids),
        interval=int(interval),
        returns=np.hstack(out_cols),
        timestamps=np.concatenate(out_ts),
        session_dates=np.concatenate(out_days),
    )


def pair_view(matrix: ReturnMatrix, i: int, j: int):
    """Timestamp-aligned return series of assets i and j (i != j)."""
    k = matrix.n_assets
    if not (0 <= i < k and 0 <= j < k):
        raise IndexError(f"asset index out of range for K={k}")
    if i == j:
        raise ValueError("pair_view requires two distinct assets")
    return matrix.returns[i], matrix.returns[j]
