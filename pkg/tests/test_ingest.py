"""Price parsing, calendar filtering, and intraday return construction."""

import datetime as dt
import io

import numpy as np
import pytest

from copuladyn import (
    CalendarError,
    PriceDataError,
    TradingCalendar,
    compute_returns,
    load_calendar,
    load_prices,
    pair_view,
)

CAL = TradingCalendar()


def csv_stream(rows):
    return io.StringIO("timestamp,symbol,price\n" + "\n".join(rows) + "\n")


def full_session_rows(symbol, day, prices):
    """One quote per 30-minute endpoint 09:30..16:00 (14 endpoints)."""
    assert len(prices) == 14
    out = []
    for k, p in enumerate(prices):
        minute = 9 * 60 + 30 + 30 * k
        out.append(f"{day}T{minute // 60:02d}:{minute % 60:02d}:00,{symbol},{p}")
    return out


def test_calendar_defaults_and_minutes():
    assert CAL.open_time == dt.time(9, 30)
    assert CAL.close_time == dt.time(16, 0)
    assert CAL.session_minutes == 390


def test_in_session_mask_boundaries():
    ts = np.array([
        "2024-01-03T09:29:59",  # Wednesday, before open
        "2024-01-03T09:30:00",
        "2024-01-03T12:00:00",
        "2024-01-03T16:00:00",
        "2024-01-03T16:00:01",
        "2024-01-06T12:00:00",  # Saturday
    ], dtype="datetime64[s]")
    assert CAL.in_session_mask(ts).tolist() == [False, True, True, True, False, False]


def test_holiday_excluded():
    cal = TradingCalendar(holidays=frozenset({dt.date(2024, 1, 4)}))
    ts = np.array(["2024-01-04T12:00:00", "2024-01-05T12:00:00"], dtype="datetime64[s]")
    assert cal.in_session_mask(ts).tolist() == [False, True]
    assert not cal.is_trading_day("2024-01-04")
    assert cal.is_trading_day("2024-01-05")


def test_trading_days_skip_weekend_and_holiday():
    cal = TradingCalendar(holidays=frozenset({dt.date(2024, 1, 8)}))
    days = cal.trading_days("2024-01-05", 3)  # Friday start; Mon 8th is out
    assert [str(d) for d in days] == ["2024-01-05", "2024-01-09", "2024-01-10"]


def test_load_calendar_text():
    cfg = io.StringIO(
        "# session definition\nopen=10:00\nclose=15:30\n2024-12-25\n\n2024-01-01\n"
    )
    cal = load_calendar(cfg)
    assert cal.open_time == dt.time(10, 0)
    assert cal.close_time == dt.time(15, 30)
    assert cal.holidays == frozenset({dt.date(2024, 12, 25), dt.date(2024, 1, 1)})


def test_load_calendar_bad_line_reports_number():
    with pytest.raises(CalendarError, match="line 2"):
        load_calendar(io.StringIO("open=10:00\nnot-a-date\n"))


def test_calendar_rejects_inverted_session():
    with pytest.raises(CalendarError):
        TradingCalendar(open_time=dt.time(16, 0), close_time=dt.time(9, 30))


def test_load_prices_basic_panel():
    panel = load_prices(csv_stream([
        "2024-01-03T09:30:00,BBB,50.0",
        "2024-01-03T09:30:00,AAA,100.0",
        "2024-01-03T10:00:00,AAA,101.0",
    ]), CAL)
    assert panel.asset_ids == ["AAA", "BBB"]  # alphabetical
    assert panel.timestamps.tolist() == [
        np.datetime64("2024-01-03T09:30:00").item(),
        np.datetime64("2024-01-03T10:00:00").item(),
    ]
    assert panel.prices[0].tolist() == [100.0, 101.0]
    assert panel.prices[1][0] == 50.0
    assert np.isnan(panel.prices[1][1])  # BBB has no 10:00 quote
    assert panel.excluded_count == 0


def test_load_prices_excludes_out_of_session_row():
    panel = load_prices(csv_stream([
        "2024-01-03T03:00:00,AAA,99.0",
        "2024-01-03T09:30:00,AAA,100.0",
    ]), CAL)
    assert panel.excluded_count == 1
    assert panel.timestamps.size == 1


def test_load_prices_rejects_nonpositive_price_with_line():
    with pytest.raises(PriceDataError, match="line 3"):
        load_prices(csv_stream([
            "2024-01-03T09:30:00,AAA,100.0",
            "2024-01-03T09:31:00,AAA,0.0",
        ]), CAL)
    with pytest.raises(PriceDataError, match="line 2"):
        load_prices(csv_stream(["2024-01-03T09:30:00,AAA,-5.0"]), CAL)


def test_load_prices_rejects_malformed_input():
    with pytest.raises(PriceDataError, match="header"):
        load_prices(io.StringIO("time,sym,px\n"), CAL)
    with pytest.raises(PriceDataError):
        load_prices(io.StringIO(""), CAL)
    with pytest.raises(PriceDataError, match="line 2"):
        load_prices(csv_stream(["2024-01-03T09:30:00,AAA"]), CAL)
    with pytest.raises(PriceDataError, match="timestamp"):
        load_prices(csv_stream(["yesterday,AAA,1.0"]), CAL)
    with pytest.raises(PriceDataError, match="price"):
        load_prices(csv_stream(["2024-01-03T09:30:00,AAA,cheap"]), CAL)
    with pytest.raises(PriceDataError, match="symbol"):
        load_prices(csv_stream(["2024-01-03T09:30:00,,1.0"]), CAL)


def test_load_prices_rejects_symbol_time_regression():
    with pytest.raises(PriceDataError, match="line 3"):
        load_prices(csv_stream([
            "2024-01-03T10:00:00,AAA,100.0",
            "2024-01-03T09:30:00,AAA,99.0",
        ]), CAL)


def test_load_prices_all_rows_outside_sessions():
    with pytest.raises(PriceDataError, match="outside"):
        load_prices(csv_stream(["2024-01-06T12:00:00,AAA,1.0"]), CAL)


def test_returns_simple_one_percent():
    panel = load_prices(csv_stream([
        "2024-01-03T09:30:00,AAA,100.0",
        "2024-01-03T10:00:00,AAA,101.0",
    ]), CAL)
    mat = compute_returns(panel, 30)
    # the 10:00 price carries forward, so all 13 endpoints resolve: one 1%
    # move, then flat
    assert mat.returns.shape == (1, 13)
    assert mat.returns[0, 0] == pytest.approx(0.01, abs=1e-15)
    assert np.all(mat.returns[0, 1:] == 0.0)
    assert mat.timestamps[0] == np.datetime64("2024-01-03T10:00:00")
    assert mat.session_dates[0] == np.datetime64("2024-01-03")
    assert mat.interval == 30


def test_returns_full_session_has_thirteen_columns():
    rows = full_session_rows("AAA", "2024-01-03", [100.0 + k for k in range(14)])
    mat = compute_returns(load_prices(csv_stream(rows), CAL), 30)
    assert mat.n_observations == 13  # 390 / 30
    assert mat.period == (dt.date(2024, 1, 3), dt.date(2024, 1, 3))


def test_returns_constant_prices_are_zero():
    rows = full_session_rows("AAA", "2024-01-03", [42.0] * 14)
    mat = compute_returns(load_prices(csv_stream(rows), CAL), 30)
    assert np.all(mat.returns == 0.0)


def test_returns_previous_tick_resolution():
    panel = load_prices(csv_stream([
        "2024-01-03T09:30:00,AAA,100.0",
        "2024-01-03T09:58:00,AAA,110.0",  # last quote before the 10:00 endpoint
        "2024-01-03T10:25:00,AAA,121.0",  # carried into the 10:30 endpoint
    ]), CAL)
    mat = compute_returns(panel, 30)
    assert mat.returns[0, :2].tolist() == pytest.approx([0.1, 0.1], abs=1e-15)
    assert np.all(mat.returns[0, 2:] == 0.0)  # 121 carried to the close
    assert [str(t) for t in mat.timestamps[:2]] == [
        "2024-01-03T10:00:00", "2024-01-03T10:30:00"]


def test_returns_drop_columns_when_any_asset_unresolved():
    # BBB has no quote at or before 10:00, so both columns touching that
    # endpoint disappear for every asset
    panel = load_prices(csv_stream([
        "2024-01-03T09:30:00,AAA,100.0",
        "2024-01-03T10:00:00,AAA,101.0",
        "2024-01-03T10:30:00,AAA,102.0",
        "2024-01-03T11:00:00,AAA,103.0",
        "2024-01-03T10:05:00,BBB,50.0",
        "2024-01-03T10:30:00,BBB,51.0",
        "2024-01-03T11:00:00,BBB,52.0",
    ]), CAL)
    mat = compute_returns(panel, 30)
    # endpoints 09:30 and 10:00 are unresolvable for BBB, killing the first
    # two columns; 10:30 onward resolves for both, leaving 11 columns
    assert mat.returns.shape == (2, 11)
    assert str(mat.timestamps[0]) == "2024-01-03T11:00:00"
    assert mat.returns[0, 0] == pytest.approx((103 - 102) / 102, abs=1e-15)
    assert mat.returns[1, 0] == pytest.approx((52 - 51) / 51, abs=1e-15)
    assert np.all(mat.returns[:, 1:] == 0.0)  # both carried flat afterwards


def test_returns_never_span_sessions():
    rows = (
        full_session_rows("AAA", "2024-01-03", [100.0 + k for k in range(14)])
        + full_session_rows("AAA", "2024-01-04", [200.0 + k for k in range(14)])
    )
    mat = compute_returns(load_prices(csv_stream(rows), CAL), 30)
    assert mat.n_observations == 26
    days = np.unique(mat.session_dates)
    assert days.size == 2
    # the overnight 113 -> 200 jump must appear in no return
    assert np.max(np.abs(mat.returns)) < 0.02


def test_returns_interval_validation():
    panel = load_prices(csv_stream(["2024-01-03T09:30:00,AAA,1.0"]), CAL)
    with pytest.raises(PriceDataError):
        compute_returns(panel, 0)
    with pytest.raises(PriceDataError):
        compute_returns(panel, 391)


def test_returns_scale_invariance():
    rows_a = full_session_rows("AAA", "2024-01-03", [100.0 + 3 * k for k in range(14)])
    rows_b = full_session_rows("AAA", "2024-01-03",
                               [(100.0 + 3 * k) * 1024.0 for k in range(14)])
    m1 = compute_returns(load_prices(csv_stream(rows_a), CAL), 30)
    m2 = compute_returns(load_prices(csv_stream(rows_b), CAL), 30)
    # power-of-two scaling leaves arithmetic returns bit-identical
    assert np.array_equal(m1.returns, m2.returns)


def test_returns_no_complete_interval_errors():
    panel = load_prices(csv_stream(["2024-01-03T15:59:00,AAA,1.0"]), CAL)
    with pytest.raises(PriceDataError, match="no complete"):
        compute_returns(panel, 30)


def test_pair_view_and_errors():
    rows = (
        full_session_rows("AAA", "2024-01-03", [100.0] * 14)
        + full_session_rows("BBB", "2024-01-03", [50.0] * 14)
    )
    mat = compute_returns(load_prices(csv_stream(rows), CAL), 30)
    a, b = pair_view(mat, 0, 1)
    assert a.shape == b.shape == (13,)
    with pytest.raises(IndexError):
        pair_view(mat, 0, 2)
    with pytest.raises(ValueError):
        pair_view(mat, 1, 1)
