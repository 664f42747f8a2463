import logging

import numpy as np
import pytest

from conftest import write_prices
from costdro.market_data import (
    IngestOptions,
    MarketDataError,
    PriceSeries,
    ReturnMatrix,
    compound_returns,
    load_csv,
    per_period_returns,
    write_prices_csv,
)


def _series(prices):
    prices = np.asarray(prices, dtype=float)
    if prices.ndim == 1:
        prices = prices[:, None]
    cal = [f"2020-01-{k + 1:02d}" for k in range(prices.shape[0])]
    return PriceSeries(tuple(f"A{i}" for i in range(prices.shape[1])), prices, 0.0, cal)


def test_alignment_drops_days_missing_for_any_asset(tmp_path, caplog):
    f = tmp_path / "p.csv"
    write_prices(f, ["2020-01-01", "2020-01-02", "2020-01-03", "2020-01-06"],
                 {"A": [1.0, 2.0, 3.0, 4.0], "B": [5.0, None, 6.0, 7.0]})
    with caplog.at_level(logging.WARNING):
        p = load_csv(f)
    assert p.n_days == 3
    assert p.dropped_days == 1
    assert p.calendar == ("2020-01-01", "2020-01-03", "2020-01-06")
    assert "dropped 1 day" in caplog.text


def test_zero_price_rejected(tmp_path):
    f = tmp_path / "p.csv"
    write_prices(f, ["2020-01-01", "2020-01-02"], {"A": [1.0, 0.0]})
    with pytest.raises(MarketDataError, match="non-positive price"):
        load_csv(f)


def test_single_asset_file(tmp_path):
    f = tmp_path / "p.csv"
    write_prices(f, ["2020-01-01", "2020-01-02", "2020-01-03"], {"A": [100.0, 110.0, 121.0]})
    p = load_csv(f)
    assert p.prices.shape == (3, 1)


def test_too_few_rows_and_missing_file(tmp_path):
    f = tmp_path / "p.csv"
    write_prices(f, ["2020-01-01"], {"A": [1.0]})
    with pytest.raises(MarketDataError, match="fewer than 2"):
        load_csv(f)
    with pytest.raises(FileNotFoundError, match="file not found"):
        load_csv(tmp_path / "nope.csv")


def test_malformed_csv(tmp_path):
    f = tmp_path / "p.csv"
    f.write_text("date,A\nnot-a-date,1.0\n")
    with pytest.raises(MarketDataError, match="malformed"):
        load_csv(f)
    f.write_text("date,A\n2020-01-01,abc\n2020-01-02,1.0\n")
    with pytest.raises(MarketDataError, match="malformed"):
        load_csv(f)


def test_risk_free_file_joins_on_dates(tmp_path):
    f = tmp_path / "p.csv"
    r = tmp_path / "r.csv"
    write_prices(f, ["2020-01-01", "2020-01-02", "2020-01-03"], {"A": [1.0, 2.0, 3.0]})
    write_prices(r, ["2020-01-01", "2020-01-03"], {"rate": [0.0252, 0.0504]})
    p = load_csv(f, IngestOptions(risk_free_path=r))
    assert p.n_days == 2
    np.testing.assert_allclose(p.daily_risk_free(), [0.0001, 0.0002])


def test_ticker_selection_and_alignment_idempotent(tmp_path):
    f = tmp_path / "p.csv"
    write_prices(f, ["2020-01-01", "2020-01-02", "2020-01-03"],
                 {"A": [1.0, 2.0, 3.0], "B": [2.0, None, 1.0], "C": [3.0, 3.5, 4.0]})
    p = load_csv(f, IngestOptions(tickers=("C", "B")))
    assert p.tickers == ("C", "B")
    g = tmp_path / "aligned.csv"
    write_prices_csv(p, g)
    again = load_csv(g)
    assert again.dropped_days == 0
    np.testing.assert_array_equal(again.prices, p.prices)


@pytest.mark.parametrize(
    "prices, expected",
    [([100, 110, 121], [0.1, 0.1]), ([50, 50], [0.0]), ([100, 90], [-0.1])],
)
def test_per_period_returns(prices, expected):
    r = per_period_returns(_series(prices))
    np.testing.assert_allclose(r.values[:, 0], expected, rtol=0, atol=1e-15)
    assert r.n_periods == len(prices) - 1


def test_compound_returns_examples():
    assert compound_returns(ReturnMatrix([0.1, 0.1]), 2).samples[0, 0] == pytest.approx(0.21, abs=1e-15)
    assert compound_returns(ReturnMatrix([0.5, -0.4]), 2).samples[0, 0] == pytest.approx(-0.1, abs=1e-15)
    r = ReturnMatrix(np.array([[0.1, -0.2], [0.03, 0.0], [-0.5, 0.7]]))
    np.testing.assert_array_equal(compound_returns(r, 1).samples, r.values)


def test_compound_returns_blocks_and_overlap():
    r = ReturnMatrix(np.array([0.1, 0.2, -0.1, 0.05, 0.3]))
    s = compound_returns(r, 2).samples[:, 0]
    np.testing.assert_allclose(s, [1.1 * 1.2 - 1, 0.9 * 1.05 - 1])
    o = compound_returns(r, 2, overlapping=True).samples[:, 0]
    assert o.size == 4
    np.testing.assert_allclose(o[1], 1.2 * 0.9 - 1)
    with pytest.raises(MarketDataError):
        compound_returns(r, 6)


def test_price_series_invariants():
    with pytest.raises(MarketDataError, match="non-positive"):
        _series([1.0, -1.0])
    with pytest.raises(MarketDataError):
        ReturnMatrix([-1.0])
