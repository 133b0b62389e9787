"""Increment framing, scaling, rollout forecasting, and checkpoints."""

from datetime import date, timedelta

import numpy as np
import pytest

from allocwise import forecasting as fc
from allocwise import lstm
from allocwise.errors import (
    InsufficientDataError,
    ModelStateError,
    SchemaValidationError,
)
from conftest import monotone_series


def series(values, start=date(2021, 3, 23)):
    vals = np.asarray(values, dtype=float)
    dates = tuple(start + timedelta(days=k) for k in range(len(vals)))
    return fc.TimeSeries(dates=dates, values=vals)


# --- TimeSeries / IncrementSeries -------------------------------------------

def test_series_requires_daily_spacing():
    dates = (date(2021, 3, 23), date(2021, 3, 25))
    with pytest.raises(ValueError):
        fc.TimeSeries(dates=dates, values=np.array([1.0, 2.0]))


def test_series_requires_increasing_dates():
    dates = (date(2021, 3, 23), date(2021, 3, 23))
    with pytest.raises(ValueError):
        fc.TimeSeries(dates=dates, values=np.array([1.0, 2.0]))


def test_series_warns_on_decreasing_values():
    with pytest.warns(fc.MonotonicityWarning):
        series([10.0, 9.0])


# --- to_increments / from_increments ----------------------------------------

def test_to_increments_basic():
    inc = fc.to_increments(series([10, 11, 13, 16]))
    assert inc.baseline == 10.0
    assert inc.deltas.tolist() == [1.0, 2.0, 3.0]


def test_to_increments_constant():
    inc = fc.to_increments(series([5, 5, 5]))
    assert inc.deltas.tolist() == [0.0, 0.0]


def test_to_increments_warns_on_decrease():
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", fc.MonotonicityWarning)
        s = series([10, 9])
    with pytest.warns(fc.MonotonicityWarning):
        inc = fc.to_increments(s)
    assert inc.deltas.tolist() == [-1.0]


def test_to_increments_too_short():
    with pytest.raises(InsufficientDataError):
        fc.to_increments(series([10]))


def test_from_increments_basic():
    inc = fc.to_increments(series([10, 11, 13, 16]))
    back = fc.from_increments(inc)
    assert back.values.tolist() == [10.0, 11.0, 13.0, 16.0]


def test_from_increments_empty_deltas():
    inc = fc.IncrementSeries(
        dates=(date(2021, 3, 23),), deltas=np.array([]), baseline=0.0
    )
    assert fc.from_increments(inc).values.tolist() == [0.0]


def test_round_trip_is_identity():
    rng = np.random.default_rng(4)
    for _ in range(50):
        s = monotone_series(rng, int(rng.integers(2, 200)))
        back = fc.from_increments(fc.to_increments(s))
        assert np.array_equal(back.values, s.values)
        assert back.dates == s.dates


# --- ScalerSpec --------------------------------------------------------------

def test_scaler_round_trip():
    sc = fc.ScalerSpec(min=2.0, max=10.0)
    xs = np.linspace(2.0, 10.0, 31)
    assert sc.inverse(sc.transform(xs)) == pytest.approx(xs, abs=1e-12)


def test_scaler_requires_span():
    with pytest.raises(ValueError):
        fc.ScalerSpec(min=1.0, max=1.0)


def test_scaler_fit_constant_input_fallback():
    sc = fc.ScalerSpec.fit(np.array([7.0, 7.0, 7.0]))
    assert sc.max > sc.min
    assert sc.transform(np.array([7.0]))[0] == pytest.approx(0.0)


# --- make_windows -------------------------------------------------------------

def test_make_windows_basic():
    w, t = fc.make_windows(np.array([1.0, 2, 3, 4]), lookback=2)
    assert w.tolist() == [[1, 2], [2, 3]]
    assert t.tolist() == [3, 4]


def test_make_windows_boundary():
    with pytest.raises(InsufficientDataError):
        fc.make_windows(np.array([1.0, 2.0]), lookback=2)


def test_make_windows_count_law():
    w, t = fc.make_windows(np.arange(100, dtype=float), lookback=30)
    assert len(w) == 70 and len(t) == 70


# --- forecast ----------------------------------------------------------------

def _manual_model(lookback, scaler, by=0.0, hidden=4):
    params = lstm.zero_parameters(hidden)
    params.by[:] = by
    return fc.SeriesModel(
        params=params, scaler=scaler, lookback=lookback, seed=0, trained=True
    )


def test_forecast_zero_predictor_is_flat():
    s = monotone_series(np.random.default_rng(1), 60)
    scaler = fc.ScalerSpec(min=0.0, max=1.0)
    model = _manual_model(30, scaler)
    out = fc.forecast(model, s, horizon=90)
    assert len(out.values) == 90
    assert np.all(out.values == s.values[-1])
    assert out.dates[0] == s.dates[-1] + timedelta(days=1)


def test_forecast_constant_delta_is_ramp():
    s = monotone_series(np.random.default_rng(2), 60)
    scaler = fc.ScalerSpec(min=0.0, max=100.0)
    model = _manual_model(30, scaler, by=0.25)  # inverse-scales to 25/day
    out = fc.forecast(model, s, horizon=10)
    deltas = np.diff(np.concatenate([[s.values[-1]], out.values]))
    assert deltas == pytest.approx(np.full(10, 25.0), abs=1e-9)


def test_forecast_requires_trained_model():
    s = monotone_series(np.random.default_rng(3), 60)
    model = fc.create_model(lookback=30, hidden_size=4, seed=0)
    with pytest.raises(ModelStateError):
        fc.forecast(model, s, horizon=5)


def test_forecast_requires_enough_history():
    s = monotone_series(np.random.default_rng(4), 10)
    model = _manual_model(30, fc.ScalerSpec(min=0.0, max=1.0))
    with pytest.raises(InsufficientDataError):
        fc.forecast(model, s, horizon=5)


def test_forecast_trained_end_to_end():
    s = monotone_series(np.random.default_rng(5), 120)
    model, curve = fc.fit_forecaster(s, lookback=14, hidden_size=8, epochs=5,
                                     seed=3)
    assert len(curve) == 5
    out = fc.forecast(model, s, horizon=30)
    assert len(out.values) == 30
    assert np.all(np.diff(out.values) >= 0)
    assert out.values[0] >= s.values[-1]


def test_forecast_deterministic_per_seed():
    s = monotone_series(np.random.default_rng(6), 100)
    m1, c1 = fc.fit_forecaster(s, lookback=10, hidden_size=6, epochs=3, seed=9)
    m2, c2 = fc.fit_forecaster(s, lookback=10, hidden_size=6, epochs=3, seed=9)
    assert c1 == c2
    f1 = fc.forecast(m1, s, horizon=20)
    f2 = fc.forecast(m2, s, horizon=20)
    assert np.array_equal(f1.values, f2.values)


def test_fit_forecaster_scaler_uses_training_split():
    rng = np.random.default_rng(7)
    s = monotone_series(rng, 100)
    model, _ = fc.fit_forecaster(s, lookback=10, hidden_size=4, epochs=1,
                                 seed=0, train_fraction=0.5)
    inc = fc.to_increments(s)
    head = inc.deltas[: int(round(0.5 * len(inc.deltas)))]
    assert model.scaler.min == float(head.min())
    assert model.scaler.max == float(head.max())


# --- checkpoints --------------------------------------------------------------

def test_checkpoint_round_trip_bit_exact():
    s = monotone_series(np.random.default_rng(8), 80)
    model, _ = fc.fit_forecaster(s, lookback=10, hidden_size=5, epochs=2,
                                 seed=1)
    text = fc.save_checkpoint(model)
    again = fc.load_checkpoint(text)
    assert np.array_equal(again.params.flatten(), model.params.flatten())
    assert again.scaler.min == model.scaler.min
    assert again.scaler.max == model.scaler.max
    assert again.lookback == model.lookback
    f1 = fc.forecast(model, s, horizon=15)
    f2 = fc.forecast(again, s, horizon=15)
    assert np.array_equal(f1.values, f2.values)


def test_checkpoint_rejects_unknown_schema():
    s = monotone_series(np.random.default_rng(9), 60)
    model, _ = fc.fit_forecaster(s, lookback=10, hidden_size=4, epochs=1,
                                 seed=0)
    text = fc.save_checkpoint(model).replace(
        '"schema_version": 1', '"schema_version": 99'
    )
    with pytest.raises(SchemaValidationError):
        fc.load_checkpoint(text)
