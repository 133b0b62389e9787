"""Demand forecasting on cumulative daily series.

The forecaster never trains on raw cumulative counts: the series is
converted to daily increments (the increments are the labels), min-max
scaled, windowed, and fed to the LSTM. Forecasts roll the model out
autoregressively and accumulate the predicted increments back onto the
last observed cumulative value.
"""

from __future__ import annotations

import json
import warnings as _warnings
from dataclasses import dataclass, field
from datetime import date, timedelta

import numpy as np

from . import lstm
from .errors import InsufficientDataError, ModelStateError, SchemaValidationError
from .lstm import LstmParameters, PARAM_FIELDS

CHECKPOINT_SCHEMA_VERSION = 1

DEFAULT_LOOKBACK = 30
DEFAULT_HIDDEN_SIZE = 32
DEFAULT_EPOCHS = 200
DEFAULT_HORIZON = 90


class MonotonicityWarning(UserWarning):
    """Cumulative values decreased somewhere; data kept as-is."""


@dataclass(frozen=True)
class TimeSeries:
    """Daily cumulative counts.

    Dates must be strictly increasing with exact daily spacing.
    Decreases in the cumulative values are suspicious for count data and
    trigger a MonotonicityWarning, but the series is kept verbatim.
    """

    dates: tuple[date, ...]
    values: np.ndarray

    def __post_init__(self):
        dates = tuple(self.dates)
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or len(dates) != len(vals):
            raise ValueError("dates and values must be 1-d and equal length")
        if len(dates) == 0:
            raise ValueError("series cannot be empty")
        for prev, cur in zip(dates, dates[1:]):
            if cur - prev != timedelta(days=1):
                raise ValueError(
                    f"dates must advance by exactly one day; {prev} -> {cur}"
                )
        if np.any(np.diff(vals) < 0):
            _warnings.warn(
                "cumulative series decreases at least once",
                MonotonicityWarning,
                stacklevel=2,
            )
        vals.flags.writeable = False
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class IncrementSeries:
    """Daily increments plus the cumulative baseline before the first one.

    ``dates[0]`` is the baseline's day; ``dates[1:]`` stamp the deltas,
    so the original cumulative series is exactly baseline + prefix sums.
    """

    dates: tuple[date, ...]
    deltas: np.ndarray
    baseline: float

    def __post_init__(self):
        dates = tuple(self.dates)
        deltas = np.asarray(self.deltas, dtype=float)
        if deltas.ndim != 1 or len(dates) != len(deltas) + 1:
            raise ValueError("need len(dates) == len(deltas) + 1")
        if np.any(deltas < 0):
            _warnings.warn(
                "negative daily increments present",
                MonotonicityWarning,
                stacklevel=2,
            )
        deltas.flags.writeable = False
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "deltas", deltas)
        object.__setattr__(self, "baseline", float(self.baseline))


def to_increments(s: TimeSeries) -> IncrementSeries:
    """Differencing: deltas[i] = values[i+1] - values[i]. Lossless."""
    if len(s) < 2:
        raise InsufficientDataError(
            f"need at least 2 points to difference, got {len(s)}"
        )
    return IncrementSeries(
        dates=s.dates,
        deltas=np.diff(s.values),
        baseline=float(s.values[0]),
    )


def from_increments(inc: IncrementSeries) -> TimeSeries:
    """Exact inverse of :func:`to_increments` (prefix sums + baseline)."""
    values = np.empty(len(inc.deltas) + 1)
    values[0] = inc.baseline
    # sequential sum (not np.cumsum) so prefix rounding matches the
    # one-delta-at-a-time semantics the round-trip law relies on
    acc = inc.baseline
    for i, d in enumerate(inc.deltas):
        acc = acc + d
        values[i + 1] = acc
    return TimeSeries(dates=inc.dates, values=values)


@dataclass(frozen=True)
class ScalerSpec:
    """Min-max normalization to [0, 1]."""

    min: float
    max: float

    def __post_init__(self):
        if not (self.max > self.min):
            raise ValueError(f"scaler needs max > min, got [{self.min}, {self.max}]")

    def transform(self, x):
        return (np.asarray(x, dtype=float) - self.min) / (self.max - self.min)

    def inverse(self, x):
        return np.asarray(x, dtype=float) * (self.max - self.min) + self.min

    @classmethod
    def fit(cls, values) -> "ScalerSpec":
        """Fit on the training split only. A constant input gets a unit
        span so it maps to 0 rather than dividing by zero."""
        arr = np.asarray(values, dtype=float)
        if arr.size == 0:
            raise InsufficientDataError("cannot fit a scaler on no data")
        lo = float(arr.min())
        hi = float(arr.max())
        if hi == lo:
            hi = lo + 1.0
        return cls(min=lo, max=hi)


def make_windows(inc, lookback: int) -> tuple[np.ndarray, np.ndarray]:
    """Sliding supervised pairs: ``lookback`` consecutive deltas -> next.

    Accepts an IncrementSeries (windows its deltas verbatim) or a plain
    array of already-scaled deltas. Returns (windows, targets) with
    len(deltas) - lookback rows.
    """
    if lookback < 1:
        raise ValueError("lookback must be >= 1")
    deltas = inc.deltas if isinstance(inc, IncrementSeries) else np.asarray(inc, dtype=float)
    n = len(deltas)
    if n <= lookback:
        raise InsufficientDataError(
            f"need more than lookback={lookback} increments, got {n}"
        )
    count = n - lookback
    windows = np.stack([deltas[i : i + lookback] for i in range(count)])
    return windows, deltas[lookback:].copy()


@dataclass
class SeriesModel:
    """LSTM parameters bundled with their preprocessing contract."""

    params: LstmParameters
    scaler: ScalerSpec | None
    lookback: int
    seed: int
    trained: bool = False
    loss_curve: list[float] = field(default_factory=list)

    @property
    def hidden_size(self) -> int:
        return self.params.hidden_size


def create_model(
    lookback: int = DEFAULT_LOOKBACK,
    hidden_size: int = DEFAULT_HIDDEN_SIZE,
    seed: int = 0,
) -> SeriesModel:
    return SeriesModel(
        params=lstm.init_parameters(hidden_size, seed),
        scaler=None,
        lookback=lookback,
        seed=seed,
    )


def train(
    model: SeriesModel,
    windows: np.ndarray,
    targets: np.ndarray,
    epochs: int,
    lr: float = lstm.DEFAULT_LR,
    seed: int = 0,
    batch_size: int = lstm.DEFAULT_BATCH_SIZE,
) -> tuple[SeriesModel, list[float]]:
    """Train on prepared (scaled) windows; returns (model, loss curve).

    The model is mutated in place and marked trained; the per-epoch
    curve is also appended to ``model.loss_curve``.
    """
    curve = lstm.train(
        model.params,
        windows,
        targets,
        epochs=epochs,
        lr=lr,
        seed=seed,
        batch_size=batch_size,
    )
    model.loss_curve.extend(curve)
    if epochs > 0:
        model.trained = True
    return model, curve


def fit_forecaster(
    series: TimeSeries,
    lookback: int = DEFAULT_LOOKBACK,
    hidden_size: int = DEFAULT_HIDDEN_SIZE,
    epochs: int = DEFAULT_EPOCHS,
    lr: float = lstm.DEFAULT_LR,
    seed: int = 0,
    batch_size: int = lstm.DEFAULT_BATCH_SIZE,
    train_fraction: float = 1.0,
) -> tuple[SeriesModel, list[float]]:
    """End-to-end pipeline: difference, scale, window, train.

    The scaler is fit on the training split only (the leading
    ``train_fraction`` of the increments); with the default fraction of
    1.0 the whole history is the training split.
    """
    if not (0.0 < train_fraction <= 1.0):
        raise ValueError("train_fraction must be in (0, 1]")
    inc = to_increments(series)
    n_train = max(1, int(round(train_fraction * len(inc.deltas))))
    scaler = ScalerSpec.fit(inc.deltas[:n_train])
    scaled = scaler.transform(inc.deltas[:n_train])
    windows, targets = make_windows(scaled, lookback)
    model = create_model(lookback=lookback, hidden_size=hidden_size, seed=seed)
    model.scaler = scaler
    train(
        model, windows, targets,
        epochs=epochs, lr=lr, seed=seed, batch_size=batch_size,
    )
    return model, model.loss_curve


def forecast(
    model: SeriesModel, series: TimeSeries, horizon: int = DEFAULT_HORIZON
) -> TimeSeries:
    """Autoregressive rollout of ``horizon`` daily increments.

    Each raw prediction is fed back as the next input; increments are
    then inverse-scaled, clamped at >= 0, and accumulated onto the last
    observed cumulative value, so the output (exactly ``horizon``
    points, starting the day after the series ends) never decreases.
    """
    if not model.trained or model.scaler is None:
        raise ModelStateError("model must be trained before forecasting")
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    inc = to_increments(series)
    if len(inc.deltas) < model.lookback:
        raise InsufficientDataError(
            f"series provides {len(inc.deltas)} increments, "
            f"need at least lookback={model.lookback}"
        )
    window = model.scaler.transform(inc.deltas[-model.lookback :]).tolist()
    scaled_preds = []
    for _ in range(horizon):
        pred = float(lstm.predict_batch(model.params, np.array([window]))[0])
        scaled_preds.append(pred)
        window = window[1:] + [pred]
    increments = np.maximum(model.scaler.inverse(scaled_preds), 0.0)
    last_date = series.dates[-1]
    dates = tuple(last_date + timedelta(days=k) for k in range(1, horizon + 1))
    values = float(series.values[-1]) + np.cumsum(increments)
    return TimeSeries(dates=dates, values=values)


def save_checkpoint(model: SeriesModel) -> str:
    """Serialize hyperparameters, scaler and flattened parameters.

    Floats are written as decimal strings via repr, which round-trips
    every finite double exactly.
    """
    doc = {
        "schema_version": CHECKPOINT_SCHEMA_VERSION,
        "kind": "lstm_forecaster",
        "hidden_size": model.hidden_size,
        "lookback": model.lookback,
        "seed": model.seed,
        "trained": model.trained,
        "scaler": (
            None
            if model.scaler is None
            else {"min": repr(model.scaler.min), "max": repr(model.scaler.max)}
        ),
        "loss_curve": [repr(x) for x in model.loss_curve],
        "parameters": {
            name: [repr(float(v)) for v in getattr(model.params, name).ravel()]
            for name in PARAM_FIELDS
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def load_checkpoint(text: str) -> SeriesModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaValidationError(f"checkpoint is not valid JSON: {exc}") from exc
    if doc.get("schema_version") != CHECKPOINT_SCHEMA_VERSION:
        raise SchemaValidationError(
            f"unsupported checkpoint schema_version {doc.get('schema_version')!r}"
        )
    hidden = int(doc["hidden_size"])
    blank = lstm.zero_parameters(hidden)
    for name in PARAM_FIELDS:
        arr = getattr(blank, name)
        vals = [float(v) for v in doc["parameters"][name]]
        if len(vals) != arr.size:
            raise SchemaValidationError(
                f"parameter {name} has {len(vals)} values, expected {arr.size}"
            )
        arr.flat[:] = vals
    scaler = None
    if doc.get("scaler") is not None:
        scaler = ScalerSpec(
            min=float(doc["scaler"]["min"]), max=float(doc["scaler"]["max"])
        )
    return SeriesModel(
        params=blank,
        scaler=scaler,
        lookback=int(doc["lookback"]),
        seed=int(doc["seed"]),
        trained=bool(doc["trained"]),
        loss_curve=[float(x) for x in doc.get("loss_curve", [])],
    )
