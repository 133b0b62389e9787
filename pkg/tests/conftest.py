"""Shared fixtures and generators for the test suite."""

from __future__ import annotations

from datetime import date, timedelta

import numpy as np
import pytest

from allocwise.ahp import JudgmentMatrix
from allocwise.forecasting import TimeSeries

# The bundled 4x4 judgment matrix, verbatim (criteria NoR, TC, NoS, Cost).
BUNDLED_ENTRIES = [
    [1.0, 0.333, 22.0, 8.0],
    [3.0, 1.0, 5.0, 6.024],
    [0.5, 0.2, 1.0, 8.0],
    [0.125, 0.166, 0.125, 1.0],
]

BUNDLED_CRITERIA = ("NoR", "TC", "NoS", "Cost")

# Dense-eigensolver oracle values for the bundled matrix, frozen from
# numpy.linalg.eig on the verbatim entries.
ORACLE_LAMBDA = 6.289629822359096
ORACLE_WEIGHTS = (
    0.4788103372112876,
    0.3954549712926157,
    0.09965467153981614,
    0.02608001995628062,
)


def bundled_judgment_matrix() -> JudgmentMatrix:
    return JudgmentMatrix(np.array(BUNDLED_ENTRIES), BUNDLED_CRITERIA)


def random_consistent_matrix(rng: np.random.Generator, n: int):
    """Perfectly consistent matrix a(i,j) = w(i)/w(j) plus its weights."""
    w = rng.uniform(0.1, 10.0, size=n)
    entries = w[:, None] / w[None, :]
    return JudgmentMatrix(entries), w / w.sum()


def random_reciprocal_matrix(rng: np.random.Generator, n: int) -> JudgmentMatrix:
    """Random positive reciprocal matrix with Saaty-style judgments."""
    anchors = np.array([1, 2, 3, 4, 5, 6, 7, 8, 9], dtype=float)
    entries = np.ones((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            v = rng.choice(anchors)
            if rng.random() < 0.5:
                v = 1.0 / v
            entries[i, j] = v
            entries[j, i] = 1.0 / v
    return JudgmentMatrix(entries)


def monotone_series(
    rng: np.random.Generator,
    length: int,
    start: date = date(2021, 3, 23),
    baseline: float = 0.0,
) -> TimeSeries:
    """Random integer-valued non-decreasing daily series."""
    deltas = rng.integers(0, 10_000, size=length - 1).astype(float)
    values = baseline + np.concatenate([[0.0], np.cumsum(deltas)])
    dates = tuple(start + timedelta(days=k) for k in range(length))
    return TimeSeries(dates=dates, values=values)


@pytest.fixture
def bundled_matrix_fixture():
    return bundled_judgment_matrix()


@pytest.fixture
def store(tmp_path):
    from allocwise.store import Store

    return Store(tmp_path / "store")


@pytest.fixture
def client(tmp_path):
    from fastapi.testclient import TestClient

    from allocwise.api import create_app
    from allocwise.config import Config

    app = create_app(Config(store_dir=tmp_path / "store"))
    with TestClient(app, raise_server_exceptions=False) as c:
        yield c
