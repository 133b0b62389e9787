"""Bundled example inputs.

Ships the two worked districts (Gongshu in Hangzhou, Daoli in Harbin)
with their shared judgment matrix, plus a deterministic synthetic
national-scale vaccination series for forecasting demos and tests. The
synthetic series stands in for the original source data, which is not
redistributable.
"""

from __future__ import annotations

from datetime import date, timedelta

import numpy as np

from .ahp import JudgmentMatrix
from .allocation import FacilityTier, TierKind
from .forecasting import TimeSeries

AHP_CRITERIA = ("NoR", "TC", "NoS", "Cost")

# Pairwise judgments over (NoR, TC, NoS, Cost), transcribed verbatim.
# Note the (NoR, NoS) pair 22 / 0.5 breaks reciprocity and 22, 6.024
# sit outside the 1-9 scale; validation reports both, analysis still runs.
JUDGMENT_ENTRIES = (
    (1.0, 0.333, 22.0, 8.0),
    (3.0, 1.0, 5.0, 6.024),
    (0.5, 0.2, 1.0, 8.0),
    (0.125, 0.166, 0.125, 1.0),
)

GONGSHU_TIERS = {
    "CenH": {"NoR": 2.041, "TC": 0.3, "NoS": 2.049, "Cost": 0.3},
    "ComH": {"NoR": 2.014, "TC": 0.5, "NoS": 1.729, "Cost": 0.2},
    "HC": {"NoR": 1.513, "TC": 0.6, "NoS": 0.853, "Cost": 0.1},
}

DAOLI_TIERS = {
    "CenH": {"NoR": 2.040, "TC": 0.3, "NoS": 2.545, "Cost": 0.9},
    "ComH": {"NoR": 1.938, "TC": 0.6, "NoS": 0.992, "Cost": 0.6},
    "HC": {"NoR": 1.510, "TC": 0.8, "NoS": 0.437, "Cost": 0.1},
}

SYNTHETIC_DATASET_ID = "synthetic-national"
SYNTHETIC_START = date(2021, 3, 23)
SYNTHETIC_DAYS = 501  # 500 daily increments
SYNTHETIC_SEED = 2021
SYNTHETIC_BASELINE = 1_000_000.0


def bundled_matrix() -> JudgmentMatrix:
    return JudgmentMatrix(
        entries=np.array(JUDGMENT_ENTRIES), criteria=AHP_CRITERIA
    )


def bundled_tiers(district: str) -> dict[str, FacilityTier]:
    table = {"gongshu": GONGSHU_TIERS, "daoli": DAOLI_TIERS}[district]
    return {
        kind: FacilityTier(kind=TierKind(kind), features=dict(feats))
        for kind, feats in table.items()
    }


def synthetic_series(
    days: int = SYNTHETIC_DAYS, seed: int = SYNTHETIC_SEED
) -> TimeSeries:
    """Deterministic national-scale cumulative vaccination curve.

    Three overlapping campaign waves modulated by a weekly cycle and
    mild multiplicative noise; increments stay non-negative and the
    cumulative total lands in the low billions, the right order of
    magnitude for a national rollout.
    """
    rng = np.random.default_rng(seed)
    t = np.arange(days - 1, dtype=float)
    waves = (
        8.0e6 * np.exp(-(((t - 80.0) / 50.0) ** 2))
        + 1.2e7 * np.exp(-(((t - 220.0) / 60.0) ** 2))
        + 5.0e6 * np.exp(-(((t - 400.0) / 70.0) ** 2))
    )
    weekly = 1.0 + 0.15 * np.sin(2.0 * np.pi * t / 7.0)
    noise = 1.0 + 0.05 * rng.standard_normal(days - 1)
    increments = np.rint(np.clip(waves * weekly * noise, 0.0, None))
    values = SYNTHETIC_BASELINE + np.concatenate([[0.0], np.cumsum(increments)])
    dates = tuple(SYNTHETIC_START + timedelta(days=k) for k in range(days))
    return TimeSeries(dates=dates, values=values)
