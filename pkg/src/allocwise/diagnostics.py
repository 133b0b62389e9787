"""Collinearity diagnostics for candidate criteria.

Supports the preprocessing story behind the criterion set: a simple OLS
fit between two candidate features, the VIF = 1/(1-R^2) collinearity
measure, and the log10 transform applied to resident counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ColumnDomainError, DegenerateRegressorError

# r_squared this close to 1 counts as perfect collinearity.
PERFECT_R2_TOL = 1e-12

VIF_ELEVATED = 5.0
VIF_SEVERE = 10.0


@dataclass(frozen=True)
class FeatureColumn:
    """Named vector of observations for one candidate criterion."""

    name: str
    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1:
            raise ValueError(f"column {self.name!r} must be 1-dimensional")
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"column {self.name!r} contains non-finite values")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class OlsFit:
    """Least-squares line y = slope*x + intercept.

    ``t_stat`` (slope / its standard error) is informational only; no
    decision in the pipeline gates on it.
    """

    slope: float
    intercept: float
    r_squared: float
    t_stat: float


@dataclass(frozen=True)
class CollinearityReport:
    r_squared: float
    vif: float  # math.inf when collinearity is perfect
    verdict: str  # acceptable | elevated | severe

    @property
    def perfect(self) -> bool:
        return math.isinf(self.vif)

    def to_dict(self) -> dict:
        return {
            "r_squared": self.r_squared,
            "vif": None if self.perfect else self.vif,
            "perfect_collinearity": self.perfect,
            "verdict": self.verdict,
        }


def _require_pair(x: FeatureColumn, y: FeatureColumn):
    if len(x) != len(y):
        raise ValueError(
            f"columns {x.name!r} and {y.name!r} differ in length "
            f"({len(x)} vs {len(y)})"
        )
    if len(x) < 3:
        raise ValueError("regression needs at least 3 observations")


def ols_fit(x: FeatureColumn, y: FeatureColumn) -> OlsFit:
    """Least-squares line of ``y`` on ``x``.

    r_squared = 1 - SS_res/SS_tot, defined as 0 when y has zero
    variance. Zero variance in x raises, since the slope is undefined.
    """
    _require_pair(x, y)
    xv, yv = x.values, y.values
    n = len(xv)
    xc = xv - xv.mean()
    yc = yv - yv.mean()
    sxx = float(xc @ xc)
    if sxx == 0.0:
        raise DegenerateRegressorError(
            f"regressor {x.name!r} has zero variance"
        )
    sxy = float(xc @ yc)
    slope = sxy / sxx
    intercept = float(yv.mean() - slope * xv.mean())
    ss_tot = float(yc @ yc)
    if ss_tot == 0.0:
        return OlsFit(slope=slope, intercept=intercept, r_squared=0.0, t_stat=0.0)
    resid = yv - (slope * xv + intercept)
    ss_res = float(resid @ resid)
    r2 = 1.0 - ss_res / ss_tot
    r2 = min(max(r2, 0.0), 1.0)
    if ss_res <= 0.0 or n <= 2:
        t = math.inf
    else:
        se = math.sqrt(ss_res / (n - 2) / sxx)
        t = slope / se
    return OlsFit(slope=slope, intercept=intercept, r_squared=r2, t_stat=t)


def vif_pair(x: FeatureColumn, y: FeatureColumn) -> CollinearityReport:
    """Variance inflation factor for a two-feature pair.

    For two variables the regression R^2 equals the squared sample
    correlation, so the report is symmetric in (x, y). R^2 = 1 within
    1e-12 is flagged as perfect collinearity (infinite VIF).
    """
    fit = ols_fit(x, y)
    r2 = fit.r_squared
    if r2 >= 1.0 - PERFECT_R2_TOL:
        return CollinearityReport(r_squared=r2, vif=math.inf, verdict="severe")
    vif = 1.0 / (1.0 - r2)
    if vif < VIF_ELEVATED:
        verdict = "acceptable"
    elif vif <= VIF_SEVERE:
        verdict = "elevated"
    else:
        verdict = "severe"
    return CollinearityReport(r_squared=r2, vif=vif, verdict=verdict)


def log10_column(c: FeatureColumn) -> FeatureColumn:
    """Elementwise log10; the result's name records the transform."""
    for i, v in enumerate(c.values):
        if v <= 0:
            raise ColumnDomainError(
                f"log10 undefined for value {v!r} at index {i} "
                f"of column {c.name!r}",
                index=i,
            )
    return FeatureColumn(name=f"{c.name}_log10", values=np.log10(c.values))


def synthetic_collinear_pair(
    n: int, r_squared: float, seed: int = 0
) -> tuple[FeatureColumn, FeatureColumn]:
    """Column pair whose sample R^2 hits ``r_squared`` exactly.

    Builds y = x + c*z with z orthogonalized against [1, x] and c chosen
    in closed form, so the pair reproduces a target VIF without any real
    survey data. Used by tests; exported because it is handy for demos.
    """
    if not (0.0 <= r_squared < 1.0):
        raise ValueError("r_squared must lie in [0, 1)")
    if n < 4:
        raise ValueError("need at least 4 points")
    rng = np.random.default_rng(seed)
    x = np.linspace(0.0, 1.0, n) + 0.01 * rng.standard_normal(n)
    z = rng.standard_normal(n)
    xc = x - x.mean()
    zc = z - z.mean()
    zc = zc - (zc @ xc) / (xc @ xc) * xc  # now orthogonal to x and centered
    if r_squared == 0.0:
        y = zc
    else:
        var_x = float(xc @ xc)
        var_z = float(zc @ zc)
        c = math.sqrt(var_x * (1.0 - r_squared) / (r_squared * var_z))
        y = x + c * zc
    return (
        FeatureColumn(name="x", values=x),
        FeatureColumn(name="y", values=y),
    )
