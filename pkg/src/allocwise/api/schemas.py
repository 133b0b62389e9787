"""Request/response bodies for the HTTP service.

Wire format uses plain JSON numbers; the decimal-string encoding is a
storage concern only. Every 4xx/5xx body is an ApiErrorBody.
"""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..allocation import DEFAULT_PENALTY_RATE
from ..forecasting import (
    DEFAULT_EPOCHS,
    DEFAULT_HIDDEN_SIZE,
    DEFAULT_HORIZON,
    DEFAULT_LOOKBACK,
)
from ..lstm import DEFAULT_BATCH_SIZE, DEFAULT_LR

ERROR_CODES = (
    "invalid_request",
    "invalid_matrix",
    "non_convergent",
    "not_found",
    "degenerate",
    "insufficient_data",
    "id_conflict",
    "integrity",
    "timeout",
    "internal",
    "method_not_allowed",
    "http_error",
)


class ApiErrorBody(BaseModel):
    code: str
    message: str
    details: Optional[object] = None


class MatrixBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    criteria: Optional[list[str]] = None
    entries: list[list[float]]


class AnalyzeRequest(MatrixBody):
    tol: Optional[float] = Field(default=None, gt=0)
    max_iter: Optional[int] = Field(default=None, ge=1)
    strict_scale: bool = False


class ConsistencyBody(BaseModel):
    lambda_max: float
    ci: float
    ri: float
    cr: float
    passes: bool


class AnalyzeResponse(BaseModel):
    criteria: list[str]
    weights: list[float]
    consistency: ConsistencyBody
    warnings: list[str]


class TierBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    NoR: float
    TC: float
    NoS: float
    Cost: float


class MatrixField(BaseModel):
    model_config = ConfigDict(extra="forbid")

    matrix: MatrixBody


WeightsField = Union[list[float], MatrixField]


class ScenarioCore(BaseModel):
    """Scenario payload without identity, for ad-hoc allocation."""

    model_config = ConfigDict(extra="forbid")

    district: Optional[str] = None
    weights: WeightsField
    tiers: dict[Literal["CenH", "ComH", "HC"], TierBody]
    penalty_rate: float = Field(default=DEFAULT_PENALTY_RATE, ge=0)
    dataset_id: Optional[str] = None

    @model_validator(mode="after")
    def _complete_tiers(self):
        missing = {"CenH", "ComH", "HC"} - set(self.tiers)
        if missing:
            raise ValueError(f"tiers missing {sorted(missing)}")
        return self


class ScenarioDoc(ScenarioCore):
    """Full stored scenario as exchanged with the scenarios endpoints."""

    id: str = Field(pattern=r"^[a-z0-9][a-z0-9_-]*$")
    district: str
    created: str = ""
    modified: str = ""
    schema_version: int = 1


class ScenarioSummary(BaseModel):
    id: str
    district: str


class ScenarioList(BaseModel):
    scenarios: list[ScenarioSummary]


class AllocateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario_id: Optional[str] = None
    scenario: Optional[ScenarioCore] = None
    penalty_rate: Optional[float] = Field(default=None, ge=0)
    invert_cost: Optional[bool] = None
    penalty_base: Optional[Literal["log", "raw"]] = None

    @model_validator(mode="after")
    def _one_source(self):
        if (self.scenario_id is None) == (self.scenario is None):
            raise ValueError(
                "provide exactly one of scenario_id or scenario"
            )
        return self


class AllocateResponse(BaseModel):
    scenario_id: Optional[str]
    district: Optional[str]
    weights: list[float]
    raw_index: dict[str, float]
    penalized_index: dict[str, float]
    ratio: dict[str, float]
    ratio_tenths: dict[str, int]
    penalty_rate: float
    warnings: list[str]


class TrainingBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    lookback: int = Field(default=DEFAULT_LOOKBACK, ge=2, le=365)
    hidden_size: int = Field(default=DEFAULT_HIDDEN_SIZE, ge=1, le=256)
    epochs: int = Field(default=DEFAULT_EPOCHS, ge=1, le=2000)
    lr: float = Field(default=DEFAULT_LR, gt=0)
    seed: int = 0
    batch_size: int = Field(default=DEFAULT_BATCH_SIZE, ge=1)


class ForecastRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dataset_id: str
    horizon: int = Field(default=DEFAULT_HORIZON, ge=1, le=365)
    training: TrainingBody = TrainingBody()


class ForecastResponse(BaseModel):
    dataset_id: str
    horizon: int
    seed: int
    last_observed_date: str
    last_observed_value: float
    dates: list[str]
    values: list[float]
    loss_curve: list[float]


__all__ = [
    "ApiErrorBody",
    "AnalyzeRequest",
    "AnalyzeResponse",
    "AllocateRequest",
    "AllocateResponse",
    "ConsistencyBody",
    "ERROR_CODES",
    "ForecastRequest",
    "ForecastResponse",
    "MatrixBody",
    "ScenarioCore",
    "ScenarioDoc",
    "ScenarioList",
    "ScenarioSummary",
    "TierBody",
    "TrainingBody",
]
