"""HTTP service exposing the analysis pipeline under /api/v1.

Compute endpoints are stateless: responses are pure functions of the
request body, the store snapshot, and the seed. Every 4xx/5xx body is
an ApiError ``{code, message, details}``. Long requests are cut off by
a configurable timeout (default 120 s).
"""

from __future__ import annotations

import asyncio

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from .. import ahp
from ..allocation import allocate_district, FacilityTier, TierKind
from ..config import Config
from ..errors import (
    AllocwiseError,
    AlignmentError,
    ColumnDomainError,
    ConvergenceError,
    DegenerateInputError,
    DegenerateRegressorError,
    DivergenceError,
    IdConflictError,
    InsufficientDataError,
    IntegrityError,
    InvalidMatrixError,
    ModelStateError,
    NotFoundError,
    OrderError,
    ParseError,
    SchemaValidationError,
    StructuralMatrixError,
)
from ..forecasting import TimeSeries, fit_forecaster, forecast
from ..store import Scenario, Store, scenario_to_doc
from . import schemas

API_PREFIX = "/api/v1"

# Exception type -> (HTTP status, machine-readable code).
_ERROR_MAP: tuple[tuple[type, int, str], ...] = (
    (StructuralMatrixError, 400, "invalid_matrix"),
    (OrderError, 400, "invalid_matrix"),
    (InvalidMatrixError, 400, "invalid_matrix"),
    (ConvergenceError, 422, "non_convergent"),
    (NotFoundError, 404, "not_found"),
    (IdConflictError, 409, "id_conflict"),
    (DegenerateInputError, 422, "degenerate"),
    (DegenerateRegressorError, 422, "degenerate"),
    (InsufficientDataError, 422, "insufficient_data"),
    (DivergenceError, 422, "non_convergent"),
    (AlignmentError, 400, "invalid_request"),
    (ColumnDomainError, 400, "invalid_request"),
    (ParseError, 400, "invalid_request"),
    (SchemaValidationError, 400, "invalid_request"),
    (ModelStateError, 500, "internal"),
    (IntegrityError, 500, "integrity"),
)


def _error_response(status: int, code: str, message: str, details=None):
    body = schemas.ApiErrorBody(code=code, message=message, details=details)
    return JSONResponse(status_code=status, content=body.model_dump())


def _matrix_from_body(body: schemas.MatrixBody) -> ahp.JudgmentMatrix:
    return ahp.JudgmentMatrix.from_dict(
        {"criteria": body.criteria, "entries": body.entries}
    )


def _weights_from_field(weights_field) -> tuple:
    """Return (matrix | None, weight_vector | None) from the wire form."""
    if isinstance(weights_field, schemas.MatrixField):
        return _matrix_from_body(weights_field.matrix), None
    vec = np.asarray(weights_field, dtype=float)
    if vec.ndim != 1 or vec.size != 4:
        raise SchemaValidationError("explicit weights must be a 4-vector")
    if not np.all(np.isfinite(vec)) or vec.sum() <= 0:
        raise SchemaValidationError(
            "explicit weights must be finite with a positive sum"
        )
    return None, ahp.normalize_weights(vec)


def _scenario_from_core(
    body: schemas.ScenarioCore, scenario_id: str, district: str | None
) -> Scenario:
    matrix, weights = _weights_from_field(body.weights)
    tiers = {
        kind: FacilityTier(kind=TierKind(kind), features=tier.model_dump())
        for kind, tier in body.tiers.items()
    }
    s = Scenario(
        id=scenario_id,
        district=district or body.district or "ad-hoc",
        tiers=tiers,
        matrix=matrix,
        weights=weights,
        penalty_rate=body.penalty_rate,
        dataset_id=body.dataset_id,
    )
    s.validate()
    return s


def _scenario_doc_response(s: Scenario) -> dict:
    return scenario_to_doc(s, numbers_as=float)


def _resolve_weights(s: Scenario, config: Config) -> ahp.WeightVector:
    if s.weights is not None:
        return s.weights
    weights, _report = ahp.analyze(
        s.matrix,
        tol=config.solver_tol,
        max_iter=config.solver_max_iter,
        ri_table=config.ri_table,
    )
    return weights


def create_app(config: Config | None = None, store: Store | None = None) -> FastAPI:
    config = config or Config()
    if store is None:
        store = Store(config.store_dir)
    store.ensure_bundled()

    app = FastAPI(
        title="allocwise",
        version="1.0.0",
        description=(
            "Multi-criteria resource allocation planner: judgment-matrix "
            "weighting with consistency checking, facility-tier allocation "
            "with a crowd-gathering penalty, and demand forecasting."
        ),
    )
    app.state.store = store
    app.state.config = config

    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(config.cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.middleware("http")
    async def request_timeout(request: Request, call_next):
        try:
            return await asyncio.wait_for(
                call_next(request), timeout=config.request_timeout
            )
        except asyncio.TimeoutError:
            return _error_response(
                504,
                "timeout",
                f"request exceeded {config.request_timeout} s",
            )

    @app.exception_handler(AllocwiseError)
    async def allocwise_error(request: Request, exc: AllocwiseError):
        for etype, status, code in _ERROR_MAP:
            if isinstance(exc, etype):
                details = None
                if isinstance(exc, InvalidMatrixError) and exc.report is not None:
                    details = exc.report.to_dict()
                elif isinstance(exc, SchemaValidationError):
                    details = exc.details or None
                elif isinstance(exc, ParseError) and exc.line is not None:
                    details = {"line": exc.line}
                return _error_response(status, code, str(exc), details)
        return _error_response(500, "internal", str(exc))

    @app.exception_handler(RequestValidationError)
    async def body_validation_error(request: Request, exc: RequestValidationError):
        details = [
            {
                "loc": [str(p) for p in err.get("loc", ())],
                "msg": err.get("msg", ""),
                "type": err.get("type", ""),
            }
            for err in exc.errors()
        ]
        return _error_response(400, "invalid_request", "request body is invalid",
                               details)

    @app.exception_handler(StarletteHTTPException)
    async def http_error(request: Request, exc: StarletteHTTPException):
        code = {404: "not_found", 405: "method_not_allowed"}.get(
            exc.status_code, "http_error"
        )
        return _error_response(exc.status_code, code, str(exc.detail))

    err_doc = {
        "4XX": {"model": schemas.ApiErrorBody},
        "5XX": {"model": schemas.ApiErrorBody},
    }

    @app.post(
        f"{API_PREFIX}/ahp/analyze",
        response_model=schemas.AnalyzeResponse,
        responses=err_doc,
    )
    def ahp_analyze(body: schemas.AnalyzeRequest) -> schemas.AnalyzeResponse:
        m = _matrix_from_body(body)
        report = ahp.validate_matrix(m, strict_scale=body.strict_scale)
        if not report.is_valid:
            raise InvalidMatrixError(
                "; ".join(report.error_messages()), report=report
            )
        weights, consistency = ahp.analyze(
            m,
            tol=body.tol if body.tol is not None else config.solver_tol,
            max_iter=(
                body.max_iter if body.max_iter is not None
                else config.solver_max_iter
            ),
            ri_table=config.ri_table,
        )
        return schemas.AnalyzeResponse(
            criteria=list(m.criteria or ()),
            weights=weights.tolist(),
            consistency=schemas.ConsistencyBody(**consistency.to_dict()),
            warnings=report.warning_messages(),
        )

    @app.post(
        f"{API_PREFIX}/allocate",
        response_model=schemas.AllocateResponse,
        responses=err_doc,
    )
    def allocate(body: schemas.AllocateRequest) -> schemas.AllocateResponse:
        if body.scenario_id is not None:
            s = store.load_scenario(body.scenario_id)
        else:
            s = _scenario_from_core(body.scenario, "ad-hoc", None)
        weights = _resolve_weights(s, config)
        rate = (
            body.penalty_rate if body.penalty_rate is not None
            else s.penalty_rate
        )
        result = allocate_district(
            weights,
            s.tiers,
            penalty_rate=rate,
            invert_cost=bool(body.invert_cost),
            penalty_base=body.penalty_base or "log",
        )
        return schemas.AllocateResponse(
            scenario_id=body.scenario_id,
            district=s.district,
            **result.to_dict(),
        )

    @app.post(
        f"{API_PREFIX}/forecast",
        response_model=schemas.ForecastResponse,
        responses=err_doc,
    )
    def forecast_endpoint(body: schemas.ForecastRequest) -> schemas.ForecastResponse:
        ds = store.load_dataset(body.dataset_id)
        if ds.kind != "time_series":
            raise SchemaValidationError(
                f"dataset {body.dataset_id!r} is a {ds.kind}; forecasting "
                "needs a time_series"
            )
        series: TimeSeries = ds.payload
        t = body.training
        model, loss_curve = fit_forecaster(
            series,
            lookback=t.lookback,
            hidden_size=t.hidden_size,
            epochs=t.epochs,
            lr=t.lr,
            seed=t.seed,
            batch_size=t.batch_size,
        )
        out = forecast(model, series, horizon=body.horizon)
        return schemas.ForecastResponse(
            dataset_id=body.dataset_id,
            horizon=body.horizon,
            seed=t.seed,
            last_observed_date=series.dates[-1].isoformat(),
            last_observed_value=float(series.values[-1]),
            dates=[d.isoformat() for d in out.dates],
            values=[float(v) for v in out.values],
            loss_curve=[float(x) for x in loss_curve],
        )

    @app.get(
        f"{API_PREFIX}/scenarios",
        response_model=schemas.ScenarioList,
        responses=err_doc,
    )
    def list_scenarios() -> schemas.ScenarioList:
        items = []
        for sid in store.list_scenarios():
            s = store.load_scenario(sid)
            items.append(schemas.ScenarioSummary(id=s.id, district=s.district))
        return schemas.ScenarioList(scenarios=items)

    @app.put(f"{API_PREFIX}/scenarios", responses=err_doc, status_code=201)
    def create_scenario(body: schemas.ScenarioDoc) -> dict:
        s = _scenario_from_core(body, body.id, body.district)
        stored = store.save_scenario(s, overwrite=False)
        return _scenario_doc_response(stored)

    @app.get(f"{API_PREFIX}/scenarios/{{scenario_id}}", responses=err_doc)
    def get_scenario(scenario_id: str) -> dict:
        return _scenario_doc_response(store.load_scenario(scenario_id))

    @app.put(f"{API_PREFIX}/scenarios/{{scenario_id}}", responses=err_doc)
    def replace_scenario(scenario_id: str, body: schemas.ScenarioDoc) -> dict:
        if body.id != scenario_id:
            raise SchemaValidationError(
                f"body id {body.id!r} does not match path id {scenario_id!r}"
            )
        if not store.has_scenario(scenario_id):
            raise NotFoundError(f"no scenario with id {scenario_id!r}")
        s = _scenario_from_core(body, body.id, body.district)
        s.created = body.created
        stored = store.save_scenario(s, overwrite=True)
        return _scenario_doc_response(stored)

    return app


__all__ = ["create_app", "API_PREFIX"]
