"""HTTP service exposing the risk engine.

The service is stateless per request: the model is loaded once at startup
and every response carries its fingerprint so clients can detect parameter
changes.  Report endpoints are mounted only when a dataset was loaded at
startup.  Validation failures return HTTP 400 with a field-level JSON body;
an unknown metric id returns HTTP 404.
"""

from __future__ import annotations

import datetime as dt
import json

from fastapi import APIRouter, FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import analytics, reports
from .allocation import RiskAllocation
from .dataset import DatasetManifest
from .errors import RiskGapError
from .market import DEFAULT_ALPHA, BucketMarketModel, load_default_model
from .metrics import METRIC_IDS, metric_value
from .schemas import (CandidateResult, HealthResponse, MetricsRequest,
                      MetricsResponse, ModelResponse, WhatIfRequest,
                      WhatIfResponse)
from .var_engine import classify_discrepancy, var, var_dollars


def create_app(model: BucketMarketModel | None = None,
               alpha: float | None = None,
               band_bps: float = 0.0,
               frame: analytics.RiskFrame | None = None,
               manifest: DatasetManifest | None = None) -> FastAPI:
    if model is None or alpha is None:
        default_model, default_alpha = load_default_model()
        model = model if model is not None else default_model
        alpha = alpha if alpha is not None else default_alpha

    app = FastAPI(title="riskgap service", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"],
    )
    state = {"model": model, "alpha": alpha, "band_bps": band_bps,
             "frame": frame, "manifest": manifest}

    @app.exception_handler(RequestValidationError)
    async def handle_validation(_: Request, exc: RequestValidationError) -> JSONResponse:
        first = exc.errors()[0] if exc.errors() else {}
        loc = [str(p) for p in first.get("loc", []) if p != "body"]
        return JSONResponse(status_code=400, content={
            "error": first.get("msg", "invalid request"),
            "field": ".".join(loc) or None,
        })

    @app.exception_handler(RiskGapError)
    async def handle_domain(_: Request, exc: RiskGapError) -> JSONResponse:
        body = {"error": str(exc)}
        if isinstance(exc, FieldError):
            body["field"] = exc.field
        return JSONResponse(status_code=400, content=body)

    @app.get("/health", response_model=HealthResponse)
    async def health() -> HealthResponse:
        return HealthResponse(status="ok")

    @app.get("/model", response_model=ModelResponse)
    async def model_info() -> ModelResponse:
        m: BucketMarketModel = state["model"]
        return ModelResponse(
            mu=[float(v) for v in m.mu],
            sigma=[float(v) for v in m.sigma],
            rho=[[float(v) for v in row] for row in m.rho],
            alpha=state["alpha"],
            fingerprint=m.fingerprint(state["alpha"]),
        )

    def _resolve(req_alpha: float | None, override) -> tuple[BucketMarketModel, float]:
        m: BucketMarketModel = state["model"]
        a: float = state["alpha"]
        if override is not None:
            m = BucketMarketModel(mu=override.mu, sigma=override.sigma, rho=override.rho)
        if req_alpha is not None:
            a = req_alpha
        return m, a

    @app.post("/whatif", response_model=WhatIfResponse)
    async def whatif(req: WhatIfRequest) -> WhatIfResponse:
        m, a = _resolve(req.alpha, req.model_override)
        profile = _checked_allocation(req.profile, "profile")
        candidates = [
            _checked_allocation(c, f"candidates[{i}]")
            for i, c in enumerate(req.candidates)
        ]
        if req.market_value is not None and req.market_value < 0:
            raise FieldError("market_value", "market_value must be non-negative")
        profile_quote = var(profile, m, a)
        results = []
        for cand in candidates:
            quote = var(cand, m, a)
            gap = quote.value_bps - profile_quote.value_bps
            results.append(CandidateResult(
                portfolio_var_bps=quote.value_bps,
                discrepancy_bps=gap,
                classification=classify_discrepancy(gap, req.band_bps),
                var_dollars=(
                    None if req.market_value is None
                    else var_dollars(req.market_value, quote.value_bps)
                ),
            ))
        return WhatIfResponse(
            alpha=a,
            model_fingerprint=m.fingerprint(a),
            profile_var_bps=profile_quote.value_bps,
            profile_var_dollars=(
                None if req.market_value is None
                else var_dollars(req.market_value, profile_quote.value_bps)
            ),
            candidates=results,
        )

    @app.post("/metrics", response_model=MetricsResponse)
    async def metrics_endpoint(req: MetricsRequest) -> MetricsResponse:
        known = set(METRIC_IDS) | {"quad:custom"}
        if req.metric not in known:
            raise HTTPException(
                status_code=404,
                detail={"error": f"unknown metric id: {req.metric}"},
            )
        m, a = _resolve(req.alpha, None)
        profile = _checked_allocation(req.profile, "profile")
        candidates = [
            _checked_allocation(c, f"candidates[{i}]")
            for i, c in enumerate(req.candidates)
        ]
        values = [
            metric_value(req.metric, profile, cand, m, a, req.scale,
                         req.epsilon, req.custom_penalty)
            for cand in candidates
        ]
        return MetricsResponse(
            metric=req.metric,
            model_fingerprint=m.fingerprint(a),
            values=[float(v) for v in values],
        )

    if frame is not None:
        app.include_router(_report_router(state), prefix="/report")
    return app


class FieldError(RiskGapError):
    """Validation failure tied to a specific request field."""

    def __init__(self, field: str, message: str):
        super().__init__(message)
        self.field = field


def _checked_allocation(values: list[float], field: str) -> RiskAllocation:
    try:
        return RiskAllocation(values)
    except RiskGapError as exc:
        raise FieldError(field, str(exc)) from exc


def _report_router(state: dict) -> APIRouter:
    router = APIRouter()

    def frame() -> analytics.RiskFrame:
        return state["frame"]

    @router.get("/summary")
    async def summary() -> dict:
        manifest: DatasetManifest | None = state["manifest"]
        f = frame()
        body = {
            "n_rows": len(f),
            "n_accounts": len(set(f.account_ids)),
            "n_clients": len(set(f.client_ids)),
            "n_advisors": len(set(f.advisor_ids)),
            "date_min": f.unique_dates()[0].isoformat(),
            "date_max": f.unique_dates()[-1].isoformat(),
        }
        if manifest is not None:
            body["n_rows_rejected"] = manifest.n_rows_rejected
        return body

    @router.get("/underrisked")
    async def underrisked(date: str, band_bps: float = 0.0) -> dict:
        share = analytics.under_risked_share(frame(), _date(date), band_bps)
        return {"date": date, "band_bps": band_bps, "share": share}

    @router.get("/timeseries")
    async def timeseries(grouping: str = "dealership",
                         measure: str = "discrepancy",
                         statistic: str = "quantiles",
                         raw: bool = True) -> dict:
        series = analytics.group_timeseries(frame(), grouping, measure, statistic)
        return json.loads(reports.series_json(series, raw=raw))

    @router.get("/events/influx")
    async def influx(threshold: float = 0.5, raw: bool = True) -> dict:
        study = analytics.cash_influx_study(frame(), threshold)
        return json.loads(reports.events_json(study, raw=raw))

    @router.get("/events/kyc")
    async def kyc(window: int = 10, direction: str = "after",
                  min_change_bps: float = 1.0, raw: bool = True) -> dict:
        study = analytics.kyc_change_study(frame(), window, direction, min_change_bps)
        return json.loads(reports.events_json(study, raw=raw))

    @router.get("/clusters")
    async def clusters(date: str | None = None, n_resamples: int = 999,
                       confidence: float = 0.95, seed: int = 0,
                       raw: bool = True) -> list:
        intervals = analytics.bootstrap_group_means(
            frame(), "cluster", "discrepancy",
            on_date=None if date is None else _date(date),
            n_resamples=n_resamples, confidence=confidence, seed=seed,
        )
        return json.loads(reports.bootstrap_json(intervals, raw=raw))

    return router


def _date(text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError as exc:
        raise FieldError("date", f"bad ISO date: {text!r}") from exc
