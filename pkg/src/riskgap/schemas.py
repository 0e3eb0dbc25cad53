"""Request and response bodies for the HTTP service.

Allocations cross the wire as five-element arrays of fractions; responses
use snake_case keys and report basis points as floats at full precision.
"""

from __future__ import annotations

from pydantic import BaseModel, Field


class ModelOverride(BaseModel):
    """Replacement market parameters for a single request."""

    mu: list[float] = Field(min_length=5, max_length=5)
    sigma: list[float] = Field(min_length=5, max_length=5)
    rho: list[list[float]] = Field(min_length=5, max_length=5)


class ModelResponse(BaseModel):
    mu: list[float]
    sigma: list[float]
    rho: list[list[float]]
    alpha: float
    fingerprint: str


class WhatIfRequest(BaseModel):
    profile: list[float] = Field(min_length=5, max_length=5)
    candidates: list[list[float]] = Field(min_length=1)
    market_value: float | None = None
    alpha: float | None = None
    band_bps: float = 0.0
    model_override: ModelOverride | None = None


class CandidateResult(BaseModel):
    portfolio_var_bps: float
    discrepancy_bps: float
    classification: str
    var_dollars: float | None = None


class WhatIfResponse(BaseModel):
    alpha: float
    model_fingerprint: str
    profile_var_bps: float
    profile_var_dollars: float | None = None
    candidates: list[CandidateResult]


class MetricsRequest(BaseModel):
    profile: list[float] = Field(min_length=5, max_length=5)
    candidates: list[list[float]] = Field(min_length=1)
    metric: str
    scale: str = "percent"
    epsilon: float = 1e-6
    custom_penalty: list[float] | None = Field(default=None, min_length=25, max_length=25)
    alpha: float | None = None


class MetricsResponse(BaseModel):
    metric: str
    model_fingerprint: str
    values: list[float]


class HealthResponse(BaseModel):
    status: str


class ErrorBody(BaseModel):
    error: str
    field: str | None = None
    row: int | None = None
