"""Allocation-space discrepancy metrics and their failure modes.

These metrics score how far a portfolio allocation sits from a stated profile
by comparing the weight vectors directly, without any market model.  They are
useful baselines but lose information a risk measure keeps: direction of the
gap, distance in risk terms, and sometimes even ordering.  ``pathology_report``
scores a set of candidate portfolios under every metric alongside the VaR
risk gap and flags the places where the allocation-space view disagrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .allocation import N_BUCKETS, RiskAllocation
from .errors import MetricError
from .market import DEFAULT_ALPHA, BucketMarketModel
from .var_engine import classify_discrepancy, var, var_many

PENALTY_KINDS = (
    "identity",
    "linear-diagonal",
    "coupled-low-high",
    "absolute-distance",
    "asymmetric-over-risk",
)

METRIC_IDS = (
    "var",
    "euclid",
    "quad:identity",
    "quad:linear",
    "quad:coupled",
    "quad:distance",
    "quad:asym",
    "kl",
)

_QUAD_KIND_BY_ID = {
    "quad:identity": "identity",
    "quad:linear": "linear-diagonal",
    "quad:coupled": "coupled-low-high",
    "quad:distance": "absolute-distance",
    "quad:asym": "asymmetric-over-risk",
}

DEFAULT_EPSILON = 1e-6


@dataclass(frozen=True)
class PenaltyMatrix:
    """A 5x5 non-negative weighting for the quadratic discrepancy form."""

    kind: str
    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=float)
        if entries.shape != (N_BUCKETS, N_BUCKETS):
            raise MetricError("penalty matrix must be 5x5")
        if not np.all(np.isfinite(entries)) or np.any(entries < 0):
            raise MetricError("penalty matrix entries must be finite and non-negative")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)


def make_penalty(kind: str, custom: Sequence[float] | None = None) -> PenaltyMatrix:
    """Build one of the named penalty matrices, or a custom 25-entry one."""
    if kind == "custom":
        if custom is None:
            raise MetricError("custom penalty requires 25 row-major entries")
        values = np.asarray(list(custom), dtype=float)
        if values.size != N_BUCKETS * N_BUCKETS:
            raise MetricError(f"custom penalty needs 25 entries, got {values.size}")
        return PenaltyMatrix(kind="custom", entries=values.reshape(N_BUCKETS, N_BUCKETS))
    if kind == "identity":
        entries = np.eye(N_BUCKETS)
    elif kind == "linear-diagonal":
        entries = np.diag(np.arange(1.0, N_BUCKETS + 1.0))
    elif kind == "coupled-low-high":
        entries = np.eye(N_BUCKETS)
        entries[0, N_BUCKETS - 1] = 1.0
    elif kind == "absolute-distance":
        idx = np.arange(N_BUCKETS)
        entries = np.abs(idx[:, None] - idx[None, :]).astype(float)
    elif kind == "asymmetric-over-risk":
        idx = np.arange(N_BUCKETS)
        entries = np.abs(idx[:, None] - idx[None, :]).astype(float)
        entries[np.tril_indices(N_BUCKETS, k=-1)] = 1.0
    else:
        raise MetricError(f"unknown penalty kind: {kind}")
    return PenaltyMatrix(kind=kind, entries=entries)


def _diff(x: RiskAllocation, y: RiskAllocation, scale: str) -> np.ndarray:
    if scale == "percent":
        factor = 100.0
    elif scale == "fraction":
        factor = 1.0
    else:
        raise MetricError(f"scale must be 'percent' or 'fraction': {scale!r}")
    return (np.asarray(x.weights) - np.asarray(y.weights)) * factor


def quadratic_discrepancy(x: RiskAllocation, y: RiskAllocation,
                          penalty: PenaltyMatrix,
                          scale: str = "percent") -> float:
    """Weighted quadratic form ``(x - y)^T P (x - y)`` on the chosen scale.

    The percent scale matches reporting conventions; its value is exactly
    10000 times the fraction-scale value.
    """
    d = _diff(x, y, scale)
    return float(d @ penalty.entries @ d)


def euclidean_distance(x: RiskAllocation, y: RiskAllocation,
                       scale: str = "percent") -> float:
    d = _diff(x, y, scale)
    return float(math.sqrt(d @ d))


def kl_divergence(x: RiskAllocation, y: RiskAllocation,
                  epsilon: float = DEFAULT_EPSILON) -> float:
    """Kullback-Leibler divergence KL(x || y) with additive smoothing.

    ``epsilon`` is added to every bucket of both vectors before renormalizing,
    so one-hot allocations stay finite.  Must be positive.
    """
    if not epsilon > 0.0:
        raise MetricError(f"smoothing epsilon must be positive: {epsilon}")
    p = (np.asarray(x.weights) + epsilon) / (1.0 + N_BUCKETS * epsilon)
    q = (np.asarray(y.weights) + epsilon) / (1.0 + N_BUCKETS * epsilon)
    return float(np.sum(p * np.log(p / q)))


def metric_value(metric: str, profile: RiskAllocation, candidate: RiskAllocation,
                 model: BucketMarketModel | None = None,
                 alpha: float = DEFAULT_ALPHA, scale: str = "percent",
                 epsilon: float = DEFAULT_EPSILON,
                 custom_penalty: Sequence[float] | None = None) -> float:
    """Evaluate one metric id for a candidate against a profile.

    ``var`` is the signed risk gap in bps (requires a model); all others are
    allocation-space values.  Unknown ids raise ``MetricError``.
    """
    if metric == "var":
        if model is None:
            raise MetricError("the 'var' metric requires a market model")
        return (var(candidate, model, alpha).value_bps
                - var(profile, model, alpha).value_bps)
    if metric == "euclid":
        return euclidean_distance(profile, candidate, scale)
    if metric == "kl":
        return kl_divergence(profile, candidate, epsilon)
    if metric in _QUAD_KIND_BY_ID:
        penalty = make_penalty(_QUAD_KIND_BY_ID[metric])
        return quadratic_discrepancy(profile, candidate, penalty, scale)
    if metric == "quad:custom":
        penalty = make_penalty("custom", custom_penalty)
        return quadratic_discrepancy(profile, candidate, penalty, scale)
    raise MetricError(f"unknown metric id: {metric}")


@dataclass(frozen=True)
class CandidateScore:
    """All metric values for one candidate portfolio."""

    allocation: RiskAllocation
    values: dict[str, float]
    var_discrepancy_bps: float
    classification: str


@dataclass(frozen=True)
class PathologyFlag:
    """One observed failure of an allocation-space metric."""

    kind: str  # "identity-equidistance" | "kl-collapse" | "ranking-disagreement"
    metric: str
    candidates: tuple[int, ...]
    detail: str


@dataclass(frozen=True)
class PathologyReport:
    profile: RiskAllocation
    scores: list[CandidateScore]
    flags: list[PathologyFlag] = field(default_factory=list)


# Metric values closer than this (relative) are treated as indistinguishable.
_VALUE_RTOL = 1e-9
# Risk gaps farther apart than this are treated as genuinely different.
_GAP_ATOL_BPS = 0.5


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= _VALUE_RTOL * max(1.0, abs(a), abs(b))


def pathology_report(profile: RiskAllocation,
                     candidates: Sequence[RiskAllocation],
                     model: BucketMarketModel,
                     alpha: float = DEFAULT_ALPHA,
                     scale: str = "percent",
                     epsilon: float = DEFAULT_EPSILON,
                     band_bps: float = 0.0) -> PathologyReport:
    """Score candidates under every metric and flag metric failures.

    Flags raised:

    * ``identity-equidistance``: two candidates score equal under the identity
      quadratic form while their VaR risk gaps differ.
    * ``kl-collapse``: two candidates score equal under smoothed KL while
      their VaR risk gaps differ.
    * ``ranking-disagreement``: ordering candidates by a metric's value
      disagrees with ordering them by |risk gap| (ties keep input order).
    """
    if not candidates:
        raise MetricError("pathology report needs at least one candidate")
    weights = np.array([c.weights for c in candidates])
    gaps = var_many(weights, model, alpha) - var(profile, model, alpha).value_bps
    scores = []
    for i, cand in enumerate(candidates):
        values = {}
        for metric in METRIC_IDS:
            if metric == "var":
                values[metric] = float(gaps[i])
            else:
                values[metric] = metric_value(
                    metric, profile, cand, model, alpha, scale, epsilon
                )
        scores.append(CandidateScore(
            allocation=cand,
            values=values,
            var_discrepancy_bps=float(gaps[i]),
            classification=classify_discrepancy(float(gaps[i]), band_bps),
        ))

    flags: list[PathologyFlag] = []
    for kind, metric in (("identity-equidistance", "quad:identity"),
                         ("kl-collapse", "kl")):
        for i in range(len(scores)):
            for j in range(i + 1, len(scores)):
                vi, vj = scores[i].values[metric], scores[j].values[metric]
                if _close(vi, vj) and abs(gaps[i] - gaps[j]) > _GAP_ATOL_BPS:
                    flags.append(PathologyFlag(
                        kind=kind, metric=metric, candidates=(i, j),
                        detail=(
                            f"candidates {i} and {j} both score {vi:.6g} under "
                            f"{metric} but their risk gaps are "
                            f"{gaps[i]:.1f} and {gaps[j]:.1f} bps"
                        ),
                    ))

    gap_order = _rank_order([abs(float(g)) for g in gaps])
    for metric in METRIC_IDS:
        if metric == "var":
            continue
        order = _rank_order([abs(s.values[metric]) for s in scores])
        if order != gap_order:
            flags.append(PathologyFlag(
                kind="ranking-disagreement", metric=metric,
                candidates=tuple(order),
                detail=(
                    f"{metric} orders candidates {order} but |risk gap| "
                    f"orders them {gap_order}"
                ),
            ))
    return PathologyReport(profile=profile, scores=scores, flags=flags)


def _rank_order(values: Sequence[float]) -> list[int]:
    """Indices sorted ascending by value, ties broken by input position."""
    return sorted(range(len(values)), key=lambda i: (values[i], i))
