"""Parametric value-at-risk over the five risk buckets.

For an allocation ``x``, bucket means ``mu`` and covariance ``cov`` (annualized
percents), the alpha-quantile portfolio return is ``x @ mu + sqrt(x @ cov @ x)
* z(alpha)``.  Quotes are reported as a positive loss in basis points, so a
riskier allocation carries a larger quote.  The risk gap of a portfolio
against a stated profile is the signed difference of the two quotes: negative
means the portfolio takes less risk than the profile allows (under-risked),
positive means more (over-risked).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .allocation import RiskAllocation
from .errors import ModelError
from .market import DEFAULT_ALPHA, BucketMarketModel

# Quadratic forms this far below zero are treated as rounding noise.
QUADFORM_SLACK = -1e-12

_STANDARD_NORMAL = NormalDist()


def normal_quantile(p: float) -> float:
    """Standard normal quantile, accurate to double precision."""
    if not 0.0 < p < 1.0:
        raise ModelError(f"quantile level must lie in (0, 1): {p}")
    return _STANDARD_NORMAL.inv_cdf(p)


def _check_alpha(alpha: float) -> float:
    if not 0.0 < alpha <= 0.5:
        raise ModelError(f"alpha must lie in (0, 0.5]: {alpha}")
    return float(alpha)


@dataclass(frozen=True)
class VaRQuote:
    """A value-at-risk figure: positive loss in basis points at level alpha."""

    value_bps: float
    alpha: float

    @property
    def percent(self) -> float:
        return self.value_bps / 100.0


@dataclass(frozen=True)
class VaRDiscrepancy:
    """Signed gap between a portfolio quote and a profile quote, in bps."""

    value_bps: float
    classification: str  # "under_risked" | "aligned" | "over_risked"


def var(alloc: RiskAllocation, model: BucketMarketModel,
        alpha: float = DEFAULT_ALPHA) -> VaRQuote:
    """Parametric VaR of an allocation under the bucket model."""
    alpha = _check_alpha(alpha)
    x = np.asarray(alloc.weights)
    mean = float(x @ model.mu)
    quad = float(x @ model.covariance @ x)
    if quad < QUADFORM_SLACK:
        raise ModelError(f"covariance quadratic form is negative: {quad:.3e}")
    spread = math.sqrt(max(quad, 0.0))
    value_percent = -(mean + spread * normal_quantile(alpha))
    return VaRQuote(value_bps=value_percent * 100.0, alpha=alpha)


def var_many(weights: np.ndarray, model: BucketMarketModel,
             alpha: float = DEFAULT_ALPHA) -> np.ndarray:
    """Vectorized VaR in bps for an (n, 5) array of fraction weights."""
    alpha = _check_alpha(alpha)
    w = np.asarray(weights, dtype=float)
    mean = w @ model.mu
    quad = np.einsum("ij,jk,ik->i", w, model.covariance, w)
    if np.any(quad < QUADFORM_SLACK):
        raise ModelError("covariance quadratic form is negative for some rows")
    spread = np.sqrt(np.clip(quad, 0.0, None))
    return -(mean + spread * normal_quantile(alpha)) * 100.0


def var_dollars(market_value: float, value_bps: float) -> float:
    """Loss amount implied by a bps quote on a market value."""
    if market_value < 0:
        raise ModelError(f"market value must be non-negative: {market_value}")
    return market_value * value_bps / 10000.0


def classify_discrepancy(value_bps: float, band_bps: float = 0.0) -> str:
    if band_bps < 0:
        raise ModelError(f"alignment band must be non-negative: {band_bps}")
    if value_bps < -band_bps:
        return "under_risked"
    if value_bps > band_bps:
        return "over_risked"
    return "aligned"


def var_discrepancy(portfolio: RiskAllocation, profile: RiskAllocation,
                    model: BucketMarketModel, alpha: float = DEFAULT_ALPHA,
                    band_bps: float = 0.0) -> VaRDiscrepancy:
    """Portfolio VaR minus profile VaR, with alignment classification."""
    gap = var(portfolio, model, alpha).value_bps - var(profile, model, alpha).value_bps
    return VaRDiscrepancy(value_bps=gap, classification=classify_discrepancy(gap, band_bps))


def round_half_away(value: float) -> int:
    """Round to the nearest integer, ties away from zero."""
    return int(math.floor(abs(value) + 0.5)) * (1 if value >= 0 else -1)


def round_cents(value: float) -> float:
    """Round a dollar amount to cents, ties away from zero."""
    return round_half_away(value * 100.0) / 100.0


def format_quote(quote: VaRQuote) -> str:
    """Render a quote the way the CLI prints it, e.g. ``3118 bps (31.18%)``."""
    return f"{round_half_away(quote.value_bps)} bps ({quote.percent:.2f}%)"


def solve_allocation_for_var(target_bps: float, model: BucketMarketModel,
                             alpha: float = DEFAULT_ALPHA,
                             tol_bps: float = 1e-9) -> RiskAllocation:
    """Find an allocation whose VaR hits ``target_bps``.

    Walks the edges between adjacent one-hot bucket allocations, whose quotes
    must be strictly increasing under the supplied model, and bisects along
    the bracketing edge.  Raises when the target lies outside the one-hot
    range.
    """
    corners = [
        var(RiskAllocation.one_hot(i), model, alpha).value_bps for i in range(5)
    ]
    if any(b <= a for a, b in zip(corners, corners[1:])):
        raise ModelError("one-hot VaR quotes are not strictly increasing")
    if not corners[0] <= target_bps <= corners[-1]:
        raise ModelError(
            f"target {target_bps} bps outside the attainable range "
            f"[{corners[0]:.2f}, {corners[-1]:.2f}]"
        )
    k = max(i for i in range(5) if corners[i] <= target_bps)
    if k == 4:
        return RiskAllocation.one_hot(4)

    def quote(t: float) -> float:
        weights = [0.0] * 5
        weights[k] = 1.0 - t
        weights[k + 1] = t
        return var(RiskAllocation(weights), model, alpha).value_bps

    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = (lo + hi) / 2.0
        v = quote(mid)
        if abs(v - target_bps) <= tol_bps:
            lo = hi = mid
            break
        if v < target_bps:
            lo = mid
        else:
            hi = mid
    t = (lo + hi) / 2.0
    weights = [0.0] * 5
    weights[k] = 1.0 - t
    weights[k + 1] = t
    return RiskAllocation(weights)
