"""Risk-bucket allocations.

An allocation distributes an account's holdings (or a client's stated risk
profile) over five ordered risk buckets, from safest to riskiest.  Inputs may
be given either as fractions summing to 1 or as percentages summing to 100;
the scale is auto-detected from the sum and the stored weights are always
normalized fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import AllocationError

N_BUCKETS = 5

BUCKET_NAMES = ("low", "low_medium", "medium", "medium_high", "high")
BUCKET_LABELS = ("Low", "Low-Medium", "Medium", "Medium-High", "High")

# Relative slack on the detected sum (1 or 100).  Wide enough that files with
# six-decimal fractions re-parse cleanly, tight enough to reject real gaps
# such as an allocation summing to 0.9.
SUM_RTOL = 1e-4

# Weights this far below zero are treated as rounding noise and clamped.
NEGATIVE_ATOL = 1e-9


@dataclass(frozen=True)
class RiskAllocation:
    """Normalized weights over the five risk buckets.

    After construction ``weights`` are fractions in [0, 1] summing to 1
    within 1e-9, regardless of whether the input used fractions or percents.
    """

    weights: tuple[float, float, float, float, float]

    def __init__(self, weights: Sequence[float]):
        object.__setattr__(self, "weights", _normalize(weights))

    @classmethod
    def one_hot(cls, bucket: int) -> "RiskAllocation":
        """Allocation fully concentrated in ``bucket`` (0-based index)."""
        if not 0 <= bucket < N_BUCKETS:
            raise AllocationError(f"bucket index out of range: {bucket}")
        return cls(tuple(1.0 if i == bucket else 0.0 for i in range(N_BUCKETS)))

    def as_percent(self) -> tuple[float, ...]:
        return tuple(w * 100.0 for w in self.weights)

    def __iter__(self) -> Iterable[float]:
        return iter(self.weights)


def _normalize(raw: Sequence[float]) -> tuple[float, float, float, float, float]:
    values = [float(v) for v in raw]
    if len(values) != N_BUCKETS:
        raise AllocationError(
            f"allocation needs {N_BUCKETS} weights, got {len(values)}"
        )
    cleaned = []
    for i, v in enumerate(values):
        if v != v or v in (float("inf"), float("-inf")):
            raise AllocationError(f"weight {i} is not finite: {v}")
        if v < -NEGATIVE_ATOL:
            raise AllocationError(f"weight {i} is negative: {v}")
        cleaned.append(max(v, 0.0))
    total = sum(cleaned)
    if abs(total - 1.0) <= SUM_RTOL:
        scale = total
    elif abs(total - 100.0) <= 100.0 * SUM_RTOL:
        scale = total
    else:
        raise AllocationError(
            f"allocation sum {total!r} is neither ~1 (fractions) nor ~100 (percents)"
        )
    return tuple(v / scale for v in cleaned)  # type: ignore[return-value]
