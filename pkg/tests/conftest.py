"""Shared fixtures for the test-suite."""

from __future__ import annotations

import datetime as dt

import pytest

from riskgap import (AccountSnapshot, RiskAllocation, load_default_model)


@pytest.fixture(scope="session")
def default_model():
    model, alpha = load_default_model()
    return model, alpha


def make_snapshot(account_id: str = "A000001", client_id: str = "C000001",
                  advisor_id: str = "ADV0001", date: dt.date = dt.date(2025, 1, 6),
                  account_type: str = "RSP", advisory_type: str = "non-discretionary",
                  market_value: float = 100000.0,
                  profile: RiskAllocation | None = None,
                  portfolio: RiskAllocation | None = None) -> AccountSnapshot:
    """Snapshot builder with sensible defaults, keyword-overridable."""
    return AccountSnapshot(
        account_id=account_id,
        client_id=client_id,
        advisor_id=advisor_id,
        date=date,
        account_type=account_type,
        advisory_type=advisory_type,
        market_value=market_value,
        profile=profile or RiskAllocation([0, 0, 1, 0, 0]),
        portfolio=portfolio or RiskAllocation([0, 1, 0, 0, 0]),
    )
