"""VaR quotes, discrepancies, rounding and target solving."""

import math

import numpy as np
import pytest

from riskgap import (BucketMarketModel, ModelError, RiskAllocation,
                     classify_discrepancy, format_quote, normal_quantile,
                     round_cents, round_half_away, solve_allocation_for_var,
                     var, var_discrepancy, var_dollars, var_many)

# One-hot quotes under the packaged model, frozen from an independent
# evaluation of mean + spread * quantile on the printed parameters.
ONE_HOT_BPS = [
    -21.75747763746907,
    1089.4703743445848,
    1286.4734223784649,
    1958.904742071534,
    3117.70146429016,
]


def test_normal_quantile_reference_point():
    assert abs(normal_quantile(0.01) - (-2.326348)) < 1e-5


def test_normal_quantile_symmetry():
    for p in (0.01, 0.05, 0.25):
        assert normal_quantile(p) == pytest.approx(-normal_quantile(1 - p), abs=1e-12)


@pytest.mark.parametrize("p", [0.0, 1.0, -0.2, 1.7])
def test_normal_quantile_domain(p):
    with pytest.raises(ModelError):
        normal_quantile(p)


def test_one_hot_quotes(default_model):
    model, alpha = default_model
    for bucket, expected in enumerate(ONE_HOT_BPS):
        got = var(RiskAllocation.one_hot(bucket), model, alpha).value_bps
        assert got == pytest.approx(expected, abs=1e-9)


def test_one_hot_quotes_strictly_increasing(default_model):
    model, alpha = default_model
    values = [var(RiskAllocation.one_hot(i), model, alpha).value_bps for i in range(5)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_mixed_allocation_against_expanded_quadratic_oracle(default_model):
    # 50/50 Medium/High: expand the quadratic form by hand from the
    # covariance entries and recompute the quote independently.
    model, alpha = default_model
    cov = model.covariance
    mean = 0.5 * 2.21 + 0.5 * 4.23
    quad = 0.25 * cov[2, 2] + 2 * 0.25 * cov[2, 4] + 0.25 * cov[4, 4]
    expected = -(mean + math.sqrt(quad) * normal_quantile(alpha)) * 100.0
    got = var(RiskAllocation([0, 0, 50, 0, 50]), model, alpha).value_bps
    assert got == pytest.approx(expected, abs=1e-9)
    assert got == pytest.approx(1806.28, abs=0.01)


def test_var_accepts_percent_or_fraction_input(default_model):
    model, alpha = default_model
    a = var(RiskAllocation([0, 0, 0, 0, 100]), model, alpha).value_bps
    b = var(RiskAllocation([0.0, 0.0, 0.0, 0.0, 1.0]), model, alpha).value_bps
    assert a == b


def test_var_many_matches_scalar(default_model):
    model, alpha = default_model
    weights = np.array([RiskAllocation.one_hot(i).weights for i in range(5)])
    many = var_many(weights, model, alpha)
    for i in range(5):
        assert many[i] == pytest.approx(ONE_HOT_BPS[i], abs=1e-9)


def test_alpha_domain(default_model):
    model, _ = default_model
    alloc = RiskAllocation.one_hot(2)
    for bad in (0.0, -0.01, 0.6, 1.0):
        with pytest.raises(ModelError):
            var(alloc, model, bad)
    # boundary value allowed; at the median the spread term drops out
    quote = var(alloc, model, 0.5)
    assert quote.value_bps == pytest.approx(-221.0, abs=1e-9)


def test_zero_volatility_collapses_to_mean():
    model = BucketMarketModel(
        mu=np.array([1.0, 2.0, 3.0, 4.0, 5.0]),
        sigma=np.zeros(5), rho=np.eye(5))
    quote = var(RiskAllocation.one_hot(0), model, 0.01)
    assert quote.value_bps == pytest.approx(-100.0, abs=1e-12)


def test_quote_percent_property(default_model):
    model, alpha = default_model
    quote = var(RiskAllocation.one_hot(4), model, alpha)
    assert quote.percent == pytest.approx(31.177, abs=1e-3)


def test_var_dollars():
    assert var_dollars(113147.0, 10.0) == pytest.approx(113.147, abs=1e-9)
    assert round_cents(var_dollars(113147.0, 10.0)) == 113.15
    with pytest.raises(ModelError):
        var_dollars(-1.0, 10.0)


def test_var_discrepancy_sign_and_classification(default_model):
    model, alpha = default_model
    profile = RiskAllocation.one_hot(1)
    low = var_discrepancy(RiskAllocation.one_hot(0), profile, model, alpha)
    high = var_discrepancy(RiskAllocation.one_hot(4), profile, model, alpha)
    assert low.value_bps == pytest.approx(ONE_HOT_BPS[0] - ONE_HOT_BPS[1], abs=1e-9)
    assert low.classification == "under_risked"
    assert high.classification == "over_risked"
    same = var_discrepancy(profile, profile, model, alpha)
    assert same.value_bps == 0.0
    assert same.classification == "aligned"


def test_alignment_band():
    assert classify_discrepancy(-0.5, band_bps=1.0) == "aligned"
    assert classify_discrepancy(-1.5, band_bps=1.0) == "under_risked"
    assert classify_discrepancy(1.5, band_bps=1.0) == "over_risked"
    assert classify_discrepancy(-1.0, band_bps=1.0) == "aligned"
    with pytest.raises(ModelError):
        classify_discrepancy(0.0, band_bps=-1.0)


def test_format_quote(default_model):
    model, alpha = default_model
    assert format_quote(var(RiskAllocation([0, 0, 0, 0, 100]), model, alpha)) \
        == "3118 bps (31.18%)"
    assert format_quote(var(RiskAllocation([100, 0, 0, 0, 0]), model, alpha)) \
        == "-22 bps (-0.22%)"


@pytest.mark.parametrize("value,expected", [
    (0.5, 1), (-0.5, -1), (1.5, 2), (-1.5, -2), (964.39, 964),
    (-250.61, -251), (208583.4, 208583), (0.0, 0), (2.49999, 2),
])
def test_round_half_away(value, expected):
    assert round_half_away(value) == expected


def test_solve_allocation_for_var(default_model):
    model, alpha = default_model
    for target in (1216.0, -10.0, 1500.0, 3000.0):
        alloc = solve_allocation_for_var(target, model, alpha)
        assert var(alloc, model, alpha).value_bps == pytest.approx(target, abs=1e-6)
    # corner targets return the corners themselves
    top = solve_allocation_for_var(ONE_HOT_BPS[4], model, alpha)
    assert top.weights[4] == pytest.approx(1.0, abs=1e-9)


def test_solve_allocation_out_of_range(default_model):
    model, alpha = default_model
    with pytest.raises(ModelError):
        solve_allocation_for_var(-500.0, model, alpha)
    with pytest.raises(ModelError):
        solve_allocation_for_var(5000.0, model, alpha)
