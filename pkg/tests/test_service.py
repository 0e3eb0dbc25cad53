"""HTTP service contract: endpoints, payloads, and error bodies."""

import datetime as dt

import pytest
from fastapi.testclient import TestClient

from riskgap import (ClientRecord, DatasetManifest, load_default_model,
                     score_dataset)
from riskgap.metrics import METRIC_IDS
from riskgap.webapp import create_app

from conftest import make_snapshot

PROFILE_LM = [0.0, 1.0, 0.0, 0.0, 0.0]
LOW = [1.0, 0.0, 0.0, 0.0, 0.0]
HIGH = [0.0, 0.0, 0.0, 0.0, 1.0]

D1 = dt.date(2025, 1, 6)


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def test_health(client):
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json() == {"status": "ok"}


def test_model_endpoint_matches_library(client):
    model, alpha = load_default_model()
    r = client.get("/model")
    assert r.status_code == 200
    body = r.json()
    assert body["mu"] == pytest.approx(list(model.mu))
    assert body["sigma"] == pytest.approx(list(model.sigma))
    assert body["alpha"] == alpha
    assert body["fingerprint"] == model.fingerprint(alpha)
    assert len(body["rho"]) == 5


def test_whatif_quotes_and_classifications(client):
    r = client.post("/whatif", json={
        "profile": PROFILE_LM,
        "candidates": [LOW, HIGH],
    })
    assert r.status_code == 200
    body = r.json()
    assert body["profile_var_bps"] == pytest.approx(1089.4703743445848, abs=1e-9)
    assert body["profile_var_dollars"] is None
    cands = body["candidates"]
    assert cands[0]["portfolio_var_bps"] == pytest.approx(-21.75747763746907, abs=1e-9)
    assert cands[0]["discrepancy_bps"] == pytest.approx(-1111.2278519820538, abs=1e-9)
    assert cands[0]["classification"] == "under_risked"
    assert cands[1]["discrepancy_bps"] == pytest.approx(2028.2310899455751, abs=1e-9)
    assert cands[1]["classification"] == "over_risked"
    model, alpha = load_default_model()
    assert body["model_fingerprint"] == model.fingerprint(alpha)


def test_whatif_market_value_dollars(client):
    r = client.post("/whatif", json={
        "profile": PROFILE_LM,
        "candidates": [HIGH],
        "market_value": 113147.0,
    })
    body = r.json()
    assert body["profile_var_dollars"] == pytest.approx(
        113147.0 * body["profile_var_bps"] / 10000.0)
    assert body["candidates"][0]["var_dollars"] == pytest.approx(
        113147.0 * body["candidates"][0]["portfolio_var_bps"] / 10000.0)


def test_whatif_band_makes_small_gaps_aligned(client):
    r = client.post("/whatif", json={
        "profile": PROFILE_LM,
        "candidates": [LOW],
        "band_bps": 5000.0,
    })
    assert r.json()["candidates"][0]["classification"] == "aligned"


def test_whatif_percent_scale_inputs_accepted(client):
    r = client.post("/whatif", json={
        "profile": [0, 100, 0, 0, 0],
        "candidates": [[50, 50, 0, 0, 0]],
    })
    assert r.status_code == 200
    assert r.json()["profile_var_bps"] == pytest.approx(1089.4703743445848, abs=1e-9)


def test_whatif_model_override_and_alpha(client):
    identity = [[1.0 if i == j else 0.0 for j in range(5)] for i in range(5)]
    r = client.post("/whatif", json={
        "profile": PROFILE_LM,
        "candidates": [PROFILE_LM],
        "alpha": 0.5,
        "model_override": {
            "mu": [1.0, 1.0, 1.0, 1.0, 1.0],
            "sigma": [0.0, 0.0, 0.0, 0.0, 0.0],
            "rho": identity,
        },
    })
    assert r.status_code == 200
    body = r.json()
    assert body["alpha"] == 0.5
    # zero volatility at the median quantile leaves only the drift term
    assert body["profile_var_bps"] == pytest.approx(-100.0, abs=1e-12)
    default_model, default_alpha = load_default_model()
    assert body["model_fingerprint"] != default_model.fingerprint(default_alpha)


def test_whatif_rejects_wrong_length_profile(client):
    r = client.post("/whatif", json={"profile": [1, 0, 0, 0],
                                     "candidates": [LOW]})
    assert r.status_code == 400
    assert "profile" in r.json()["field"]


def test_whatif_rejects_bad_sum_candidate(client):
    r = client.post("/whatif", json={"profile": PROFILE_LM,
                                     "candidates": [[0.9, 0, 0, 0, 0]]})
    assert r.status_code == 400
    body = r.json()
    assert body["field"] == "candidates[0]"
    assert "sum" in body["error"]


def test_whatif_rejects_negative_market_value(client):
    r = client.post("/whatif", json={"profile": PROFILE_LM,
                                     "candidates": [LOW],
                                     "market_value": -5.0})
    assert r.status_code == 400
    assert r.json()["field"] == "market_value"


def test_whatif_requires_candidates(client):
    r = client.post("/whatif", json={"profile": PROFILE_LM, "candidates": []})
    assert r.status_code == 400
    assert "candidates" in r.json()["field"]


@pytest.mark.parametrize("metric", METRIC_IDS)
def test_metrics_every_known_id(client, metric):
    r = client.post("/metrics", json={
        "profile": [0, 0, 0, 0.8, 0.2],
        "candidates": [[0, 0.16, 0.84, 0, 0], [0, 0.94, 0.06, 0, 0]],
        "metric": metric,
    })
    assert r.status_code == 200
    body = r.json()
    assert body["metric"] == metric
    assert len(body["values"]) == 2


def test_metrics_quadratic_reference_values(client):
    r = client.post("/metrics", json={
        "profile": [0, 0, 0, 0.8, 0.2],
        "candidates": [[0, 0.16, 0.84, 0, 0], [0, 0.94, 0.06, 0, 0]],
        "metric": "quad:linear",
    })
    assert r.json()["values"] == [49280.0, 45380.0]


def test_metrics_custom_penalty(client):
    r = client.post("/metrics", json={
        "profile": PROFILE_LM,
        "candidates": [LOW],
        "metric": "quad:custom",
        "custom_penalty": [1.0] * 25,
    })
    assert r.status_code == 200
    r2 = client.post("/metrics", json={
        "profile": PROFILE_LM,
        "candidates": [LOW],
        "metric": "quad:custom",
    })
    assert r2.status_code == 400


def test_metrics_unknown_id_is_404(client):
    r = client.post("/metrics", json={
        "profile": PROFILE_LM, "candidates": [LOW], "metric": "cosine",
    })
    assert r.status_code == 404


def test_report_routes_absent_without_dataset(client):
    for path in ("/report/summary", "/report/events/influx", "/report/clusters"):
        assert client.get(path).status_code == 404


@pytest.fixture(scope="module")
def report_client():
    model, alpha = load_default_model()
    med = [0, 0, 1, 0, 0]
    medhigh = [0, 0, 0, 1, 0]
    lm = [0, 1, 0, 0, 0]
    from riskgap import RiskAllocation
    dates = [D1 + dt.timedelta(days=i) for i in range(4)]
    snaps = []
    for i, date in enumerate(dates):
        # A000001 takes a doubling deposit on the second date
        snaps.append(make_snapshot(
            account_id="A000001", client_id="C000001", advisor_id="ADV0001",
            date=date, market_value=200.0 if i >= 1 else 100.0,
            profile=RiskAllocation(med), portfolio=RiskAllocation(lm)))
        # A000002's profile moves up on the third date
        snaps.append(make_snapshot(
            account_id="A000002", client_id="C000002", advisor_id="ADV0002",
            date=date, market_value=500.0,
            profile=RiskAllocation(medhigh if i >= 2 else med),
            portfolio=RiskAllocation(med)))
    clients = [
        ClientRecord(client_id="C000001", age=40, gender="M",
                     annual_income=50000.0, investment_knowledge=2,
                     marital_status="S", residency="ON", retired="no",
                     cluster_label=1),
        ClientRecord(client_id="C000002", age=60, gender="F",
                     annual_income=90000.0, investment_knowledge=3,
                     marital_status="M", residency="BC", retired="yes",
                     cluster_label=2),
    ]
    frame = score_dataset(snaps, model, alpha, clients=clients)
    manifest = DatasetManifest(n_rows_accepted=len(snaps), n_rows_rejected=2)
    app = create_app(model=model, alpha=alpha, frame=frame, manifest=manifest)
    return TestClient(app)


def test_report_summary(report_client):
    r = report_client.get("/report/summary")
    assert r.status_code == 200
    body = r.json()
    assert body["n_rows"] == 8
    assert body["n_accounts"] == 2
    assert body["n_clients"] == 2
    assert body["n_advisors"] == 2
    assert body["date_min"] == "2025-01-06"
    assert body["date_max"] == "2025-01-09"
    assert body["n_rows_rejected"] == 2


def test_report_underrisked(report_client):
    r = report_client.get("/report/underrisked",
                          params={"date": "2025-01-06"})
    assert r.status_code == 200
    assert r.json()["share"] == pytest.approx(1.0)  # gaps -197 and 0
    r2 = report_client.get("/report/underrisked",
                           params={"date": "2025-01-06", "band_bps": 1.0})
    assert r2.json()["share"] == pytest.approx(0.5)
    bad = report_client.get("/report/underrisked", params={"date": "not-a-date"})
    assert bad.status_code == 400
    assert bad.json()["field"] == "date"


def test_report_timeseries(report_client):
    r = report_client.get("/report/timeseries",
                          params={"grouping": "advisor", "statistic": "mean"})
    assert r.status_code == 200
    body = r.json()
    assert body["grouping"] == "advisor"
    assert len(body["points"]) == 8  # 4 dates x 2 advisors
    assert all(p["n"] == 1 for p in body["points"])


def test_report_influx_events(report_client):
    r = report_client.get("/report/events/influx")
    assert r.status_code == 200
    events = r.json()["events"]
    assert len(events) == 1
    assert events[0]["account_id"] == "A000001"
    assert events[0]["date"] == "2025-01-07"
    assert events[0]["delta_bps"] == pytest.approx(0.0)


def test_report_kyc_events(report_client):
    r = report_client.get("/report/events/kyc", params={"window": 1})
    assert r.status_code == 200
    events = r.json()["events"]
    assert len(events) == 1
    assert events[0]["account_id"] == "A000002"
    assert events[0]["date"] == "2025-01-08"
    # the portfolio never rebalanced after the profile change
    assert events[0]["delta_bps"] == pytest.approx(0.0)


def test_report_clusters(report_client):
    r = report_client.get("/report/clusters", params={"n_resamples": 199})
    assert r.status_code == 200
    rows = r.json()
    assert [row["group"] for row in rows] == ["cluster-1", "cluster-2"]
    for row in rows:
        assert row["lower"] <= row["estimate"] <= row["upper"]
    again = report_client.get("/report/clusters", params={"n_resamples": 199})
    assert again.json() == rows
