"""Command-line interface.

Every command drives the library directly; the HTTP service is only involved
for ``riskgap serve``.  Validation problems exit with status 2 and a short
message on stderr.
"""

from __future__ import annotations

import datetime as dt
import functools
import os
import sys
from pathlib import Path

import click

from . import analytics, reports
from .allocation import RiskAllocation
from .dataset import (load_clients_file, load_snapshots_file, write_clients,
                      write_snapshots)
from .errors import RiskGapError
from .market import DEFAULT_ALPHA, load_default_model, load_model_file
from .metrics import METRIC_IDS, metric_value, pathology_report
from .synth import calibrated_cohort_spec, generate_synthetic
from .var_engine import format_quote, round_cents, var, var_dollars

MODEL_ENV_VAR = "RISKGAP_MODEL"


def _fail_on_domain_error(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except RiskGapError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
    return wrapper


def _load_model(path: str | None):
    if path is None:
        path = os.environ.get(MODEL_ENV_VAR)
    if path is None:
        return load_default_model()
    return load_model_file(path)


def _parse_alloc(text: str) -> RiskAllocation:
    parts = text.split(",")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise RiskGapError(f"allocation entries must be decimals: {text!r}")
    return RiskAllocation(values)


@click.group()
def main() -> None:
    """Quantify the gap between stated risk profiles and portfolio risk."""


@main.command("var")
@click.option("--alloc", required=True,
              help="Five comma-separated weights (fractions or percents).")
@click.option("--model", "model_path", default=None, envvar=MODEL_ENV_VAR,
              help="Model config file; defaults to the packaged model.")
@click.option("--alpha", type=float, default=None,
              help="Tail level; defaults to the model config's alpha.")
@click.option("--market-value", type=float, default=None,
              help="Also print the loss amount on this market value.")
@click.option("--raw", is_flag=True, help="Print full-precision bps.")
@_fail_on_domain_error
def cli_var(alloc: str, model_path: str | None, alpha: float | None,
            market_value: float | None, raw: bool) -> None:
    """Value-at-risk of one allocation."""
    model, cfg_alpha = _load_model(model_path)
    quote = var(_parse_alloc(alloc), model, alpha if alpha is not None else cfg_alpha)
    if raw:
        click.echo(f"{quote.value_bps:.6f} bps ({quote.percent:.4f}%)")
    else:
        click.echo(format_quote(quote))
    if market_value is not None:
        dollars = var_dollars(market_value, quote.value_bps)
        click.echo(f"{round_cents(dollars):.2f} CAD")


@main.command("metrics")
@click.option("--profile", required=True, help="Stated profile allocation.")
@click.option("--candidate", "candidates", required=True, multiple=True,
              help="Candidate portfolio allocation; repeatable.")
@click.option("--metric", default=None,
              help=f"One of {', '.join(METRIC_IDS)} or quad:custom; "
                   "omit for the full comparison table with flags.")
@click.option("--scale", default="percent", type=click.Choice(["percent", "fraction"]))
@click.option("--epsilon", type=float, default=1e-6,
              help="Smoothing for the kl metric.")
@click.option("--custom-p", default=None,
              help="25 comma-separated row-major entries for quad:custom.")
@click.option("--band", "band_bps", type=float, default=0.0,
              help="Alignment band in bps for classification.")
@click.option("--model", "model_path", default=None, envvar=MODEL_ENV_VAR)
@click.option("--alpha", type=float, default=None)
@_fail_on_domain_error
def cli_metrics(profile: str, candidates: tuple[str, ...], metric: str | None,
                scale: str, epsilon: float, custom_p: str | None,
                band_bps: float, model_path: str | None,
                alpha: float | None) -> None:
    """Score candidate portfolios against a profile."""
    model, cfg_alpha = _load_model(model_path)
    a = alpha if alpha is not None else cfg_alpha
    prof = _parse_alloc(profile)
    cands = [_parse_alloc(c) for c in candidates]
    custom = None
    if custom_p is not None:
        try:
            custom = [float(v) for v in custom_p.split(",")]
        except ValueError:
            raise RiskGapError(f"custom penalty entries must be decimals: {custom_p!r}")
    if metric is not None:
        for i, cand in enumerate(cands):
            value = metric_value(metric, prof, cand, model, a, scale, epsilon, custom)
            click.echo(f"candidate[{i}] {metric} = {value:.6f}")
        return
    report = pathology_report(prof, cands, model, a, scale, epsilon, band_bps)
    header = ["candidate", *METRIC_IDS, "classification"]
    click.echo("\t".join(header))
    for i, score in enumerate(report.scores):
        cells = [f"{score.values[m]:.4f}" for m in METRIC_IDS]
        click.echo("\t".join([str(i), *cells, score.classification]))
    for flag in report.flags:
        click.echo(f"flag[{flag.kind}] {flag.metric}: {flag.detail}")


_REPORT_KINDS = ("client", "advisor", "dealership", "events", "clusters")


@main.command("report")
@click.option("--snapshots", "snapshots_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--clients", "clients_path", default=None,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--kind", required=True, type=click.Choice(_REPORT_KINDS))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--model", "model_path", default=None, envvar=MODEL_ENV_VAR)
@click.option("--alpha", type=float, default=None)
@click.option("--date", "on_date", default=None, help="ISO date for dated reports.")
@click.option("--band", "band_bps", type=float, default=0.0)
@click.option("--measure", default="discrepancy",
              type=click.Choice(["profile", "portfolio", "discrepancy", "market_value"]))
@click.option("--threshold", type=float, default=0.5, help="Cash-influx threshold.")
@click.option("--window", type=int, default=10, help="Profile-change window in dates.")
@click.option("--direction", default="after", type=click.Choice(["after", "before"]))
@click.option("--min-change", "min_change_bps", type=float, default=1.0)
@click.option("--resamples", type=int, default=9999, help="Bootstrap resamples.")
@click.option("--confidence", type=float, default=0.95)
@click.option("--seed", type=int, default=0)
@click.option("--lenient", is_flag=True, help="Skip bad rows instead of failing.")
@click.option("--raw", is_flag=True, help="Full-precision values in report files.")
@_fail_on_domain_error
def cli_report(snapshots_path: str, clients_path: str | None, kind: str,
               out_dir: str, model_path: str | None, alpha: float | None,
               on_date: str | None, band_bps: float, measure: str,
               threshold: float, window: int, direction: str,
               min_change_bps: float, resamples: int, confidence: float,
               seed: int, lenient: bool, raw: bool) -> None:
    """Write a book-level report to a directory."""
    model, cfg_alpha = _load_model(model_path)
    a = alpha if alpha is not None else cfg_alpha
    snapshots, manifest = load_snapshots_file(snapshots_path, strict=not lenient)
    clients = None
    if clients_path is not None:
        clients, _ = load_clients_file(clients_path, strict=not lenient)
    frame = analytics.score_dataset(snapshots, model, a, clients)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "manifest.json").write_text(manifest.to_json(), encoding="utf-8")
    date = _resolve_date(frame, on_date)

    if kind == "client":
        summaries = []
        for d in frame.unique_dates():
            seen = sorted({
                frame.client_ids[i] for i in range(len(frame)) if frame.dates[i] == d
            })
            for client_id in seen:
                summaries.append(analytics.client_summary(frame, client_id, d))
        (out / "client_summary.csv").write_text(
            reports.summaries_csv(summaries, raw), encoding="utf-8")
    elif kind == "advisor":
        series = analytics.group_timeseries(frame, "advisor", measure, "mean")
        (out / "advisor_means.csv").write_text(
            reports.series_csv(series, raw), encoding="utf-8")
    elif kind == "dealership":
        series = analytics.group_timeseries(frame, "dealership", measure, "quantiles")
        (out / "dealership_quantiles.csv").write_text(
            reports.series_csv(series, raw), encoding="utf-8")
        share_rows = [
            f"{d.isoformat()},{analytics.under_risked_share(frame, d, band_bps):.6f}"
            for d in frame.unique_dates()
        ]
        (out / "under_risked_share.csv").write_text(
            "date,share\n" + "\n".join(share_rows) + "\n", encoding="utf-8")
    elif kind == "events":
        influx = analytics.cash_influx_study(frame, threshold)
        kyc = analytics.kyc_change_study(frame, window, direction, min_change_bps)
        (out / "influx_events.csv").write_text(
            reports.events_csv(influx, raw), encoding="utf-8")
        (out / "kyc_events.csv").write_text(
            reports.events_csv(kyc, raw), encoding="utf-8")
    elif kind == "clusters":
        intervals = analytics.bootstrap_group_means(
            frame, "cluster", measure, on_date=date,
            n_resamples=resamples, confidence=confidence, seed=seed,
        )
        (out / "cluster_cis.csv").write_text(
            reports.bootstrap_csv(intervals, raw), encoding="utf-8")
    click.echo(f"wrote {kind} report to {out}")


def _resolve_date(frame: analytics.RiskFrame, text: str | None) -> dt.date:
    if text is None:
        return frame.unique_dates()[-1]
    try:
        date = dt.date.fromisoformat(text)
    except ValueError:
        raise RiskGapError(f"bad ISO date: {text!r}")
    if date not in set(frame.unique_dates()):
        raise RiskGapError(f"no rows on {date.isoformat()}")
    return date


@main.command("synth")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--accounts", type=int, default=5000)
@click.option("--dates", type=int, default=30)
@click.option("--seed", type=int, default=0)
@click.option("--start-date", default="2025-01-06")
@click.option("--target-share", type=float, default=0.867,
              help="Expected under-risked share of the cohort.")
@click.option("--profile-var", type=float, default=1216.0,
              help="VaR in bps pinned for the dominant profile; "
                   "negative disables pinning.")
@click.option("--deposits", type=int, default=60,
              help="Number of injected pro-rata deposit events.")
@click.option("--model", "model_path", default=None, envvar=MODEL_ENV_VAR)
@_fail_on_domain_error
def cli_synth(out_dir: str, accounts: int, dates: int, seed: int,
              start_date: str, target_share: float, profile_var: float,
              deposits: int, model_path: str | None) -> None:
    """Generate a synthetic cohort and write its two CSV files."""
    model, alpha = _load_model(model_path)
    try:
        start = dt.date.fromisoformat(start_date)
    except ValueError:
        raise RiskGapError(f"bad ISO date: {start_date!r}")
    spec = calibrated_cohort_spec(
        n_accounts=accounts, n_dates=dates,
        under_share_target=target_share,
        profile_var_target_bps=None if profile_var < 0 else profile_var,
        start_date=start, n_deposit_events=deposits,
    )
    clients, snapshots = generate_synthetic(spec, seed, model, alpha)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "snapshots.csv").write_text(write_snapshots(snapshots), encoding="utf-8")
    (out / "clients.csv").write_text(write_clients(clients), encoding="utf-8")
    click.echo(f"wrote {len(snapshots)} snapshots for {len(clients)} clients to {out}")


@main.command("serve")
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
@click.option("--model", "model_path", default=None, envvar=MODEL_ENV_VAR)
@click.option("--alpha", type=float, default=None)
@click.option("--band", "band_bps", type=float, default=0.0)
@click.option("--snapshots", "snapshots_path", default=None,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--clients", "clients_path", default=None,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--lenient", is_flag=True)
@_fail_on_domain_error
def cli_serve(host: str, port: int, model_path: str | None,
              alpha: float | None, band_bps: float,
              snapshots_path: str | None, clients_path: str | None,
              lenient: bool) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .webapp import create_app

    model, cfg_alpha = _load_model(model_path)
    a = alpha if alpha is not None else cfg_alpha
    frame = manifest = None
    if snapshots_path is not None:
        snapshots, manifest = load_snapshots_file(snapshots_path, strict=not lenient)
        clients = None
        if clients_path is not None:
            clients, _ = load_clients_file(clients_path, strict=not lenient)
        frame = analytics.score_dataset(snapshots, model, a, clients)
    app = create_app(model, a, band_bps, frame, manifest)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
