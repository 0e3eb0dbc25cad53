"""Deterministic CSV and JSON rendering of analytics outputs.

Basis-point figures are written as integers rounded half-away-from-zero
unless ``raw=True``, which keeps full precision.  Dates are ISO-8601.  The
same renderers back the CLI report files and the service report endpoints,
so byte-identical inputs yield byte-identical reports.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Sequence

from .analytics import (BootstrapCI, EventStudy, QuantileSeries, StatSeries,
                        WeightedSummary)
from .var_engine import round_half_away


def _bps(value: float | None, raw: bool) -> object:
    if value is None or value != value:
        return ""
    return format(value, ".6f") if raw else round_half_away(value)


def _num(value: float, raw: bool, places: int = 2) -> object:
    return format(value, ".6f") if raw else format(value, f".{places}f")


def summaries_csv(summaries: Sequence[WeightedSummary], raw: bool = False) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([
        "entity_id", "date", "n_accounts", "mean_market_value",
        "profile_var_bps", "portfolio_var_bps", "discrepancy_bps", "defined",
    ])
    for s in summaries:
        writer.writerow([
            s.entity_id,
            s.date.isoformat() if s.date else "",
            s.n_accounts,
            _num(s.mean_market_value, raw),
            _bps(s.profile_var_bps if s.defined else None, raw),
            _bps(s.portfolio_var_bps if s.defined else None, raw),
            _bps(s.discrepancy_bps if s.defined else None, raw),
            "yes" if s.defined else "no",
        ])
    return out.getvalue()


def series_csv(series: StatSeries | QuantileSeries, raw: bool = False) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    if isinstance(series, QuantileSeries):
        qcols = [f"q{int(round(q * 100)):02d}" for q in series.quantiles]
        writer.writerow(["date", "group", "n", *qcols])
        for p in series.points:
            row: list[object] = [p.date.isoformat(), p.group, p.n]
            if p.values is None:
                row.extend("" for _ in series.quantiles)
            else:
                row.extend(_bps(p.values[q], raw) for q in series.quantiles)
            writer.writerow(row)
    else:
        writer.writerow(["date", "group", "n", series.statistic])
        for p in series.points:
            writer.writerow([
                p.date.isoformat(), p.group, p.n,
                "" if p.value is None else _bps(p.value, raw),
            ])
    return out.getvalue()


def events_csv(study: EventStudy, raw: bool = False) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([
        "event_type", "account_id", "date", "measure_before", "measure_after",
        "delta_bps", "profile_var_bps", "portfolio_var_bps", "truncated",
    ])
    for e in study.events:
        writer.writerow([
            study.event_type, e.account_id, e.date.isoformat(),
            _bps(e.measure_before, raw), _bps(e.measure_after, raw),
            _bps(e.delta_bps, raw), _bps(e.profile_var_bps, raw),
            _bps(e.portfolio_var_bps, raw), "yes" if e.truncated else "no",
        ])
    return out.getvalue()


def bootstrap_csv(intervals: Sequence[BootstrapCI], raw: bool = False) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([
        "group", "n", "estimate", "lower", "upper", "confidence",
        "n_resamples", "degenerate",
    ])
    for ci in intervals:
        writer.writerow([
            ci.group, ci.n, _bps(ci.estimate, raw), _bps(ci.lower, raw),
            _bps(ci.upper, raw), format(ci.confidence, ".4f"),
            ci.n_resamples, "yes" if ci.degenerate else "no",
        ])
    return out.getvalue()


def summaries_json(summaries: Sequence[WeightedSummary], raw: bool = False) -> str:
    rows = [{
        "entity_id": s.entity_id,
        "date": s.date.isoformat() if s.date else None,
        "n_accounts": s.n_accounts,
        "mean_market_value": float(_num(s.mean_market_value, raw)),
        "profile_var_bps": None if not s.defined else _json_bps(s.profile_var_bps, raw),
        "portfolio_var_bps": None if not s.defined else _json_bps(s.portfolio_var_bps, raw),
        "discrepancy_bps": None if not s.defined else _json_bps(s.discrepancy_bps, raw),
        "defined": s.defined,
    } for s in summaries]
    return _dump(rows)


def series_json(series: StatSeries | QuantileSeries, raw: bool = False) -> str:
    if isinstance(series, QuantileSeries):
        rows = [{
            "date": p.date.isoformat(),
            "group": p.group,
            "n": p.n,
            "values": None if p.values is None else {
                f"q{int(round(q * 100)):02d}": _json_bps(p.values[q], raw)
                for q in series.quantiles
            },
        } for p in series.points]
        head = {
            "grouping": series.grouping, "measure": series.measure,
            "quantiles": list(series.quantiles), "points": rows,
        }
    else:
        rows = [{
            "date": p.date.isoformat(),
            "group": p.group,
            "n": p.n,
            "value": None if p.value is None else _json_bps(p.value, raw),
        } for p in series.points]
        head = {
            "grouping": series.grouping, "measure": series.measure,
            "statistic": series.statistic, "points": rows,
        }
    return _dump(head)


def events_json(study: EventStudy, raw: bool = False) -> str:
    rows = [{
        "account_id": e.account_id,
        "date": e.date.isoformat(),
        "measure_before": _json_bps(e.measure_before, raw),
        "measure_after": _json_bps(e.measure_after, raw),
        "delta_bps": _json_bps(e.delta_bps, raw),
        "profile_var_bps": _json_bps(e.profile_var_bps, raw),
        "portfolio_var_bps": _json_bps(e.portfolio_var_bps, raw),
        "truncated": e.truncated,
    } for e in study.events]
    return _dump({
        "event_type": study.event_type, "params": study.params, "events": rows,
    })


def bootstrap_json(intervals: Sequence[BootstrapCI], raw: bool = False) -> str:
    rows = [{
        "group": ci.group,
        "n": ci.n,
        "estimate": _json_bps(ci.estimate, raw),
        "lower": _json_bps(ci.lower, raw),
        "upper": _json_bps(ci.upper, raw),
        "confidence": ci.confidence,
        "n_resamples": ci.n_resamples,
        "degenerate": ci.degenerate,
    } for ci in intervals]
    return _dump(rows)


def _json_bps(value: float, raw: bool) -> float | int:
    return round(value, 6) if raw else round_half_away(value)


def _dump(obj: object) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
