"""Book-level analytics over scored account snapshots.

``score_dataset`` evaluates profile and portfolio VaR for every snapshot once
and stores the results in a column-oriented ``RiskFrame`` (canonically sorted
by account then date), which every aggregation in this module consumes.  All
quantiles use linear interpolation between order statistics, matching
``numpy.quantile``'s default method.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from typing import Callable, Literal, Sequence

import numpy as np

from .dataset import AccountSnapshot, ClientRecord
from .errors import DatasetError
from .market import DEFAULT_ALPHA, BucketMarketModel
from .var_engine import var_many

Grouping = Literal["advisor", "dealership", "cluster", "advisory_type",
                   "account_type", "client"]
Measure = Literal["profile", "portfolio", "discrepancy", "market_value"]

DEFAULT_QUANTILES = (0.05, 0.50, 0.95)


@dataclass(frozen=True)
class RiskFrame:
    """Scored snapshots in column form, sorted by (account_id, date)."""

    account_ids: list[str]
    client_ids: list[str]
    advisor_ids: list[str]
    account_types: list[str]
    advisory_types: list[str]
    cluster_labels: list[int | None]
    dates: list[dt.date]
    market_values: np.ndarray
    profile_var_bps: np.ndarray
    portfolio_var_bps: np.ndarray
    discrepancy_bps: np.ndarray

    def __len__(self) -> int:
        return len(self.account_ids)

    def unique_dates(self) -> list[dt.date]:
        return sorted(set(self.dates))

    def date_indices(self, on_date: dt.date) -> np.ndarray:
        return np.array(
            [i for i, d in enumerate(self.dates) if d == on_date], dtype=int
        )

    def measure(self, name: Measure) -> np.ndarray:
        if name == "profile":
            return self.profile_var_bps
        if name == "portfolio":
            return self.portfolio_var_bps
        if name == "discrepancy":
            return self.discrepancy_bps
        if name == "market_value":
            return self.market_values
        raise DatasetError(f"unknown measure: {name!r}")

    def group_keys(self, grouping: Grouping | Callable[["RiskFrame"], Sequence[str]]
                   ) -> list[str | None]:
        """Group key per row; None marks rows excluded from the grouping."""
        if callable(grouping):
            keys = list(grouping(self))
            if len(keys) != len(self):
                raise DatasetError("custom grouping must return one key per row")
            return keys
        if grouping == "advisor":
            return list(self.advisor_ids)
        if grouping == "dealership":
            return ["dealership"] * len(self)
        if grouping == "cluster":
            return [None if c is None else f"cluster-{c}" for c in self.cluster_labels]
        if grouping == "advisory_type":
            return list(self.advisory_types)
        if grouping == "account_type":
            return list(self.account_types)
        if grouping == "client":
            return list(self.client_ids)
        raise DatasetError(f"unknown grouping: {grouping!r}")


def score_dataset(snapshots: Sequence[AccountSnapshot],
                  model: BucketMarketModel,
                  alpha: float = DEFAULT_ALPHA,
                  clients: Sequence[ClientRecord] | None = None) -> RiskFrame:
    """Score every snapshot under the model and join client cluster labels."""
    if not snapshots:
        raise DatasetError("cannot score an empty snapshot list")
    ordered = sorted(snapshots, key=lambda s: (s.account_id, s.date))
    cluster_by_client: dict[str, int | None] = {}
    if clients:
        cluster_by_client = {c.client_id: c.cluster_label for c in clients}
    prof = np.array([s.profile.weights for s in ordered])
    port = np.array([s.portfolio.weights for s in ordered])
    prof_bps = var_many(prof, model, alpha)
    port_bps = var_many(port, model, alpha)
    return RiskFrame(
        account_ids=[s.account_id for s in ordered],
        client_ids=[s.client_id for s in ordered],
        advisor_ids=[s.advisor_id for s in ordered],
        account_types=[s.account_type for s in ordered],
        advisory_types=[s.advisory_type for s in ordered],
        cluster_labels=[cluster_by_client.get(s.client_id) for s in ordered],
        dates=[s.date for s in ordered],
        market_values=np.array([s.market_value for s in ordered]),
        profile_var_bps=prof_bps,
        portfolio_var_bps=port_bps,
        discrepancy_bps=port_bps - prof_bps,
    )


@dataclass(frozen=True)
class WeightedSummary:
    """Market-value-weighted VaR summary for one entity on one date.

    VaR fields are weighted by market value; ``mean_market_value`` is the
    plain mean.  ``defined`` is False when total market value is zero, in
    which case the VaR fields are NaN.
    """

    entity_id: str
    date: dt.date | None
    n_accounts: int
    mean_market_value: float
    profile_var_bps: float
    portfolio_var_bps: float
    discrepancy_bps: float
    defined: bool = True


def summarize_rows(entity_id: str, date: dt.date | None,
                   market_values: Sequence[float],
                   profile_var_bps: Sequence[float],
                   portfolio_var_bps: Sequence[float]) -> WeightedSummary:
    """Weighted summary from already-scored rows."""
    mv = np.asarray(market_values, dtype=float)
    prof = np.asarray(profile_var_bps, dtype=float)
    port = np.asarray(portfolio_var_bps, dtype=float)
    if mv.size == 0:
        raise DatasetError("weighted summary needs at least one row")
    total = float(mv.sum())
    if total <= 0.0:
        return WeightedSummary(
            entity_id=entity_id, date=date, n_accounts=int(mv.size),
            mean_market_value=float(mv.mean()),
            profile_var_bps=float("nan"), portfolio_var_bps=float("nan"),
            discrepancy_bps=float("nan"), defined=False,
        )
    w = mv / total
    wprof = float(w @ prof)
    wport = float(w @ port)
    return WeightedSummary(
        entity_id=entity_id, date=date, n_accounts=int(mv.size),
        mean_market_value=float(mv.mean()),
        profile_var_bps=wprof, portfolio_var_bps=wport,
        discrepancy_bps=wport - wprof,
    )


def client_summary(frame: RiskFrame, client_id: str,
                   on_date: dt.date) -> WeightedSummary:
    """Weighted summary of one client's accounts on one date."""
    idx = [
        i for i in range(len(frame))
        if frame.client_ids[i] == client_id and frame.dates[i] == on_date
    ]
    if not idx:
        raise DatasetError(f"no rows for client {client_id!r} on {on_date}")
    return summarize_rows(
        client_id, on_date,
        frame.market_values[idx],
        frame.profile_var_bps[idx],
        frame.portfolio_var_bps[idx],
    )


@dataclass(frozen=True)
class SeriesPoint:
    """One (date, group) cell of a statistic series; value None when empty."""

    date: dt.date
    group: str
    n: int
    value: float | None


@dataclass(frozen=True)
class QuantilePoint:
    """One (date, group) cell of a quantile series.

    ``values`` maps quantile level to value and is non-decreasing in the
    level; None when the cell is empty.
    """

    date: dt.date
    group: str
    n: int
    values: dict[float, float] | None

    def __post_init__(self) -> None:
        if self.values is not None:
            ordered = [self.values[q] for q in sorted(self.values)]
            if any(b < a for a, b in zip(ordered, ordered[1:])):
                raise DatasetError("quantile values must be non-decreasing in the level")


@dataclass(frozen=True)
class StatSeries:
    grouping: str
    measure: str
    statistic: str
    points: list[SeriesPoint]


@dataclass(frozen=True)
class QuantileSeries:
    grouping: str
    measure: str
    quantiles: tuple[float, ...]
    points: list[QuantilePoint]


def quantile_linear(values: Sequence[float], q: float) -> float:
    """Quantile with linear interpolation between order statistics."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise DatasetError("quantile of an empty sample")
    return float(np.quantile(arr, q))


def group_timeseries(frame: RiskFrame,
                     grouping: Grouping | Callable[[RiskFrame], Sequence[str]],
                     measure: Measure = "discrepancy",
                     statistic: str = "mean",
                     quantiles: Sequence[float] = DEFAULT_QUANTILES
                     ) -> StatSeries | QuantileSeries:
    """Per-date statistic of a measure for every group.

    Emits one point per (date, group) over all dates and all groups seen in
    the frame; combinations with no rows get an explicit empty point.
    ``statistic`` is ``mean``, ``median`` or ``quantiles``.
    """
    keys = frame.group_keys(grouping)
    values = frame.measure(measure)
    groups = sorted({k for k in keys if k is not None})
    dates = frame.unique_dates()
    cells: dict[tuple[dt.date, str], list[float]] = {}
    for i, key in enumerate(keys):
        if key is None:
            continue
        cells.setdefault((frame.dates[i], key), []).append(float(values[i]))
    grouping_name = grouping if isinstance(grouping, str) else "custom"
    if statistic == "quantiles":
        qlevels = tuple(float(q) for q in quantiles)
        qpoints = []
        for date in dates:
            for group in groups:
                sample = cells.get((date, group))
                if not sample:
                    qpoints.append(QuantilePoint(date, group, 0, None))
                else:
                    qpoints.append(QuantilePoint(
                        date, group, len(sample),
                        {q: quantile_linear(sample, q) for q in qlevels},
                    ))
        return QuantileSeries(grouping_name, measure, qlevels, qpoints)
    if statistic not in ("mean", "median"):
        raise DatasetError(f"unknown statistic: {statistic!r}")
    points = []
    for date in dates:
        for group in groups:
            sample = cells.get((date, group))
            if not sample:
                points.append(SeriesPoint(date, group, 0, None))
            else:
                agg = float(np.mean(sample)) if statistic == "mean" else float(np.median(sample))
                points.append(SeriesPoint(date, group, len(sample), agg))
    return StatSeries(grouping_name, measure, statistic, points)


@dataclass(frozen=True)
class Histogram1D:
    """Counts over half-open bins [edge[i], edge[i+1])."""

    edges: np.ndarray
    counts: np.ndarray


@dataclass(frozen=True)
class Histogram2D:
    """counts[i][j] covers x in [x_edges[i], x_edges[i+1]) and y likewise."""

    x_edges: np.ndarray
    y_edges: np.ndarray
    counts: np.ndarray


def _bin_span(values: np.ndarray, width: float, origin: float) -> tuple[int, int]:
    idx = np.floor((values - origin) / width).astype(int)
    return int(idx.min()), int(idx.max())


def histogram(values: Sequence[float], bin_width: float,
              origin: float = 0.0) -> Histogram1D:
    """Fixed-width histogram with bins anchored at the origin."""
    if bin_width <= 0:
        raise DatasetError(f"bin width must be positive: {bin_width}")
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise DatasetError("histogram of an empty sample")
    idx = np.floor((arr - origin) / bin_width).astype(int)
    lo, hi = int(idx.min()), int(idx.max())
    counts = np.bincount(idx - lo, minlength=hi - lo + 1)
    edges = origin + bin_width * np.arange(lo, hi + 2)
    return Histogram1D(edges=edges, counts=counts)


def histogram2d(x_values: Sequence[float], y_values: Sequence[float],
                bin_width: float, origin: float = 0.0) -> Histogram2D:
    """Joint fixed-width histogram, same bin width on both axes."""
    if bin_width <= 0:
        raise DatasetError(f"bin width must be positive: {bin_width}")
    x = np.asarray(x_values, dtype=float)
    y = np.asarray(y_values, dtype=float)
    if x.size == 0 or x.size != y.size:
        raise DatasetError("2D histogram needs equal-length non-empty samples")
    xi = np.floor((x - origin) / bin_width).astype(int)
    yi = np.floor((y - origin) / bin_width).astype(int)
    xlo, xhi = int(xi.min()), int(xi.max())
    ylo, yhi = int(yi.min()), int(yi.max())
    counts = np.zeros((xhi - xlo + 1, yhi - ylo + 1), dtype=int)
    np.add.at(counts, (xi - xlo, yi - ylo), 1)
    return Histogram2D(
        x_edges=origin + bin_width * np.arange(xlo, xhi + 2),
        y_edges=origin + bin_width * np.arange(ylo, yhi + 2),
        counts=counts,
    )


def under_risked_share(frame: RiskFrame, on_date: dt.date,
                       band_bps: float = 0.0) -> float:
    """Fraction of accounts on a date with discrepancy at or below -band."""
    idx = frame.date_indices(on_date)
    if idx.size == 0:
        raise DatasetError(f"no rows on {on_date}")
    gaps = frame.discrepancy_bps[idx]
    return float(np.mean(gaps <= -band_bps))


@dataclass(frozen=True)
class EventRecord:
    """One detected event with its surrounding portfolio-VaR measurements."""

    account_id: str
    date: dt.date
    measure_before: float
    measure_after: float
    delta_bps: float
    profile_var_bps: float
    portfolio_var_bps: float
    truncated: bool = False


@dataclass(frozen=True)
class EventStudy:
    event_type: str  # "cash_influx" | "kyc_change"
    params: dict
    events: list[EventRecord]


def _account_series(frame: RiskFrame) -> list[tuple[str, list[int]]]:
    """Row indices per account in date order (frame is already sorted)."""
    series: dict[str, list[int]] = {}
    for i, account in enumerate(frame.account_ids):
        series.setdefault(account, []).append(i)
    return sorted(series.items())


def cash_influx_study(frame: RiskFrame, threshold: float = 0.5) -> EventStudy:
    """Dates where an account's market value jumps by at least ``threshold``.

    An event fires when the market value on a date is at least ``1 +
    threshold`` times the value on the account's previous available date.
    ``delta_bps`` is the portfolio VaR change across the jump.
    """
    if threshold <= 0:
        raise DatasetError(f"influx threshold must be positive: {threshold}")
    events = []
    for account, idx in _account_series(frame):
        for prev, cur in zip(idx, idx[1:]):
            mv_prev = float(frame.market_values[prev])
            mv_cur = float(frame.market_values[cur])
            if mv_cur > mv_prev and mv_cur >= (1.0 + threshold) * mv_prev:
                events.append(EventRecord(
                    account_id=account,
                    date=frame.dates[cur],
                    measure_before=float(frame.portfolio_var_bps[prev]),
                    measure_after=float(frame.portfolio_var_bps[cur]),
                    delta_bps=float(frame.portfolio_var_bps[cur]
                                    - frame.portfolio_var_bps[prev]),
                    profile_var_bps=float(frame.profile_var_bps[cur]),
                    portfolio_var_bps=float(frame.portfolio_var_bps[cur]),
                ))
    return EventStudy("cash_influx", {"threshold": threshold}, events)


def kyc_change_study(frame: RiskFrame, window: int = 10,
                     direction: str = "after",
                     min_change_bps: float = 1.0) -> EventStudy:
    """Profile-VaR changes and the portfolio-VaR move around them.

    A change event fires at the first date where an account's profile VaR
    moved by at least ``min_change_bps`` from the previous available date.
    ``direction="after"`` measures the portfolio VaR from the change date to
    ``window`` available dates later; ``"before"`` measures it over the
    ``window`` dates leading up to the change.  Events too close to the
    dataset edge are emitted with ``truncated=True`` using the nearest
    available date.
    """
    if window < 1:
        raise DatasetError(f"window must be at least 1 date: {window}")
    if direction not in ("after", "before"):
        raise DatasetError(f"direction must be 'after' or 'before': {direction!r}")
    events = []
    for account, idx in _account_series(frame):
        for pos in range(1, len(idx)):
            i_prev, i_cur = idx[pos - 1], idx[pos]
            change = float(frame.profile_var_bps[i_cur] - frame.profile_var_bps[i_prev])
            if abs(change) < min_change_bps:
                continue
            if direction == "after":
                end_pos = pos + window
                truncated = end_pos >= len(idx)
                i_end = idx[min(end_pos, len(idx) - 1)]
                before = float(frame.portfolio_var_bps[i_cur])
                after = float(frame.portfolio_var_bps[i_end])
            else:
                start_pos = pos - 1 - window
                truncated = start_pos < 0
                i_start = idx[max(start_pos, 0)]
                before = float(frame.portfolio_var_bps[i_start])
                after = float(frame.portfolio_var_bps[i_prev])
            events.append(EventRecord(
                account_id=account,
                date=frame.dates[i_cur],
                measure_before=before,
                measure_after=after,
                delta_bps=after - before,
                profile_var_bps=float(frame.profile_var_bps[i_cur]),
                portfolio_var_bps=float(frame.portfolio_var_bps[i_cur]),
                truncated=truncated,
            ))
    return EventStudy(
        "kyc_change",
        {"window": window, "direction": direction, "min_change_bps": min_change_bps},
        events,
    )


@dataclass(frozen=True)
class BootstrapCI:
    """Percentile bootstrap confidence interval for one group mean."""

    group: str
    n: int
    estimate: float
    lower: float
    upper: float
    confidence: float
    n_resamples: int
    degenerate: bool = False

    def __post_init__(self) -> None:
        if not self.lower <= self.estimate <= self.upper:
            raise DatasetError("bootstrap interval must contain the estimate")


_BOOTSTRAP_CHUNK = 256


def bootstrap_mean_ci(values: Sequence[float], rng: np.random.Generator,
                      n_resamples: int = 9999, confidence: float = 0.95,
                      group: str = "") -> BootstrapCI:
    """Percentile-method CI for the mean of one sample."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise DatasetError("bootstrap of an empty sample")
    if n_resamples < 1:
        raise DatasetError(f"resample count must be at least 1: {n_resamples}")
    if not 0.0 < confidence < 1.0:
        raise DatasetError(f"confidence must lie in (0, 1): {confidence}")
    estimate = float(arr.mean())
    if arr.size == 1:
        return BootstrapCI(group, 1, estimate, estimate, estimate,
                           confidence, n_resamples, degenerate=True)
    means = np.empty(n_resamples)
    done = 0
    while done < n_resamples:
        take = min(_BOOTSTRAP_CHUNK, n_resamples - done)
        draws = rng.integers(0, arr.size, size=(take, arr.size))
        means[done:done + take] = arr[draws].mean(axis=1)
        done += take
    tail = (1.0 - confidence) / 2.0
    lower = float(np.quantile(means, tail))
    upper = float(np.quantile(means, 1.0 - tail))
    # The percentile interval can exclude the point estimate for tiny B;
    # widen so the interval invariant always holds.
    return BootstrapCI(
        group=group, n=int(arr.size), estimate=estimate,
        lower=min(lower, estimate), upper=max(upper, estimate),
        confidence=confidence, n_resamples=n_resamples,
    )


def bootstrap_group_means(frame: RiskFrame,
                          grouping: Grouping | Callable[[RiskFrame], Sequence[str]],
                          measure: Measure = "discrepancy",
                          on_date: dt.date | None = None,
                          n_resamples: int = 9999, confidence: float = 0.95,
                          seed: int = 0) -> list[BootstrapCI]:
    """Bootstrap CIs for each group's mean, deterministic for a given seed.

    Groups are processed in sorted key order from one seeded generator, so
    identical inputs produce identical intervals.
    """
    keys = frame.group_keys(grouping)
    values = frame.measure(measure)
    rows: dict[str, list[float]] = {}
    for i, key in enumerate(keys):
        if key is None:
            continue
        if on_date is not None and frame.dates[i] != on_date:
            continue
        rows.setdefault(key, []).append(float(values[i]))
    if not rows:
        raise DatasetError("no rows to bootstrap for the requested slice")
    rng = np.random.default_rng(seed)
    return [
        bootstrap_mean_ci(rows[group], rng, n_resamples, confidence, group)
        for group in sorted(rows)
    ]
