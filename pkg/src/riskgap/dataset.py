"""Dataset records and CSV ingestion.

Two files describe a book of business:

* an account snapshot file, one row per (account, date), carrying the stated
  profile allocation and the observed portfolio allocation as fractions;
* a client file, one row per client, carrying demographic fields and an
  optional cluster label.

Snapshot schema (header order is canonical)::

    account_id,client_id,advisor_id,date,account_type,advisory_type,
    market_value,prof_low,prof_lowmed,prof_med,prof_medhigh,prof_high,
    port_low,port_lowmed,port_med,port_medhigh,port_high

Client schema::

    client_id,age,gender,annual_income,investment_knowledge,marital_status,
    residency,retired,cluster_label

Canonical writing uses ISO dates, market values and incomes with two
decimals, and allocations as six-decimal fractions adjusted so each group of
five sums to exactly 1.000000; parsing a canonically written file and writing
it again is byte-identical.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .allocation import N_BUCKETS, RiskAllocation
from .errors import DatasetError

SNAPSHOT_HEADER = (
    "account_id", "client_id", "advisor_id", "date", "account_type",
    "advisory_type", "market_value",
    "prof_low", "prof_lowmed", "prof_med", "prof_medhigh", "prof_high",
    "port_low", "port_lowmed", "port_med", "port_medhigh", "port_high",
)

CLIENT_HEADER = (
    "client_id", "age", "gender", "annual_income", "investment_knowledge",
    "marital_status", "residency", "retired", "cluster_label",
)

ACCOUNT_TYPES = ("Cash", "LIRA", "RDSP", "RESP", "RIF", "RSP", "TFSA", "Margin")
ADVISORY_TYPES = ("discretionary", "non-discretionary", "unknown")
GENDERS = ("M", "F")
MARITAL_STATUSES = ("M", "D", "S", "unknown")
RETIRED_VALUES = ("yes", "no", "unknown")

MIN_AGE = 18


@dataclass(frozen=True)
class AccountSnapshot:
    """One account observed on one date."""

    account_id: str
    client_id: str
    advisor_id: str
    date: dt.date
    account_type: str
    advisory_type: str
    market_value: float
    profile: RiskAllocation
    portfolio: RiskAllocation

    def __post_init__(self) -> None:
        if not self.account_id:
            raise DatasetError("account_id must be non-empty")
        if not self.client_id:
            raise DatasetError("client_id must be non-empty")
        if not self.advisor_id:
            raise DatasetError("advisor_id must be non-empty")
        if self.account_type not in ACCOUNT_TYPES:
            raise DatasetError(f"unknown account_type: {self.account_type!r}")
        if self.advisory_type not in ADVISORY_TYPES:
            raise DatasetError(f"unknown advisory_type: {self.advisory_type!r}")
        if not self.market_value >= 0.0:
            raise DatasetError(f"market_value must be non-negative: {self.market_value!r}")


@dataclass(frozen=True)
class ClientRecord:
    """Demographics for one client; cluster_label is an optional 1..5 tag."""

    client_id: str
    age: int
    gender: str
    annual_income: float
    investment_knowledge: int
    marital_status: str
    residency: str
    retired: str
    cluster_label: int | None = None

    def __post_init__(self) -> None:
        if not self.client_id:
            raise DatasetError("client_id must be non-empty")
        if self.age < MIN_AGE:
            raise DatasetError(f"age below legal minimum {MIN_AGE}: {self.age}")
        if self.gender not in GENDERS:
            raise DatasetError(f"unknown gender code: {self.gender!r}")
        if not self.annual_income >= 0.0:
            raise DatasetError(f"annual_income must be non-negative: {self.annual_income!r}")
        if not 1 <= self.investment_knowledge <= 4:
            raise DatasetError(
                f"investment_knowledge must be 1..4: {self.investment_knowledge}"
            )
        if self.marital_status not in MARITAL_STATUSES:
            raise DatasetError(f"unknown marital_status: {self.marital_status!r}")
        if not self.residency:
            raise DatasetError("residency must be non-empty")
        if self.retired not in RETIRED_VALUES:
            raise DatasetError(f"unknown retired value: {self.retired!r}")
        if self.cluster_label is not None and not 1 <= self.cluster_label <= 5:
            raise DatasetError(f"cluster_label must be 1..5: {self.cluster_label}")


@dataclass
class DatasetManifest:
    """Summary of one parse: coverage counts plus per-row rejections."""

    n_rows_accepted: int = 0
    n_rows_rejected: int = 0
    n_accounts: int = 0
    n_clients: int = 0
    n_advisors: int = 0
    date_min: dt.date | None = None
    date_max: dt.date | None = None
    rejections: list[dict] = field(default_factory=list)

    def to_json(self) -> str:
        body = {
            "n_rows_accepted": self.n_rows_accepted,
            "n_rows_rejected": self.n_rows_rejected,
            "n_accounts": self.n_accounts,
            "n_clients": self.n_clients,
            "n_advisors": self.n_advisors,
            "date_min": self.date_min.isoformat() if self.date_min else None,
            "date_max": self.date_max.isoformat() if self.date_max else None,
            "rejections": self.rejections,
        }
        return json.dumps(body, indent=2, sort_keys=True) + "\n"


def parse_snapshots(text: str, strict: bool = True
                    ) -> tuple[list[AccountSnapshot], DatasetManifest]:
    """Parse a snapshot CSV document.

    In strict mode the first bad row raises ``DatasetError`` naming the row;
    in lenient mode bad rows are skipped and recorded in the manifest.  A
    missing or reordered header is an error in both modes, as are duplicate
    (account_id, date) pairs.
    """
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows or tuple(rows[0]) != SNAPSHOT_HEADER:
        raise DatasetError("snapshot header missing or not in canonical order")
    manifest = DatasetManifest()
    snapshots: list[AccountSnapshot] = []
    seen: set[tuple[str, str]] = set()
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        try:
            snap = _parse_snapshot_row(row)
            key = (snap.account_id, snap.date.isoformat())
            if key in seen:
                raise DatasetError(f"duplicate (account_id, date): {key}")
            seen.add(key)
        except DatasetError as exc:
            if strict:
                raise DatasetError(f"row {lineno}: {exc}") from exc
            manifest.n_rows_rejected += 1
            manifest.rejections.append({"row": lineno, "reason": str(exc)})
            continue
        snapshots.append(snap)
    manifest.n_rows_accepted = len(snapshots)
    manifest.n_accounts = len({s.account_id for s in snapshots})
    manifest.n_clients = len({s.client_id for s in snapshots})
    manifest.n_advisors = len({s.advisor_id for s in snapshots})
    if snapshots:
        dates = [s.date for s in snapshots]
        manifest.date_min = min(dates)
        manifest.date_max = max(dates)
    return snapshots, manifest


def _parse_snapshot_row(row: Sequence[str]) -> AccountSnapshot:
    if len(row) != len(SNAPSHOT_HEADER):
        raise DatasetError(f"expected {len(SNAPSHOT_HEADER)} fields, got {len(row)}")
    values = dict(zip(SNAPSHOT_HEADER, (v.strip() for v in row)))
    try:
        date = dt.date.fromisoformat(values["date"])
    except ValueError as exc:
        raise DatasetError(f"bad ISO date: {values['date']!r}") from exc
    market_value = _parse_float(values["market_value"], "market_value")
    try:
        profile = RiskAllocation([
            _parse_float(values[k], k)
            for k in ("prof_low", "prof_lowmed", "prof_med", "prof_medhigh", "prof_high")
        ])
        portfolio = RiskAllocation([
            _parse_float(values[k], k)
            for k in ("port_low", "port_lowmed", "port_med", "port_medhigh", "port_high")
        ])
    except Exception as exc:
        raise DatasetError(str(exc)) from exc
    return AccountSnapshot(
        account_id=values["account_id"],
        client_id=values["client_id"],
        advisor_id=values["advisor_id"],
        date=date,
        account_type=values["account_type"],
        advisory_type=values["advisory_type"],
        market_value=market_value,
        profile=profile,
        portfolio=portfolio,
    )


def _parse_float(text: str, what: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise DatasetError(f"bad decimal for {what}: {text!r}") from exc


def format_allocation(alloc: RiskAllocation) -> tuple[str, ...]:
    """Six-decimal fraction fields that sum to exactly 1.000000.

    Rounds each weight to micro-units, then distributes the rounding residual
    to the entries with the largest remainders so the written row re-parses
    to the same allocation.
    """
    scaled = [w * 1_000_000 for w in alloc.weights]
    micro = [int(v + 0.5) for v in scaled]
    residual = 1_000_000 - sum(micro)
    if residual != 0:
        remainders = sorted(
            range(N_BUCKETS),
            key=lambda i: (scaled[i] - int(scaled[i]), -micro[i]),
            reverse=(residual > 0),
        )
        step = 1 if residual > 0 else -1
        k = 0
        while residual != 0:
            i = remainders[k % N_BUCKETS]
            if step < 0 and micro[i] == 0:
                k += 1
                continue
            micro[i] += step
            residual -= step
            k += 1
    return tuple(f"{m / 1_000_000:.6f}" for m in micro)


def write_snapshots(snapshots: Iterable[AccountSnapshot]) -> str:
    """Render snapshots canonically; inverse of ``parse_snapshots``."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SNAPSHOT_HEADER)
    for s in snapshots:
        writer.writerow([
            s.account_id, s.client_id, s.advisor_id, s.date.isoformat(),
            s.account_type, s.advisory_type, f"{s.market_value:.2f}",
            *format_allocation(s.profile), *format_allocation(s.portfolio),
        ])
    return out.getvalue()


def parse_clients(text: str, strict: bool = True
                  ) -> tuple[list[ClientRecord], DatasetManifest]:
    """Parse a client CSV document; same strict/lenient contract as snapshots."""
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows or tuple(rows[0]) != CLIENT_HEADER:
        raise DatasetError("client header missing or not in canonical order")
    manifest = DatasetManifest()
    clients: list[ClientRecord] = []
    seen: set[str] = set()
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        try:
            rec = _parse_client_row(row)
            if rec.client_id in seen:
                raise DatasetError(f"duplicate client_id: {rec.client_id}")
            seen.add(rec.client_id)
        except DatasetError as exc:
            if strict:
                raise DatasetError(f"row {lineno}: {exc}") from exc
            manifest.n_rows_rejected += 1
            manifest.rejections.append({"row": lineno, "reason": str(exc)})
            continue
        clients.append(rec)
    manifest.n_rows_accepted = len(clients)
    manifest.n_clients = len(clients)
    return clients, manifest


def _parse_client_row(row: Sequence[str]) -> ClientRecord:
    if len(row) != len(CLIENT_HEADER):
        raise DatasetError(f"expected {len(CLIENT_HEADER)} fields, got {len(row)}")
    values = dict(zip(CLIENT_HEADER, (v.strip() for v in row)))
    try:
        age = int(values["age"])
        knowledge = int(values["investment_knowledge"])
    except ValueError as exc:
        raise DatasetError(f"bad integer field: {exc}") from exc
    label: int | None = None
    if values["cluster_label"]:
        try:
            label = int(values["cluster_label"])
        except ValueError as exc:
            raise DatasetError(f"bad cluster_label: {values['cluster_label']!r}") from exc
    return ClientRecord(
        client_id=values["client_id"],
        age=age,
        gender=values["gender"],
        annual_income=_parse_float(values["annual_income"], "annual_income"),
        investment_knowledge=knowledge,
        marital_status=values["marital_status"],
        residency=values["residency"],
        retired=values["retired"],
        cluster_label=label,
    )


def write_clients(clients: Iterable[ClientRecord]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CLIENT_HEADER)
    for c in clients:
        writer.writerow([
            c.client_id, str(c.age), c.gender, f"{c.annual_income:.2f}",
            str(c.investment_knowledge), c.marital_status, c.residency,
            c.retired, "" if c.cluster_label is None else str(c.cluster_label),
        ])
    return out.getvalue()


def load_snapshots_file(path: str, strict: bool = True
                        ) -> tuple[list[AccountSnapshot], DatasetManifest]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return parse_snapshots(fh.read(), strict=strict)


def load_clients_file(path: str, strict: bool = True
                      ) -> tuple[list[ClientRecord], DatasetManifest]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return parse_clients(fh.read(), strict=strict)
