"""Seed-deterministic synthetic cohort generation.

The generator builds a balanced panel of accounts observed on consecutive
calendar dates.  Stated profiles are drawn from a catalogue dominated by the
all-Medium allocation; each account's portfolio is the profile plus a drift:
with probability ``down_prob`` a uniform fraction of every bucket's mass
moves one bucket toward the safe end, with probability ``equal_prob`` the
portfolio matches the profile exactly, and otherwise mass moves one bucket
toward the risky end.  Bucket correlations can make a small shift move the
portfolio's VaR the wrong way (mixing adjacent buckets diversifies), so
every drifted portfolio is verified against the model and, when the risk gap
has the wrong sign, deterministically escalated by blending the profile
toward the Low or High corner with a doubling fraction until the sign is
right.  Down-drifted and matching accounts land at or below a zero risk gap,
so the cohort's under-risked share is ``down_prob + equal_prob`` plus the
mass of risky-end profiles whose upward drift has nowhere to go;
``calibrated_cohort_spec`` solves that correction so the expected share hits
a requested target.

Market values follow a small lognormal random walk; optional deposit events
multiply an account's value by 1.6x-2.2x from one date onward while leaving
its allocation unchanged, so a cash-influx study finds them with a zero
portfolio-VaR delta.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass

import numpy as np

from .allocation import RiskAllocation
from .dataset import AccountSnapshot, ClientRecord
from .errors import SynthesisError
from .market import DEFAULT_ALPHA, BucketMarketModel, load_default_model
from .var_engine import solve_allocation_for_var, var

# Sampling tables for cohort demographics.  Weights are relative frequencies.
ACCOUNT_TYPE_WEIGHTS = {
    "Cash": 7843, "LIRA": 129, "RDSP": 204, "RESP": 2975,
    "RIF": 6169, "RSP": 19979, "TFSA": 11080, "Margin": 944,
}
ADVISORY_TYPE_WEIGHTS = {
    "discretionary": 4423, "non-discretionary": 44712, "unknown": 1845,
}
ACCOUNTS_PER_CLIENT_WEIGHTS = {
    1: 13112, 2: 8246, 3: 4380, 4: 1457, 5: 330, 6: 87, 7: 20, 8: 12,
}
GENDER_WEIGHTS = {"M": 0.505, "F": 0.495}
MARITAL_WEIGHTS = {"M": 0.67, "S": 0.18, "unknown": 0.11, "D": 0.04}
RESIDENCY_WEIGHTS = {
    "ON": 0.6536, "BC": 0.1385, "AB": 0.1280, "MB": 0.0407,
    "NS": 0.0217, "Other": 0.0175,
}
RETIRED_WEIGHTS = {"no": 0.739, "yes": 0.182, "unknown": 0.079}
# Investment knowledge 1 (poor) .. 4 (sophisticated).
KNOWLEDGE_WEIGHTS = {1: 0.176, 2: 0.352, 3: 0.447, 4: 0.025}

AGE_MEAN, AGE_SD, AGE_MIN, AGE_MAX = 57.5, 14.8, 18, 100
# Lognormal parameters fitted to income quartiles near 37k / 64k / 100k CAD.
INCOME_LOG_MEAN, INCOME_LOG_SD = math.log(64_000.0), 0.737
# Lognormal parameters fitted to market-value quartiles near 44k / 113k / 262k.
MV_LOG_MEAN, MV_LOG_SD = math.log(113_147.0), 1.32
MV_FLOOR = 500.0
DEPOSIT_FACTOR_RANGE = (1.6, 2.2)

DEFAULT_CATALOGUE: tuple[tuple[RiskAllocation, float], ...] = (
    (RiskAllocation.one_hot(2), 0.60),
    (RiskAllocation.one_hot(0), 0.09),
    (RiskAllocation.one_hot(1), 0.08),
    (RiskAllocation.one_hot(3), 0.10),
    (RiskAllocation([0.0, 0.0, 0.5, 0.0, 0.5]), 0.09),
    (RiskAllocation.one_hot(4), 0.04),
)


@dataclass(frozen=True)
class SyntheticSpec:
    """Cohort construction parameters; validated for feasibility."""

    n_accounts: int = 5000
    n_dates: int = 30
    start_date: dt.date = dt.date(2025, 1, 6)
    catalogue: tuple[tuple[RiskAllocation, float], ...] = DEFAULT_CATALOGUE
    profile_var_target_bps: float | None = None
    down_prob: float = 0.703
    equal_prob: float = 0.164
    shift_lo: float = 0.05
    shift_hi: float = 0.50
    n_advisors: int = 80
    n_deposit_events: int = 60
    mv_walk_sigma: float = 0.004

    def __post_init__(self) -> None:
        if self.n_accounts < 1:
            raise SynthesisError(f"n_accounts must be positive: {self.n_accounts}")
        if self.n_dates < 1:
            raise SynthesisError(f"n_dates must be positive: {self.n_dates}")
        if self.n_advisors < 1:
            raise SynthesisError(f"n_advisors must be positive: {self.n_advisors}")
        if not self.catalogue:
            raise SynthesisError("profile catalogue must be non-empty")
        probs = [p for _, p in self.catalogue]
        if any(p < 0 for p in probs) or abs(sum(probs) - 1.0) > 1e-9:
            raise SynthesisError("catalogue probabilities must be non-negative and sum to 1")
        if not 0.0 <= self.down_prob <= 1.0 or not 0.0 <= self.equal_prob <= 1.0:
            raise SynthesisError("drift probabilities must lie in [0, 1]")
        if self.down_prob + self.equal_prob > 1.0 + 1e-12:
            raise SynthesisError("down_prob + equal_prob must not exceed 1")
        if self.shift_hi < self.shift_lo:
            raise SynthesisError(
                f"drift shift spread is negative: [{self.shift_lo}, {self.shift_hi}]"
            )
        if not 0.0 < self.shift_lo <= 1.0 or not self.shift_hi <= 1.0:
            raise SynthesisError("drift shift fractions must lie in (0, 1]")
        if self.n_deposit_events < 0:
            raise SynthesisError("n_deposit_events must be non-negative")
        if self.n_deposit_events > 0 and self.n_dates < 2:
            raise SynthesisError("deposit events need at least two dates")
        if self.n_deposit_events > self.n_accounts * max(self.n_dates - 1, 0):
            raise SynthesisError("more deposit events than (account, date) slots")
        if self.mv_walk_sigma < 0:
            raise SynthesisError("mv_walk_sigma must be non-negative")

    @property
    def up_prob(self) -> float:
        return max(0.0, 1.0 - self.down_prob - self.equal_prob)


def calibrated_cohort_spec(n_accounts: int = 5000, n_dates: int = 30,
                           under_share_target: float = 0.867,
                           profile_var_target_bps: float | None = 1216.0,
                           equal_prob: float = 0.15,
                           **overrides) -> SyntheticSpec:
    """Spec whose expected under-risked share equals the target.

    Profiles already fully in the riskiest bucket cannot drift upward, so a
    raw up-probability of ``1 - target`` would understate over-risking.  The
    up-probability is inflated by ``1 / (1 - w_saturated)`` where
    ``w_saturated`` is the catalogue mass of such profiles.
    """
    if not 0.0 < under_share_target < 1.0:
        raise SynthesisError(
            f"under_share_target must lie in (0, 1): {under_share_target}"
        )
    catalogue = overrides.pop("catalogue", DEFAULT_CATALOGUE)
    saturated = sum(
        p for alloc, p in catalogue if alloc.weights[-1] >= 1.0 - 1e-12
    )
    if saturated >= 1.0 - 1e-9:
        raise SynthesisError("catalogue is entirely saturated at the riskiest bucket")
    up_prob = (1.0 - under_share_target) / (1.0 - saturated)
    down_prob = 1.0 - equal_prob - up_prob
    if down_prob < 0.0:
        raise SynthesisError("equal_prob too large for the requested target share")
    return SyntheticSpec(
        n_accounts=n_accounts, n_dates=n_dates, catalogue=catalogue,
        profile_var_target_bps=profile_var_target_bps,
        down_prob=down_prob, equal_prob=equal_prob, **overrides,
    )


def shift_allocation(alloc: RiskAllocation, direction: str, fraction: float
                     ) -> RiskAllocation:
    """Move ``fraction`` of each bucket's mass one bucket down or up."""
    w = list(alloc.weights)
    out = [0.0] * 5
    for i in range(5):
        moved = w[i] * fraction
        if direction == "down":
            if i == 0:
                out[0] += w[0]
            else:
                out[i] += w[i] - moved
                out[i - 1] += moved
        elif direction == "up":
            if i == 4:
                out[4] += w[4]
            else:
                out[i] += w[i] - moved
                out[i + 1] += moved
        else:
            raise SynthesisError(f"unknown drift direction: {direction!r}")
    return RiskAllocation(out)


def _weighted_choice(rng: np.random.Generator, table: dict) -> object:
    keys = list(table)
    probs = np.array([table[k] for k in keys], dtype=float)
    return keys[rng.choice(len(keys), p=probs / probs.sum())]


def _blend_toward(profile: RiskAllocation, corner: int, fraction: float
                  ) -> RiskAllocation:
    """Move ``fraction`` of all mass straight to one corner bucket."""
    out = [(1.0 - fraction) * w for w in profile.weights]
    out[corner] += fraction
    return RiskAllocation(out)


def _drifted_portfolio(profile: RiskAllocation, profile_var_bps: float,
                       direction: str, fraction: float,
                       model: BucketMarketModel, alpha: float
                       ) -> RiskAllocation:
    """Portfolio with a verified risk gap of the requested sign.

    Down drifts must land at or below the profile's VaR, up drifts strictly
    above it.  If the plain one-bucket shift misses (diversification can
    push VaR the wrong way), blend toward the Low or High corner, doubling
    the fraction; the High corner carries the maximum VaR on the simplex, so
    upward escalation always terminates for non-saturated profiles.  A
    saturated profile, or a downward escalation that cannot go lower, falls
    back to the profile itself (a zero gap).
    """
    corner = 0 if direction == "down" else 4
    if direction == "up" and profile.weights[4] >= 1.0 - 1e-12:
        return profile

    def acceptable(candidate: RiskAllocation) -> bool:
        gap = var(candidate, model, alpha).value_bps - profile_var_bps
        return gap <= 0.0 if direction == "down" else gap > 0.0

    candidate = shift_allocation(profile, direction, fraction)
    if acceptable(candidate):
        return candidate
    f = fraction
    for _ in range(12):
        candidate = _blend_toward(profile, corner, f)
        if acceptable(candidate):
            return candidate
        if f >= 1.0:
            break
        f = min(2.0 * f, 1.0)
    return profile


def generate_synthetic(spec: SyntheticSpec, seed: int = 0,
                       model: BucketMarketModel | None = None,
                       alpha: float = DEFAULT_ALPHA
                       ) -> tuple[list[ClientRecord], list[AccountSnapshot]]:
    """Build (clients, snapshots) deterministically from a spec and seed."""
    rng = np.random.default_rng(seed)
    if model is None:
        model, _ = load_default_model()
    catalogue = list(spec.catalogue)
    if spec.profile_var_target_bps is not None:
        solved = solve_allocation_for_var(spec.profile_var_target_bps, model, alpha)
        catalogue[0] = (solved, catalogue[0][1])
    catalogue_probs = np.array([p for _, p in catalogue])
    catalogue_probs = catalogue_probs / catalogue_probs.sum()
    catalogue_var_bps = [var(a, model, alpha).value_bps for a, _ in catalogue]

    dates = [spec.start_date + dt.timedelta(days=i) for i in range(spec.n_dates)]
    clients: list[ClientRecord] = []
    accounts: list[dict] = []
    while len(accounts) < spec.n_accounts:
        ci = len(clients)
        client_id = f"C{ci:06d}"
        advisor_id = f"ADV{int(rng.integers(0, spec.n_advisors)):04d}"
        age = int(np.clip(round(rng.normal(AGE_MEAN, AGE_SD)), AGE_MIN, AGE_MAX))
        income = max(0.0, round(rng.lognormal(INCOME_LOG_MEAN, INCOME_LOG_SD) / 100.0) * 100.0)
        clients.append(ClientRecord(
            client_id=client_id,
            age=age,
            gender=str(_weighted_choice(rng, GENDER_WEIGHTS)),
            annual_income=income,
            investment_knowledge=int(_weighted_choice(rng, KNOWLEDGE_WEIGHTS)),
            marital_status=str(_weighted_choice(rng, MARITAL_WEIGHTS)),
            residency=str(_weighted_choice(rng, RESIDENCY_WEIGHTS)),
            retired=str(_weighted_choice(rng, RETIRED_WEIGHTS)),
            cluster_label=int(rng.integers(1, 6)),
        ))
        n_here = int(_weighted_choice(rng, ACCOUNTS_PER_CLIENT_WEIGHTS))
        n_here = min(n_here, spec.n_accounts - len(accounts))
        for _ in range(n_here):
            ai = len(accounts)
            ci_profile = int(rng.choice(len(catalogue), p=catalogue_probs))
            profile = catalogue[ci_profile][0]
            u = rng.random()
            if u < spec.down_prob:
                direction = "down"
            elif u < spec.down_prob + spec.equal_prob:
                direction = "equal"
            else:
                direction = "up"
            if direction == "equal":
                portfolio = profile
            else:
                fraction = float(rng.uniform(spec.shift_lo, spec.shift_hi))
                portfolio = _drifted_portfolio(
                    profile, catalogue_var_bps[ci_profile], direction,
                    fraction, model, alpha,
                )
            accounts.append({
                "account_id": f"A{ai:06d}",
                "client_id": client_id,
                "advisor_id": advisor_id,
                "account_type": str(_weighted_choice(rng, ACCOUNT_TYPE_WEIGHTS)),
                "advisory_type": str(_weighted_choice(rng, ADVISORY_TYPE_WEIGHTS)),
                "profile": profile,
                "portfolio": portfolio,
                "base_mv": max(MV_FLOOR, float(rng.lognormal(MV_LOG_MEAN, MV_LOG_SD))),
            })

    deposit_factor: dict[tuple[int, int], float] = {}
    if spec.n_deposit_events > 0:
        slots = spec.n_accounts * (spec.n_dates - 1)
        flat = rng.choice(slots, size=spec.n_deposit_events, replace=False)
        for f in sorted(int(v) for v in flat):
            pair = (f // (spec.n_dates - 1), 1 + f % (spec.n_dates - 1))
            deposit_factor[pair] = float(rng.uniform(*DEPOSIT_FACTOR_RANGE))

    snapshots: list[AccountSnapshot] = []
    for ai, acct in enumerate(accounts):
        mv = round(acct["base_mv"], 2)
        steps = rng.normal(0.0, spec.mv_walk_sigma, size=max(spec.n_dates - 1, 0))
        for di, date in enumerate(dates):
            if di > 0:
                mv *= math.exp(float(steps[di - 1]))
                mv *= deposit_factor.get((ai, di), 1.0)
                mv = round(mv, 2)
            snapshots.append(AccountSnapshot(
                account_id=acct["account_id"],
                client_id=acct["client_id"],
                advisor_id=acct["advisor_id"],
                date=date,
                account_type=acct["account_type"],
                advisory_type=acct["advisory_type"],
                market_value=mv,
                profile=acct["profile"],
                portfolio=acct["portfolio"],
            ))
    return clients, snapshots
