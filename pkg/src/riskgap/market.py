"""Bucket-level market model: expected returns, volatilities and correlations.

The model assigns each of the five risk buckets an annualized expected return
and volatility (both in percent) plus a 5x5 correlation matrix.  The bucket
covariance matrix is derived as ``cov[i][j] = sigma[i] * rho[i][j] * sigma[j]``
and computed once per unordered pair so it is exactly symmetric.

A model can be read from a small line-oriented config file::

    # comment lines and blanks are ignored
    mu = 0.52, 1.97, 2.21, 2.93, 4.23
    sigma = 0.13, 5.53, 6.48, 9.68, 15.22
    alpha = 0.01
    rho =
    1.00, -0.22, -0.16, -0.23, 0.07
    ...four more rows...

``mu`` and ``sigma`` take five comma-separated decimals, ``alpha`` a single
decimal, and ``rho`` is followed by five rows of five comma-separated
decimals.  The packaged default config carries the reference parameter set
used throughout the test-suite.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .allocation import N_BUCKETS
from .errors import ModelError

# Symmetry / unit-diagonal tolerance for correlation input.
RHO_ATOL = 1e-12

# Smallest admissible correlation eigenvalue; tiny negatives are rounding noise.
EIGENVALUE_SLACK = -1e-8

DEFAULT_ALPHA = 0.01


def build_covariance(sigma: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Covariance from volatilities and correlations, exactly symmetric."""
    cov = np.empty((N_BUCKETS, N_BUCKETS))
    for i in range(N_BUCKETS):
        for j in range(i, N_BUCKETS):
            v = float(sigma[i] * rho[i, j] * sigma[j])
            cov[i, j] = v
            cov[j, i] = v
    return cov


@dataclass(frozen=True)
class BucketMarketModel:
    """Validated bucket market parameters with derived covariance."""

    mu: np.ndarray
    sigma: np.ndarray
    rho: np.ndarray
    covariance: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        mu = np.asarray(self.mu, dtype=float).reshape(-1)
        sigma = np.asarray(self.sigma, dtype=float).reshape(-1)
        rho = np.asarray(self.rho, dtype=float)
        if mu.shape != (N_BUCKETS,) or sigma.shape != (N_BUCKETS,):
            raise ModelError("mu and sigma must each have five entries")
        if rho.shape != (N_BUCKETS, N_BUCKETS):
            raise ModelError("rho must be a 5x5 matrix")
        if not np.all(np.isfinite(mu)) or not np.all(np.isfinite(sigma)) or not np.all(np.isfinite(rho)):
            raise ModelError("model parameters must be finite")
        if np.any(sigma < 0):
            raise ModelError("volatilities must be non-negative")
        if np.max(np.abs(rho - rho.T)) > RHO_ATOL:
            raise ModelError("rho must be symmetric")
        if np.max(np.abs(np.diag(rho) - 1.0)) > RHO_ATOL:
            raise ModelError("rho must have a unit diagonal")
        if np.max(np.abs(rho)) > 1.0 + RHO_ATOL:
            raise ModelError("rho entries must lie in [-1, 1]")
        lo = float(np.linalg.eigvalsh(rho).min())
        if lo < EIGENVALUE_SLACK:
            raise ModelError(
                f"rho is not positive semi-definite: smallest eigenvalue {lo:.3e}"
            )
        for arr in (mu, sigma, rho):
            arr.setflags(write=False)
        cov = build_covariance(sigma, rho)
        cov.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "covariance", cov)

    def fingerprint(self, alpha: float = DEFAULT_ALPHA) -> str:
        """64-bit hex digest of the canonical parameter serialization."""
        parts = [
            "mu=" + ",".join(format(v, ".17g") for v in self.mu),
            "sigma=" + ",".join(format(v, ".17g") for v in self.sigma),
            "rho=" + ";".join(
                ",".join(format(v, ".17g") for v in row) for row in self.rho
            ),
            "alpha=" + format(alpha, ".17g"),
        ]
        digest = hashlib.sha256("|".join(parts).encode("ascii")).hexdigest()
        return digest[:16]


def parse_model(text: str) -> tuple[BucketMarketModel, float]:
    """Parse a model config document; returns (model, alpha)."""
    lines = [
        ln.strip() for ln in text.splitlines()
        if ln.strip() and not ln.strip().startswith("#")
    ]
    seen: dict[str, object] = {}
    i = 0
    while i < len(lines):
        line = lines[i]
        if "=" not in line:
            raise ModelError(f"malformed config line: {line!r}")
        key, _, rest = line.partition("=")
        key = key.strip()
        rest = rest.strip()
        if key in seen:
            raise ModelError(f"duplicate config key: {key}")
        if key in ("mu", "sigma"):
            seen[key] = _parse_row(rest, key)
            i += 1
        elif key == "alpha":
            try:
                seen[key] = float(rest)
            except ValueError as exc:
                raise ModelError(f"bad alpha value: {rest!r}") from exc
            i += 1
        elif key == "rho":
            rows = []
            if rest:
                raise ModelError("rho rows must start on the line after 'rho ='")
            if len(lines) - (i + 1) < N_BUCKETS:
                raise ModelError("rho block must contain five rows")
            for j in range(N_BUCKETS):
                rows.append(_parse_row(lines[i + 1 + j], f"rho row {j + 1}"))
            seen[key] = rows
            i += 1 + N_BUCKETS
        else:
            raise ModelError(f"unknown config key: {key}")
    missing = {"mu", "sigma", "rho", "alpha"} - set(seen)
    if missing:
        raise ModelError(f"config missing keys: {', '.join(sorted(missing))}")
    model = BucketMarketModel(
        mu=np.array(seen["mu"]),
        sigma=np.array(seen["sigma"]),
        rho=np.array(seen["rho"]),
    )
    alpha = float(seen["alpha"])  # validated by the VaR entry points
    return model, alpha


def _parse_row(text: str, what: str) -> list[float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != N_BUCKETS:
        raise ModelError(f"{what} needs five comma-separated decimals: {text!r}")
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise ModelError(f"{what} contains a non-decimal entry: {text!r}") from exc


def load_model_file(path: str) -> tuple[BucketMarketModel, float]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model(fh.read())


def load_default_model() -> tuple[BucketMarketModel, float]:
    """The packaged reference model (five-bucket annualized percents)."""
    text = resources.files("riskgap.data").joinpath("default_model.cfg").read_text("utf-8")
    return parse_model(text)
