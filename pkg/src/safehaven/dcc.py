"""Bivariate DCC(1,1) on GARCH standardized residuals, with correlation targeting.

    Q_t = (1 - a - b) Qbar + a phi_{t-1} phi_{t-1}' + b Q_{t-1},   Q_1 = Qbar
    rho_t = q12_t / sqrt(q11_t q22_t)

``Qbar`` is fixed at the sample correlation matrix of the standardized
residuals, leaving ``(a, b)`` to the second-stage likelihood.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import signal

from .errors import DegenerateSeries, NonFinite
from .garch import (
    PERSISTENCE_CAP,
    GarchFit,
    _multistart,
    GarchOptions,
    GarchParams,
    business_days,
    free_from_simplex,
    simplex_from_free,
)
from .ingest import AlignedPair, ReturnSeries

__all__ = [
    "DccParams",
    "DccFit",
    "CorrelationPath",
    "estimate_q_bar",
    "dcc_recursion",
    "dcc_loglik",
    "fit_dcc",
    "simulate_dcc",
    "RHO_CLAMP",
]

RHO_CLAMP = 0.9999
MIN_DCC_OBS = 30
# Off-diagonal of Qbar this close to +/-1 means the two residual series are collinear.
DEGENERATE_CORR = 1.0 - 1e-8


@dataclass(frozen=True)
class DccParams:
    a: float
    b: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError(f"non-finite DCC parameters: {self}")
        if self.a < 0 or self.b < 0:
            raise ValueError(f"a and b must be non-negative, got {self.a}, {self.b}")
        if self.a + self.b >= 1:
            raise ValueError(f"a + b must be < 1, got {self.a + self.b}")


@dataclass(frozen=True)
class CorrelationPath:
    pair: tuple[str, str]
    dates: np.ndarray = field(repr=False)
    rho: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if len(self.dates) != len(self.rho):
            raise ValueError("dates and rho must have equal length")
        if np.any(np.abs(self.rho) > 1.0):
            raise ValueError("correlations must lie in [-1, 1]")

    def mean(self, start=None, end=None) -> float:
        """Average correlation over ``start <= date <= end`` (nan if empty)."""
        mask = np.ones(len(self.rho), dtype=bool)
        if start is not None:
            mask &= self.dates >= np.datetime64(start, "D")
        if end is not None:
            mask &= self.dates <= np.datetime64(end, "D")
        return float(self.rho[mask].mean()) if mask.any() else float("nan")


@dataclass(frozen=True)
class DccFit:
    params: DccParams
    q_bar: np.ndarray
    q_path: np.ndarray = field(repr=False)
    rho_path: np.ndarray = field(repr=False)
    loglik: float
    converged: bool
    iterations: int = 0
    degenerate: bool = False
    clamp_count: int = 0
    pair: tuple[str, str] = ("", "")
    dates: np.ndarray | None = field(default=None, repr=False)

    @property
    def path(self) -> CorrelationPath:
        dates = self.dates if self.dates is not None else business_days(len(self.rho_path))
        return CorrelationPath(self.pair, dates, self.rho_path)


def _residuals(phi) -> np.ndarray:
    return np.asarray(phi, dtype=float)


def estimate_q_bar(phi_a: Sequence[float], phi_b: Sequence[float]) -> np.ndarray:
    """Sample correlation matrix of the stacked residuals (unit diagonal)."""
    x, y = _residuals(phi_a), _residuals(phi_b)
    if len(x) != len(y):
        raise ValueError("residual series must have equal length")
    if len(x) < MIN_DCC_OBS:
        raise DegenerateSeries(f"need at least {MIN_DCC_OBS} residuals, have {len(x)}")
    xc, yc = x - x.mean(), y - y.mean()
    sxx, syy = float(xc @ xc), float(yc @ yc)
    if sxx <= 0.0 or syy <= 0.0:
        raise DegenerateSeries("a residual series has zero variance")
    r = float(np.clip((xc @ yc) / math.sqrt(sxx * syy), -1.0, 1.0))
    return np.array([[1.0, r], [r, 1.0]])


def _check_q_bar(q_bar: np.ndarray) -> np.ndarray:
    q_bar = np.asarray(q_bar, dtype=float)
    if q_bar.shape != (2, 2) or q_bar[0, 1] != q_bar[1, 0]:
        raise ValueError("q_bar must be a symmetric 2x2 matrix")
    return q_bar


def _elements(a: float, b: float, q_bar: np.ndarray, x: np.ndarray, y: np.ndarray):
    """q11, q22, q12 paths; each obeys q_t = c + a z_{t-1} + b q_{t-1}, q_1 = qbar."""
    out = []
    w = 1.0 - a - b
    for qbar, z in ((q_bar[0, 0], x * x), (q_bar[1, 1], y * y), (q_bar[0, 1], x * y)):
        drive = np.empty_like(z)
        drive[0] = qbar
        drive[1:] = w * qbar + a * z[:-1]
        # Starting from rest with drive[0] = qbar gives q_1 = qbar.
        q, _ = signal.lfilter([1.0], [1.0, -b], drive, zi=[0.0])
        out.append(q)
    return out


def dcc_recursion(
    params: DccParams, q_bar: np.ndarray, phi_a: Sequence[float], phi_b: Sequence[float]
) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(q_path, rho_path)`` with ``q_path`` of shape ``(T, 2, 2)``."""
    q_bar = _check_q_bar(q_bar)
    x, y = _residuals(phi_a), _residuals(phi_b)
    if len(x) != len(y):
        raise ValueError("residual series must have equal length")
    q11, q22, q12 = _elements(params.a, params.b, q_bar, x, y)
    with np.errstate(all="ignore"):
        rho = q12 / np.sqrt(q11 * q22)
    if not np.all(np.isfinite(rho)):
        raise NonFinite("correlation path is not finite")
    rho = np.clip(rho, -1.0, 1.0)
    q_path = np.empty((len(x), 2, 2))
    q_path[:, 0, 0], q_path[:, 1, 1] = q11, q22
    q_path[:, 0, 1] = q_path[:, 1, 0] = q12
    return q_path, rho


def _loglik_terms(rho: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    one_m = 1.0 - rho * rho
    quad = (x * x + y * y - 2.0 * rho * x * y) / one_m
    return -0.5 * (np.log(one_m) + quad - (x * x + y * y))


def _dcc_ll(a, b, q_bar, x, y) -> tuple[float, int]:
    q11, q22, q12 = _elements(a, b, q_bar, x, y)
    with np.errstate(all="ignore"):
        rho = q12 / np.sqrt(q11 * q22)
    clamped = int(np.count_nonzero(np.abs(rho) > RHO_CLAMP))
    rho = np.clip(rho, -RHO_CLAMP, RHO_CLAMP)
    return float(np.sum(_loglik_terms(rho, x, y))), clamped


def dcc_loglik(
    params: DccParams, q_bar: np.ndarray, phi_a: Sequence[float], phi_b: Sequence[float]
) -> float:
    """Correlation part of the Gaussian log-likelihood.

    ``sum -0.5 * (ln|R_t| + phi_t' R_t^{-1} phi_t - phi_t' phi_t)`` with
    ``|R_t| = 1 - rho_t**2``. Correlations are clamped to +/-0.9999.
    """
    q_bar = _check_q_bar(q_bar)
    x, y = _residuals(phi_a), _residuals(phi_b)
    with np.errstate(all="ignore"):
        ll, _ = _dcc_ll(params.a, params.b, q_bar, x, y)
    if not math.isfinite(ll):
        raise NonFinite(f"DCC log-likelihood is not finite at {params}")
    return ll


_START_GRID = ((0.02, 0.95), (0.05, 0.90), (0.03, 0.80), (0.10, 0.80), (0.01, 0.50))


def _fit_ab(x, y, q_bar, opts: GarchOptions):
    n = len(x)
    rng = np.random.default_rng(opts.seed)

    def objective(z: np.ndarray) -> float:
        a, b = simplex_from_free(z[0], z[1])
        with np.errstate(all="ignore"):
            ll, _ = _dcc_ll(a, b, q_bar, x, y)
        return -ll / n if math.isfinite(ll) else math.inf

    grid = [np.array(free_from_simplex(a, b)) for a, b in _START_GRID]
    start = min(grid, key=objective)
    starts = [start] + [start + rng.normal(scale=0.5, size=2) for _ in range(max(opts.restarts, 0))]
    best, iterations = _multistart(objective, starts, opts)
    a, b = simplex_from_free(*best.x)
    return a, b, best.converged, iterations


def _std_residuals_on(fit: GarchFit, dates: np.ndarray | None, n: int) -> np.ndarray:
    phi = np.asarray(fit.std_residuals, dtype=float)
    if dates is None or fit.dates is None:
        if len(phi) != n:
            raise ValueError(f"{fit.asset_id}: {len(phi)} residuals for {n} aligned observations")
        return phi
    idx = np.searchsorted(fit.dates, dates)
    if np.any(idx >= len(fit.dates)) or np.any(fit.dates[np.minimum(idx, len(phi) - 1)] != dates):
        raise ValueError(f"{fit.asset_id}: GARCH fit does not cover the aligned dates")
    return phi[idx]


def fit_dcc(
    pair: AlignedPair | None,
    garch_a: GarchFit,
    garch_b: GarchFit,
    opts: GarchOptions | None = None,
) -> DccFit:
    """Second-stage DCC fit for one (asset, index) pair.

    Standardized residuals are taken from the two GARCH fits on the pair's
    common dates. If the residuals are perfectly collinear the correlation
    is +/-1 throughout; a degenerate fit is returned rather than optimised.
    """
    opts = opts or GarchOptions()
    dates = pair.common_dates if pair is not None else None
    n = len(pair) if pair is not None else len(garch_a.std_residuals)
    x = _std_residuals_on(garch_a, dates, n)
    y = _std_residuals_on(garch_b, dates, n)
    ids = (
        (pair.asset.asset_id, pair.index.asset_id)
        if pair is not None
        else (garch_a.asset_id, garch_b.asset_id)
    )
    q_bar = estimate_q_bar(x, y)
    if abs(q_bar[0, 1]) >= DEGENERATE_CORR:
        sign = math.copysign(1.0, q_bar[0, 1])
        q_path = np.broadcast_to(q_bar, (n, 2, 2)).copy()
        return DccFit(
            DccParams(0.0, 0.0), q_bar, q_path, np.full(n, sign), float("nan"),
            converged=False, degenerate=True, pair=ids, dates=dates,
        )

    a, b, converged, iterations = _fit_ab(x, y, q_bar, opts)
    if PERSISTENCE_CAP - (a + b) < 1e-4:
        converged = False
    params = DccParams(a, b)
    q_path, rho = dcc_recursion(params, q_bar, x, y)
    with np.errstate(all="ignore"):
        ll, clamped = _dcc_ll(a, b, q_bar, x, y)
    return DccFit(
        params, q_bar, q_path, rho, ll, converged, iterations,
        clamp_count=clamped, pair=ids, dates=dates,
    )


def simulate_dcc(
    garch_a: GarchParams,
    garch_b: GarchParams,
    dcc: DccParams,
    q_bar: float | np.ndarray,
    T: int,
    seed: int | np.random.Generator | None = None,
    ids: tuple[str, str] = ("sim_a", "sim_b"),
    start: str = "2000-01-03",
) -> tuple[ReturnSeries, ReturnSeries]:
    """Simulate two GARCH(1,1) return series linked by DCC(1,1) correlation.

    ``q_bar`` is either the off-diagonal correlation or a full 2x2 matrix.
    Each step draws ``u_t ~ N(0, R_t)`` and scales it by ``sqrt(h_{i,t})``.
    """
    if T < 1:
        raise ValueError("T must be at least 1")
    if np.ndim(q_bar) == 0:
        q_bar = np.array([[1.0, float(q_bar)], [float(q_bar), 1.0]])
    q_bar = _check_q_bar(q_bar)
    if q_bar[0, 0] <= 0 or np.linalg.det(q_bar) <= 0:
        raise ValueError("q_bar must be positive definite")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((T, 2))
    a, b = dcc.a, dcc.b
    w = 1.0 - a - b
    q = q_bar.copy()
    h = np.array([garch_a.unconditional_variance, garch_b.unconditional_variance])
    omega = np.array([garch_a.omega, garch_b.omega])
    alpha = np.array([garch_a.alpha, garch_b.alpha])
    beta = np.array([garch_a.beta, garch_b.beta])
    eps = np.empty((T, 2))
    for t in range(T):
        if t > 0:
            u_prev = eps[t - 1] / np.sqrt(h_prev)
            q = w * q_bar + a * np.outer(u_prev, u_prev) + b * q
            h = omega + alpha * eps[t - 1] ** 2 + beta * h_prev
        rho = q[0, 1] / math.sqrt(q[0, 0] * q[1, 1])
        u1 = z[t, 0]
        u2 = rho * z[t, 0] + math.sqrt(max(1.0 - rho * rho, 0.0)) * z[t, 1]
        eps[t] = np.sqrt(h) * (u1, u2)
        h_prev = h
    dates = business_days(T, start)
    return (
        ReturnSeries(ids[0], dates, garch_a.mu + eps[:, 0]),
        ReturnSeries(ids[1], dates, garch_b.mu + eps[:, 1]),
    )
