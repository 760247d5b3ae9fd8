"""Univariate GARCH(1,1) with a constant mean: likelihood, QML fitting, simulation.

The variance recursion is

    h_t = omega + alpha * eps_{t-1}**2 + beta * h_{t-1},   eps_t = r_t - mu

with Gaussian innovations. When fitting, the pre-sample values ``eps_0**2``
and ``h_0`` are both set to the sample variance of the series, so that
``h_1 = omega + (alpha + beta) * var(r)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize, signal

from .errors import DegenerateSeries, NoConvergence, NonFinite, TooShort
from .ingest import ReturnSeries

__all__ = [
    "GarchParams",
    "GarchFit",
    "GarchOptions",
    "garch_variance",
    "garch_loglik",
    "fit_garch11",
    "simulate_garch11",
    "business_days",
]

LOG_2PI = math.log(2.0 * math.pi)
# Upper edge of the (alpha, beta) simplex searched by the optimizer.
PERSISTENCE_CAP = 0.999
# Fits closer than this to the cap are reported as not converged.
BOUNDARY_TOL = 1e-4
MIN_FIT_OBS = 50


@dataclass(frozen=True)
class GarchParams:
    mu: float
    omega: float
    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.mu, self.omega, self.alpha, self.beta)):
            raise ValueError(f"non-finite GARCH parameters: {self}")
        if self.omega <= 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if self.alpha < 0 or self.beta < 0:
            raise ValueError(f"alpha and beta must be non-negative, got {self.alpha}, {self.beta}")
        if self.alpha + self.beta >= 1:
            raise ValueError(f"alpha + beta must be < 1, got {self.alpha + self.beta}")

    @property
    def persistence(self) -> float:
        return self.alpha + self.beta

    @property
    def unconditional_variance(self) -> float:
        return self.omega / (1.0 - self.alpha - self.beta)

    def as_array(self) -> np.ndarray:
        return np.array([self.mu, self.omega, self.alpha, self.beta])


@dataclass(frozen=True)
class GarchFit:
    params: GarchParams
    h: np.ndarray = field(repr=False)
    std_residuals: np.ndarray = field(repr=False)
    loglik: float
    converged: bool
    iterations: int
    asset_id: str = ""
    dates: np.ndarray | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.h)


@dataclass(frozen=True)
class GarchOptions:
    tolerance: float = 1e-8
    max_iter: int = 4000
    restarts: int = 3
    seed: int = 0


def _values(r: ReturnSeries | Sequence[float]) -> np.ndarray:
    return np.asarray(r.values if isinstance(r, ReturnSeries) else r, dtype=float)


def _variance_path(mu: float, omega: float, alpha: float, beta: float, r: np.ndarray, backcast: float):
    eps = r - mu
    drive = np.empty_like(r)
    drive[0] = omega + alpha * backcast
    drive[1:] = omega + alpha * eps[:-1] ** 2
    h, _ = signal.lfilter([1.0], [1.0, -beta], drive, zi=[beta * backcast])
    return h, eps


def _loglik(mu, omega, alpha, beta, r, backcast) -> float:
    h, eps = _variance_path(mu, omega, alpha, beta, r, backcast)
    return -0.5 * float(len(r) * LOG_2PI + np.sum(np.log(h)) + np.sum(eps**2 / h))


def garch_variance(params: GarchParams, r: ReturnSeries | Sequence[float]) -> np.ndarray:
    """Conditional-variance path ``h_1..h_T`` for ``r`` under ``params``."""
    y = _values(r)
    h, _ = _variance_path(params.mu, params.omega, params.alpha, params.beta, y, float(np.var(y)))
    return h


def garch_loglik(params: GarchParams, r: ReturnSeries | Sequence[float]) -> float:
    """Gaussian log-likelihood ``sum -0.5 * (ln 2pi + ln h_t + eps_t**2 / h_t)``."""
    y = _values(r)
    if len(y) < 2:
        raise TooShort("log-likelihood needs at least 2 observations")
    with np.errstate(all="ignore"):
        ll = _loglik(params.mu, params.omega, params.alpha, params.beta, y, float(np.var(y)))
    if not math.isfinite(ll):
        raise NonFinite(f"log-likelihood is not finite at {params}")
    return ll


# -- reparameterisation ------------------------------------------------------

def simplex_from_free(x1: float, x2: float, cap: float = PERSISTENCE_CAP) -> tuple[float, float]:
    """Map R^2 onto the open triangle {a, b > 0, a + b < cap} with a softmax."""
    m = max(0.0, x1, x2)
    e0, e1, e2 = math.exp(-m), math.exp(x1 - m), math.exp(x2 - m)
    s = e0 + e1 + e2
    return cap * e1 / s, cap * e2 / s


def free_from_simplex(a: float, b: float, cap: float = PERSISTENCE_CAP) -> tuple[float, float]:
    a, b = max(a / cap, 1e-10), max(b / cap, 1e-10)
    slack = max(1.0 - a - b, 1e-10)
    return math.log(a / slack), math.log(b / slack)


def _unpack(z: np.ndarray) -> tuple[float, float, float, float]:
    alpha, beta = simplex_from_free(z[2], z[3])
    return float(z[0]), math.exp(z[1]), alpha, beta


def _pack(mu: float, omega: float, alpha: float, beta: float) -> np.ndarray:
    return np.array([mu, math.log(omega), *free_from_simplex(alpha, beta)])


_START_GRID = ((0.05, 0.90), (0.10, 0.85), (0.10, 0.70), (0.05, 0.50), (0.20, 0.60), (0.02, 0.10))


@dataclass
class _Optimum:
    x: np.ndarray
    fun: float
    converged: bool


def _multistart(objective, starts, opts: GarchOptions) -> tuple[_Optimum, int]:
    """Coarse Nelder-Mead from every start, then re-polish the best one.

    Polishing repeats until the relative objective gain between two
    consecutive runs drops below ``opts.tolerance`` (at most 10 rounds).
    Shared by the GARCH and DCC stages.
    """
    coarse = {"xatol": 1e-5, "fatol": 1e-9, "maxiter": opts.max_iter, "maxfev": 2 * opts.max_iter}
    fine = {"xatol": 1e-8, "fatol": 1e-12, "maxiter": opts.max_iter, "maxfev": 2 * opts.max_iter}
    iterations, best = 0, None
    for z0 in starts:
        res = optimize.minimize(objective, z0, method="Nelder-Mead", options=coarse)
        iterations += int(res.nit)
        if math.isfinite(res.fun) and (best is None or res.fun < best.fun):
            best = res
    if best is None:
        raise NoConvergence("no start produced a finite log-likelihood")
    x, fun, converged = best.x, float(best.fun), False
    for _ in range(10):
        res = optimize.minimize(objective, x, method="Nelder-Mead", options=fine)
        iterations += int(res.nit)
        gain = fun - float(res.fun)
        if res.fun < fun:
            x, fun = res.x, float(res.fun)
        if gain <= opts.tolerance * max(abs(fun), 1e-300):
            converged = True
            break
    return _Optimum(x, fun, converged), iterations


def fit_garch11(
    r: ReturnSeries | Sequence[float],
    opts: GarchOptions | None = None,
) -> GarchFit:
    """Quasi-maximum-likelihood GARCH(1,1) fit.

    Nelder-Mead runs on an unconstrained reparameterisation (``log omega``
    and a softmax onto the ``alpha + beta < 0.999`` simplex), from the best
    point of a small start grid plus ``opts.restarts`` jittered copies of
    it. The best run is then re-polished until the relative log-likelihood
    gain between consecutive polishes is below ``opts.tolerance``; that
    criterion, and staying clear of the persistence cap, define
    ``converged``.

    Raises
    ------
    TooShort
        Fewer than 50 observations.
    DegenerateSeries
        The series has zero sample variance.
    NoConvergence
        No run produced a finite likelihood.
    """
    opts = opts or GarchOptions()
    y = _values(r)
    n = len(y)
    if n < MIN_FIT_OBS:
        raise TooShort(f"GARCH fit needs at least {MIN_FIT_OBS} observations, have {n}")
    if not np.all(np.isfinite(y)):
        raise DegenerateSeries("series contains non-finite values")
    var = float(np.var(y))
    if var <= 1e-12 * max(1.0, float(np.mean(y**2))):
        raise DegenerateSeries("series has zero sample variance")
    mean = float(np.mean(y))
    rng = np.random.default_rng(opts.seed)

    def objective(z: np.ndarray) -> float:
        mu, omega, alpha, beta = _unpack(z)
        with np.errstate(all="ignore"):
            ll = _loglik(mu, omega, alpha, beta, y, var)
        return -ll / n if math.isfinite(ll) else math.inf

    grid = [_pack(mean, var * (1.0 - a - b), a, b) for a, b in _START_GRID]
    start = min(grid, key=objective)
    starts = [start] + [
        start + rng.normal(scale=[0.2 * math.sqrt(var), 0.5, 0.5, 0.5]) for _ in range(max(opts.restarts, 0))
    ]

    best, iterations = _multistart(objective, starts, opts)
    mu, omega, alpha, beta = _unpack(best.x)
    converged = best.converged
    params = GarchParams(mu, omega, alpha, beta)
    if PERSISTENCE_CAP - (alpha + beta) < BOUNDARY_TOL:
        converged = False
    h, eps = _variance_path(mu, omega, alpha, beta, y, var)
    ll = -best.fun * n
    return GarchFit(
        params=params,
        h=h,
        std_residuals=eps / np.sqrt(h),
        loglik=float(ll),
        converged=converged,
        iterations=iterations,
        asset_id=r.asset_id if isinstance(r, ReturnSeries) else "",
        dates=r.dates if isinstance(r, ReturnSeries) else None,
    )


def business_days(n: int, start: str = "2000-01-03") -> np.ndarray:
    """``n`` consecutive weekdays beginning at ``start`` (used to date simulations)."""
    return np.busday_offset(np.datetime64(start, "D"), np.arange(n), roll="forward")


def simulate_garch11(
    params: GarchParams,
    T: int,
    seed: int | np.random.Generator | None = None,
    asset_id: str = "sim",
    start: str = "2000-01-03",
) -> ReturnSeries:
    """Draw ``T`` returns ``mu + sqrt(h_t) u_t`` with ``h_1`` the unconditional variance."""
    if T < 1:
        raise ValueError("T must be at least 1")
    rng = np.random.default_rng(seed)
    u = rng.standard_normal(T)
    h = np.empty(T)
    eps = np.empty(T)
    h[0] = params.unconditional_variance
    eps[0] = math.sqrt(h[0]) * u[0]
    for t in range(1, T):
        h[t] = params.omega + params.alpha * eps[t - 1] ** 2 + params.beta * h[t - 1]
        eps[t] = math.sqrt(h[t]) * u[t]
    return ReturnSeries(asset_id, business_days(T, start), params.mu + eps)
