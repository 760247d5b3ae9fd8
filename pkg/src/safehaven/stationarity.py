"""Augmented Dickey-Fuller and Phillips-Perron unit-root tests.

Both tests are left-tailed: the null of a unit root is rejected when the
statistic falls below the critical value. Critical values come from the
MacKinnon (2010) response surfaces, reproduced in :data:`TAU_RESPONSE_SURFACE`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Mapping, Sequence, Union

import numpy as np

from ._linalg import lstsq
from .errors import TooShort
from .ingest import ReturnSeries

__all__ = [
    "UnitRootResult",
    "adf_test",
    "pp_test",
    "critical_values",
    "schwert_max_lag",
    "newey_west_bandwidth",
    "TAU_RESPONSE_SURFACE",
]

Deterministics = Literal["none", "constant", "constant+trend"]

LEVELS = ("1%", "5%", "10%")
MIN_OBS = 25

# MacKinnon, J.G. (2010) "Critical Values for Cointegration Tests", Queen's
# Economics Department Working Paper 1227, Table 2, single-series (N=1) rows.
# Critical value at sample size T:  b0 + b1/T + b2/T**2 + b3/T**3.
TAU_RESPONSE_SURFACE: Mapping[str, Mapping[str, tuple[float, float, float, float]]] = {
    "none": {
        "1%": (-2.56574, -2.2358, -3.627, 0.0),
        "5%": (-1.94100, -0.2686, -3.365, 31.223),
        "10%": (-1.61682, 0.2656, -2.714, 25.364),
    },
    "constant": {
        "1%": (-3.43035, -6.5393, -16.786, -79.433),
        "5%": (-2.86154, -2.8903, -4.234, -40.040),
        "10%": (-2.56677, -1.5384, -2.809, 0.0),
    },
    "constant+trend": {
        "1%": (-3.95877, -9.0531, -28.428, -134.155),
        "5%": (-3.41049, -4.3904, -9.036, -45.374),
        "10%": (-3.12705, -2.5856, -3.925, -22.380),
    },
}

_ALIASES = {"n": "none", "nc": "none", "c": "constant", "ct": "constant+trend"}


def _spec(spec: str) -> str:
    spec = _ALIASES.get(spec, spec)
    if spec not in TAU_RESPONSE_SURFACE:
        raise ValueError(f"unknown deterministic specification {spec!r}")
    return spec


def critical_values(spec: Deterministics, nobs: int) -> dict[str, float]:
    """Finite-sample Dickey-Fuller tau critical values for ``nobs`` observations."""
    table = TAU_RESPONSE_SURFACE[_spec(spec)]
    return {lvl: float(np.polyval(table[lvl][::-1], 1.0 / nobs)) for lvl in LEVELS}


@dataclass(frozen=True)
class UnitRootResult:
    test: str
    statistic: float
    lags: int
    critical_values: dict[str, float]
    spec: str
    nobs: int
    lag_policy: str = ""
    reject_at: str | None = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "reject_at", _reject_level(self.statistic, self.critical_values))

    @property
    def stars(self) -> str:
        return {"1%": "***", "5%": "**", "10%": "*", None: ""}[self.reject_at]


def _reject_level(stat: float, cvs: Mapping[str, float]) -> str | None:
    for lvl in LEVELS:
        if stat < cvs[lvl]:
            return lvl
    return None


def _deterministics(spec: str, n: int) -> np.ndarray:
    cols = []
    if spec in ("constant", "constant+trend"):
        cols.append(np.ones(n))
    if spec == "constant+trend":
        cols.append(np.arange(1.0, n + 1.0))
    return np.column_stack(cols) if cols else np.empty((n, 0))


def _values(r: ReturnSeries | Sequence[float]) -> np.ndarray:
    y = np.asarray(r.values if isinstance(r, ReturnSeries) else r, dtype=float)
    if y.ndim != 1:
        raise ValueError("expected a 1-d series")
    return y


def schwert_max_lag(n: int) -> int:
    """Schwert's rule ``floor(12 * (n/100)**(1/4))``."""
    return int(math.floor(12.0 * (n / 100.0) ** 0.25))


def newey_west_bandwidth(n: int) -> int:
    """Newey-West rule-of-thumb Bartlett bandwidth ``floor(4 * (n/100)**(2/9))``."""
    return int(math.floor(4.0 * (n / 100.0) ** (2.0 / 9.0)))


def _adf_design(y: np.ndarray, lags: int, start: int, spec: str) -> tuple[np.ndarray, np.ndarray]:
    """Regression of dy_t on (y_{t-1}, dy_{t-1..t-lags}, deterministics), t >= start.

    ``start`` indexes ``dy`` and must be at least ``lags``.
    """
    dy = np.diff(y)
    rows = np.arange(start, len(dy))
    cols = [y[rows]]  # level preceding each difference
    cols.extend(dy[rows - j] for j in range(1, lags + 1))
    X = np.column_stack(cols + [_deterministics(spec, len(rows))])
    return dy[rows], X


LagPolicy = Union[int, tuple[str, int], str]


def adf_test(
    r: ReturnSeries | Sequence[float],
    spec: Deterministics = "constant",
    lag_policy: LagPolicy = "aic",
) -> UnitRootResult:
    """Augmented Dickey-Fuller t-test.

    Parameters
    ----------
    r : ReturnSeries or array_like
        Series to test.
    spec : {"none", "constant", "constant+trend"}
        Deterministic terms in the auxiliary regression.
    lag_policy : int, "aic" or ("aic", k_max)
        A fixed number of lagged differences, or AIC selection over
        ``0..k_max`` on a common sample followed by a refit on the full
        sample available to the chosen lag. ``"aic"`` uses Schwert's bound.
    """
    spec = _spec(spec)
    y = _values(r)
    n = len(y)
    if isinstance(lag_policy, (int, np.integer)):
        k_max, auto = int(lag_policy), False
    else:
        if isinstance(lag_policy, str):
            name, k_max = lag_policy, schwert_max_lag(n)
        else:
            name, k_max = lag_policy
        if name != "aic":
            raise ValueError(f"unknown lag policy {lag_policy!r}")
        auto = True
        n_det = _deterministics(spec, 1).shape[1]
        # Keep enough observations for the largest candidate regression.
        k_max = max(0, min(int(k_max), (n - 1 - MIN_OBS - n_det - 1) // 2))
    if k_max < 0:
        raise ValueError("lag count must be non-negative")
    if n - 1 - k_max < MIN_OBS:
        raise TooShort(f"ADF needs {MIN_OBS} observations after lag truncation, have {n - 1 - k_max}")

    lags = k_max
    if auto:
        best = math.inf
        for k in range(k_max + 1):
            dy, X = _adf_design(y, k, k_max, spec)
            fit = lstsq(dy, X)
            m = len(dy)
            aic = m * math.log(fit.ssr / m) + 2.0 * X.shape[1]
            if aic < best:
                best, lags = aic, k
    dy, X = _adf_design(y, lags, lags, spec)
    fit = lstsq(dy, X)
    m, k = X.shape
    s2 = fit.ssr / (m - k)
    stat = float(fit.beta[0] / math.sqrt(s2 * fit.xtx_inv[0, 0]))
    policy = f"aic(0..{k_max})" if auto else f"fixed({lags})"
    return UnitRootResult("ADF", stat, lags, critical_values(spec, m), spec, m, policy)


def _long_run_variance(u: np.ndarray, bandwidth: int) -> float:
    n = len(u)
    lrv = float(u @ u) / n
    for j in range(1, bandwidth + 1):
        w = 1.0 - j / (bandwidth + 1.0)
        lrv += 2.0 * w * float(u[j:] @ u[:-j]) / n
    return lrv


def pp_test(
    r: ReturnSeries | Sequence[float],
    spec: Deterministics = "constant",
    bandwidth_policy: int | str = "newey_west_auto",
) -> UnitRootResult:
    """Phillips-Perron Z_t test with a Bartlett-kernel long-run variance.

    ``bandwidth_policy`` is a fixed bandwidth or ``"newey_west_auto"``.
    """
    spec = _spec(spec)
    y = _values(r)
    n = len(y) - 1
    if n < MIN_OBS:
        raise TooShort(f"PP needs {MIN_OBS} observations, have {n}")
    if isinstance(bandwidth_policy, (int, np.integer)):
        m = int(bandwidth_policy)
        policy = f"fixed({m})"
    elif bandwidth_policy == "newey_west_auto":
        m = newey_west_bandwidth(n)
        policy = "newey_west_auto"
    else:
        raise ValueError(f"unknown bandwidth policy {bandwidth_policy!r}")
    if not 0 <= m < n:
        raise ValueError(f"bandwidth {m} out of range for {n} observations")

    X = np.column_stack([y[:-1], _deterministics(spec, n)])
    fit = lstsq(y[1:], X)
    u = fit.resid
    k = X.shape[1]
    gamma0 = float(u @ u) / n
    s2 = float(u @ u) / (n - k)
    se = math.sqrt(s2 * fit.xtx_inv[0, 0])
    t_rho = (fit.beta[0] - 1.0) / se
    lam2 = _long_run_variance(u, m)
    lam = math.sqrt(lam2)
    stat = math.sqrt(gamma0 / lam2) * t_rho - 0.5 * (lam2 - gamma0) / lam * n * se / math.sqrt(s2)
    return UnitRootResult("PP", float(stat), m, critical_values(spec, n), spec, n, policy)
