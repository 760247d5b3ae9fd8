"""Crisis-window safe-haven regressions with Prais-Winsten AR(1) correction.

For an asset ``y`` and an equity index ``x`` the regression is

    y_t = const + b_own y_{t-1} + b_index x_t + b_crisis D_t x_t + b_lag x_{t-1} + e_t

where ``D_t`` flags the crisis window. A negative, significant ``b_crisis``
marks the asset as a safe haven for that index.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Literal, Sequence

import numpy as np
from scipy import stats

from ._linalg import lstsq
from .errors import NoConvergence, WindowOutOfRange, WindowTruncated
from .ingest import ReturnSeries

__all__ = [
    "CovidDummy",
    "RegressionResult",
    "build_covid_dummy",
    "ols_fit",
    "prais_winsten_fit",
    "safe_haven_regression",
    "safe_haven_design",
    "significance_stars",
    "SAFE_HAVEN_TERMS",
    "ANNOUNCEMENT_DATE",
    "CRISIS_HORIZON",
]

ANNOUNCEMENT_DATE = "2020-03-11"
CRISIS_HORIZON = 14
SAFE_HAVEN_TERMS = ("const", "own_lag", "index", "crisis_index", "index_lag")
# |rho| is kept inside this bound so the first-row weight sqrt(1 - rho^2) stays positive.
RHO_BOUND = 0.999


def significance_stars(p: float) -> str:
    """``***`` below 1%, ``**`` below 5%, ``*`` below 10%."""
    if not math.isfinite(p):
        return ""
    return "***" if p < 0.01 else "**" if p < 0.05 else "*" if p < 0.10 else ""


@dataclass(frozen=True)
class CovidDummy:
    announcement_date: np.datetime64
    horizon: int
    dates: np.ndarray = field(repr=False)
    indicator: np.ndarray = field(repr=False)
    day_mode: str = "trading"

    def __call__(self, date) -> int:
        i = np.searchsorted(self.dates, np.datetime64(date, "D"))
        if i < len(self.dates) and self.dates[i] == np.datetime64(date, "D"):
            return int(self.indicator[i])
        return 0

    @property
    def window(self) -> tuple[np.datetime64, np.datetime64]:
        on = self.dates[self.indicator == 1]
        return on[0], on[-1]


def build_covid_dummy(
    dates: Sequence,
    announcement_date: str = ANNOUNCEMENT_DATE,
    horizon: int = CRISIS_HORIZON,
    day_mode: Literal["trading", "calendar"] = "trading",
) -> CovidDummy:
    """Crisis indicator over an aligned date list.

    In ``"trading"`` mode the window is the first observation on or after
    the announcement plus the next ``horizon`` observations. In
    ``"calendar"`` mode it is every observation dated within ``horizon``
    calendar days after the announcement (inclusive).

    A window cut short by the end of the sample is kept and a
    :class:`WindowTruncated` warning is issued. :class:`WindowOutOfRange`
    is raised when no observation falls on or after the announcement.
    """
    dates = np.asarray(dates, dtype="datetime64[D]")
    ann = np.datetime64(announcement_date, "D")
    if horizon < 0:
        raise ValueError("horizon must be non-negative")
    start = int(np.searchsorted(dates, ann))
    if start >= len(dates):
        raise WindowOutOfRange(f"sample ends before the announcement date {ann}")
    indicator = np.zeros(len(dates), dtype=np.int8)
    if day_mode == "trading":
        stop = start + horizon + 1
        if stop > len(dates):
            warnings.warn(
                f"crisis window truncated to {len(dates) - start} of {horizon + 1} observations",
                WindowTruncated,
                stacklevel=2,
            )
        indicator[start:stop] = 1
    elif day_mode == "calendar":
        end = ann + np.timedelta64(horizon, "D")
        indicator[(dates >= ann) & (dates <= end)] = 1
        if dates[-1] < end:
            warnings.warn(f"crisis window truncated: sample ends {dates[-1]}", WindowTruncated, stacklevel=2)
    else:
        raise ValueError(f"day_mode must be 'trading' or 'calendar', got {day_mode!r}")
    indicator.setflags(write=False)
    return CovidDummy(ann, horizon, dates, indicator, day_mode)


@dataclass(frozen=True)
class RegressionResult:
    names: tuple[str, ...]
    coefficients: dict[str, float]
    std_errors: dict[str, float]
    t_stats: dict[str, float]
    p_values: dict[str, float]
    rho_ar1: float
    n_obs: int
    iterations: int
    cov_type: str
    residuals: np.ndarray = field(repr=False)
    converged: bool = True
    pair: tuple[str, str] | None = None

    def stars(self, name: str) -> str:
        return significance_stars(self.p_values[name])

    @property
    def params(self) -> np.ndarray:
        return np.array([self.coefficients[k] for k in self.names])


def _names(k: int, names: Sequence[str] | None) -> tuple[str, ...]:
    if names is None:
        return tuple(f"x{i}" for i in range(k))
    if len(names) != k:
        raise ValueError(f"{len(names)} names for {k} columns")
    return tuple(names)


def _design(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return X[:, None] if X.ndim == 1 else X


def _covariance(X: np.ndarray, resid: np.ndarray, xtx_inv: np.ndarray, cov_type: str) -> np.ndarray:
    n, k = X.shape
    if cov_type == "HC1":
        meat = (X * resid[:, None] ** 2).T @ X
        return n / (n - k) * xtx_inv @ meat @ xtx_inv
    if cov_type == "classical":
        return float(resid @ resid) / (n - k) * xtx_inv
    raise ValueError(f"cov_type must be 'HC1' or 'classical', got {cov_type!r}")


def _result(names, beta, cov, resid, rho, iterations, cov_type, converged=True) -> RegressionResult:
    se = np.sqrt(np.maximum(np.diag(cov), 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        t = beta / se
    p = 2.0 * stats.norm.sf(np.abs(t))
    as_map = lambda v: {k: float(x) for k, x in zip(names, v)}  # noqa: E731
    return RegressionResult(
        names, as_map(beta), as_map(se), as_map(t), as_map(p),
        float(rho), len(resid), iterations, cov_type, resid, converged,
    )


def ols_fit(
    y: Sequence[float],
    X,
    names: Sequence[str] | None = None,
    cov_type: Literal["HC1", "classical"] = "HC1",
) -> RegressionResult:
    """Least squares with HC1 (default) or classical standard errors."""
    y = np.asarray(y, dtype=float)
    X = _design(X)
    names = _names(X.shape[1], names)
    fit = lstsq(y, X)
    cov = _covariance(X, fit.resid, fit.xtx_inv, cov_type)
    return _result(names, fit.beta, cov, fit.resid, 0.0, 0, cov_type)


def _quasi_difference(a: np.ndarray, rho: float) -> np.ndarray:
    out = np.empty_like(a)
    out[0] = math.sqrt(1.0 - rho * rho) * a[0]
    out[1:] = a[1:] - rho * a[:-1]
    return out


def _ar1_coefficient(e: np.ndarray) -> float:
    denom = float(e[:-1] @ e[:-1])
    if denom == 0.0:
        return 0.0
    return float(np.clip((e[1:] @ e[:-1]) / denom, -RHO_BOUND, RHO_BOUND))


def prais_winsten_fit(
    y: Sequence[float],
    X,
    names: Sequence[str] | None = None,
    max_iter: int = 1000,
    rho_tol: float = 1e-8,
    cov_type: Literal["HC1", "classical"] = "HC1",
) -> RegressionResult:
    """Iterated Prais-Winsten FGLS.

    Starting from OLS, the AR(1) coefficient of the untransformed residuals
    is re-estimated and every row quasi-differenced (the first scaled by
    ``sqrt(1 - rho^2)``) until ``rho`` moves less than ``rho_tol``.
    Standard errors come from the transformed regression. With
    ``max_iter=0`` no update happens and the result is plain OLS.

    Raises
    ------
    SingularDesign
        ``X`` is rank deficient.
    NoConvergence
        ``rho`` still moves by ``rho_tol`` or more after ``max_iter`` updates.
    """
    y = np.asarray(y, dtype=float)
    X = _design(X)
    names = _names(X.shape[1], names)
    if max_iter < 0:
        raise ValueError("max_iter must be non-negative")

    rho = 0.0
    fit = lstsq(y, X)
    Xs, ys = X, y
    iterations = 0
    converged = max_iter == 0
    for iterations in range(1, max_iter + 1):
        rho_new = _ar1_coefficient(y - X @ fit.beta)
        Xs, ys = _quasi_difference(X, rho_new), _quasi_difference(y, rho_new)
        fit = lstsq(ys, Xs)
        step, rho = abs(rho_new - rho), rho_new
        if step < rho_tol:
            converged = True
            break
    if not converged:
        raise NoConvergence(f"Prais-Winsten rho did not settle after {max_iter} iterations (last {rho:.6f})")
    cov = _covariance(Xs, fit.resid, fit.xtx_inv, cov_type)
    return _result(names, fit.beta, cov, fit.resid, rho, iterations, cov_type, converged)


def safe_haven_design(asset: ReturnSeries, index: ReturnSeries, dummy: CovidDummy):
    """Response and the 5-column design; the first observation is lost to the lags."""
    if len(asset) != len(index) or not np.array_equal(asset.dates, index.dates):
        raise ValueError("asset and index must be aligned on identical dates")
    if not np.array_equal(dummy.dates, asset.dates):
        raise ValueError("crisis dummy must be built on the aligned dates")
    y, x, d = asset.values, index.values, dummy.indicator.astype(float)
    X = np.column_stack([np.ones(len(y) - 1), y[:-1], x[1:], d[1:] * x[1:], x[:-1]])
    return y[1:], X


def safe_haven_regression(
    asset: ReturnSeries,
    index: ReturnSeries,
    dummy: CovidDummy,
    max_iter: int = 1000,
    rho_tol: float = 1e-8,
) -> RegressionResult:
    """Prais-Winsten fit of the asset on the index with the crisis interaction.

    Coefficients are named ``const``, ``own_lag``, ``index``,
    ``crisis_index`` (the safe-haven term) and ``index_lag``.
    """
    y, X = safe_haven_design(asset, index, dummy)
    res = prais_winsten_fit(y, X, SAFE_HAVEN_TERMS, max_iter=max_iter, rho_tol=rho_tol)
    return replace(res, pair=(asset.asset_id, index.asset_id))
