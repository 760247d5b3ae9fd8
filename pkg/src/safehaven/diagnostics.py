"""Lagrange-multiplier tests for volatility clustering and heteroskedasticity."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats

from ._linalg import lstsq, r_squared
from .errors import InvalidDesign, SingularDesign, TooShort

__all__ = ["LmTestResult", "arch_lm_test", "breusch_pagan_test", "chi2_pvalue"]


@dataclass(frozen=True)
class LmTestResult:
    test: str
    statistic: float
    df: int
    p_value: float
    lag_order: int
    nobs: int

    @property
    def stars(self) -> str:
        p = self.p_value
        return "***" if p < 0.01 else "**" if p < 0.05 else "*" if p < 0.10 else ""


def chi2_pvalue(statistic: float, df: int) -> float:
    """Upper-tail chi-square probability."""
    return float(stats.chi2.sf(statistic, df))


def arch_lm_test(residuals: Sequence[float], q: int = 5, demean: bool = True) -> LmTestResult:
    """Engle's ARCH-LM test: T * R^2 from regressing e_t^2 on q of its own lags.

    Residuals are demeaned first unless ``demean=False``. ``T`` is the number
    of observations in the auxiliary regression (n - q).
    """
    e = np.asarray(residuals, dtype=float)
    if q < 1:
        raise ValueError("lag order must be at least 1")
    if len(e) <= q + 10:
        raise TooShort(f"ARCH-LM with q={q} needs more than {q + 10} observations, have {len(e)}")
    if demean:
        e = e - e.mean()
    e2 = e**2
    n = len(e2)
    y = e2[q:]
    X = np.column_stack([np.ones(n - q)] + [e2[q - j : n - j] for j in range(1, q + 1)])
    fit = lstsq(y, X)
    stat = max(0.0, (n - q) * r_squared(y, fit.resid))
    return LmTestResult("ARCH-LM", stat, q, chi2_pvalue(stat, q), q, n - q)


def breusch_pagan_test(y: Sequence[float], X: np.ndarray) -> LmTestResult:
    """Breusch-Pagan-Godfrey test, ``T * R^2`` of squared OLS residuals on ``X``.

    ``X`` must contain a constant column; ``df`` is ``columns(X) - 1``.
    """
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] != len(y):
        raise SingularDesign(f"X has {X.shape[0]} rows for {len(y)} observations")
    df = X.shape[1] - 1
    if df < 1:
        raise InvalidDesign("auxiliary regression needs at least one regressor besides the constant")
    e = lstsq(y, X).resid
    e2 = e**2
    aux = lstsq(e2, X)
    stat = max(0.0, len(y) * r_squared(e2, aux.resid))
    return LmTestResult("Breusch-Pagan-Godfrey", stat, df, chi2_pvalue(stat, df), 0, len(y))
