"""Least-squares kernel shared by the unit-root, diagnostic and regression code."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularDesign

# Reciprocal condition number below which a design is declared rank deficient.
RCOND = 1e-10


@dataclass(frozen=True)
class LeastSquares:
    beta: np.ndarray
    resid: np.ndarray
    xtx_inv: np.ndarray

    @property
    def ssr(self) -> float:
        return float(self.resid @ self.resid)


def lstsq(y: np.ndarray, X: np.ndarray) -> LeastSquares:
    """OLS through the thin SVD; raises :class:`SingularDesign` on rank deficiency."""
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValueError(f"design of shape {X.shape} does not match {y.shape[0]} observations")
    if X.shape[0] < X.shape[1]:
        raise SingularDesign(f"{X.shape[0]} observations for {X.shape[1]} regressors")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise SingularDesign("design or response contains non-finite values")
    u, s, vt = np.linalg.svd(X, full_matrices=False)
    if s[0] == 0.0 or s[-1] / s[0] < RCOND:
        raise SingularDesign(
            f"design matrix is rank deficient (condition {s[0] / max(s[-1], 1e-300):.3g})"
        )
    beta = vt.T @ ((u.T @ y) / s)
    xtx_inv = (vt.T / s**2) @ vt
    return LeastSquares(beta, y - X @ beta, xtx_inv)


def r_squared(y: np.ndarray, resid: np.ndarray) -> float:
    """Centred R-squared; zero when ``y`` has no variation."""
    yc = y - y.mean()
    tss = float(yc @ yc)
    if tss == 0.0:
        return 0.0
    return 1.0 - float(resid @ resid) / tss
