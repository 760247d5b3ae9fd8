"""Slow, loop-based reference implementations used as test oracles."""
import math

import numpy as np


def garch_loglik_naive(mu, omega, alpha, beta, r):
    """Direct summation with h_1 = omega + (alpha + beta) * sample variance."""
    r = [float(v) for v in r]
    n = len(r)
    m = sum(r) / n
    s2 = sum((v - m) ** 2 for v in r) / n
    total = 0.0
    h_prev, e2_prev = s2, s2
    for t in range(n):
        h = omega + alpha * e2_prev + beta * h_prev
        e = r[t] - mu
        total += -0.5 * (math.log(2 * math.pi) + math.log(h) + e * e / h)
        h_prev, e2_prev = h, e * e
    return total


def dcc_path_naive(a, b, q_bar, x, y):
    """Q_t and R_t by explicit 2x2 matrix arithmetic, Q_1 = q_bar."""
    q_bar = np.asarray(q_bar, dtype=float)
    Q = q_bar.copy()
    qs, rs = [], []
    for t in range(len(x)):
        if t > 0:
            phi = np.array([[x[t - 1]], [y[t - 1]]])
            Q = (1 - a - b) * q_bar + a * (phi @ phi.T) + b * Q
        d = np.diag(1.0 / np.sqrt(np.diag(Q)))
        qs.append(Q.copy())
        rs.append(d @ Q @ d)
    return qs, rs


def dcc_loglik_naive(a, b, q_bar, x, y):
    total = 0.0
    _, rs = dcc_path_naive(a, b, q_bar, x, y)
    for t, R in enumerate(rs):
        phi = np.array([x[t], y[t]])
        total += -0.5 * (math.log(np.linalg.det(R)) + phi @ np.linalg.inv(R) @ phi - phi @ phi)
    return total
