"""Sigmoid calibration of decision values (Platt scaling).

Newton iteration with backtracking line search on the regularised targets
``(N+ + 1)/(N+ + 2)`` and ``1/(N- + 2)``, fitted in the parameterisation
``p = 1 / (1 + exp(a f + b))`` and returned as ``sigmoid(A f + B)`` with
``A = -a``, ``B = -b``.
"""

from __future__ import annotations

import numpy as np


def _objective(f, t, a, b):
    z = f * a + b
    return float(np.sum(t * z + np.logaddexp(0.0, -z)))


def _fit_intercept(f, t, a, b, max_iter=100, eps=1e-12) -> float:
    """Newton on ``b`` alone with the slope held at ``a``."""
    fval = _objective(f, t, a, b)
    for _ in range(max_iter):
        z = f * a + b
        p = sigmoid(-z)
        g = float(np.sum(t - p))
        if abs(g) < eps:
            break
        h = 1e-12 + float(np.sum(p * (1.0 - p)))
        step = 1.0
        while step >= 1e-10:
            nb = b - step * g / h
            nf = _objective(f, t, a, nb)
            if nf < fval:
                b, fval = nb, nf
                break
            step /= 2.0
        else:
            break
        if step * abs(g / h) <= 1e-14 * (1.0 + abs(b)):
            break
    return b


def fit_platt(decision: np.ndarray, labels: np.ndarray, max_iter: int = 100,
              min_step: float = 1e-10, sigma: float = 1e-12,
              eps: float = 1e-12) -> tuple[float, float]:
    """Return ``(A, B)`` with ``P(abuse | f) = 1 / (1 + exp(-(A f + B)))``.

    Newton steps continue until the gradient or the step is negligible, so
    the fit is converged to near machine precision rather than to a loose
    gradient tolerance.

    ``A`` is kept non-negative so the probability never decreases with the
    decision value.  If the unconstrained fit points the other way, the
    slope is mirrored to the positive orientation and the intercept refitted
    with that slope held fixed.
    """
    f = np.asarray(decision, dtype=float)
    y = np.asarray(labels, dtype=bool)
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    hi = (n_pos + 1.0) / (n_pos + 2.0)
    lo = 1.0 / (n_neg + 2.0)
    t = np.where(y, hi, lo)

    a = 0.0
    b = float(np.log((n_neg + 1.0) / (n_pos + 1.0)))
    fval = _objective(f, t, a, b)
    for _ in range(max_iter):
        z = f * a + b
        p = sigmoid(-z)
        q = 1.0 - p
        d2 = p * q
        h11 = sigma + float(np.sum(f * f * d2))
        h22 = sigma + float(np.sum(d2))
        h21 = float(np.sum(f * d2))
        d1 = t - p
        g1 = float(np.sum(f * d1))
        g2 = float(np.sum(d1))
        if abs(g1) < eps and abs(g2) < eps:
            break
        det = h11 * h22 - h21 * h21
        da = -(h22 * g1 - h21 * g2) / det
        db = -(-h21 * g1 + h11 * g2) / det
        gd = g1 * da + g2 * db
        step = 1.0
        while step >= min_step:
            na, nb = a + step * da, b + step * db
            nf = _objective(f, t, na, nb)
            if nf < fval + 1e-4 * step * gd:
                a, b, fval = na, nb, nf
                break
            step /= 2.0
        else:
            break
        if step * max(abs(da), abs(db)) <= 1e-14 * (1.0 + abs(a) + abs(b)):
            break
    if a > 0:
        a = -a
        b = _fit_intercept(f, t, a, b)
    return -a, -b


def sigmoid(z):
    z = np.asarray(z, dtype=float)
    return np.where(z >= 0, 1.0 / (1.0 + np.exp(-np.abs(z))),
                    np.exp(-np.abs(z)) / (1.0 + np.exp(-np.abs(z))))
