"""Soft-margin kernel SVM dual solved by SMO with second-order working-set selection."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

TAU = 1e-12


def rbf_kernel(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    """``exp(-gamma * |a_i - b_j|^2)`` for all row pairs."""
    sq = (a * a).sum(axis=1)[:, None] + (b * b).sum(axis=1)[None, :] - 2.0 * (a @ b.T)
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-gamma * sq)


def _polish(K: np.ndarray, y: np.ndarray, alpha: np.ndarray, C: float, tol: float):
    """Exact optimum for the active set SMO stopped at, or ``None``.

    Bounded multipliers stay where they are; the free ones and the bias
    solve the KKT equalities ``(Q a)_i + y_i b = 1`` together with
    ``y'a = 0``.  The result is kept only if it stays strictly inside the
    box and the bounded points still satisfy their KKT conditions within
    ``tol``.  This makes the solution a smooth function of ``K`` instead of
    depending on exactly where the iteration crossed the tolerance.
    """
    free = np.flatnonzero((alpha > 0) & (alpha < C))
    if len(free) == 0:
        return None
    at_c = np.flatnonzero(alpha >= C)
    yf = y[free]
    k = len(free)
    system = np.zeros((k + 1, k + 1))
    system[:k, :k] = np.outer(yf, yf) * K[np.ix_(free, free)]
    system[:k, k] = yf
    system[k, :k] = yf
    rhs = np.ones(k + 1)
    rhs[:k] -= yf * (K[np.ix_(free, at_c)] @ (C * y[at_c]))
    rhs[k] = -C * y[at_c].sum()
    try:
        sol = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(sol)):
        return None
    a_free, bias = sol[:k], float(sol[k])
    if np.any(a_free <= 0) or np.any(a_free >= C):
        return None
    new = alpha.copy()
    new[free] = a_free
    margin = y * (K @ (new * y) + bias)
    bounded_zero = new <= 0
    bounded_c = new >= C
    if np.any(margin[bounded_zero] < 1 - tol) or np.any(margin[bounded_c] > 1 + tol):
        return None
    return new, bias


@dataclass
class SmoResult:
    alpha: np.ndarray
    bias: float
    iterations: int
    converged: bool


def solve_dual(K: np.ndarray, y: np.ndarray, C: float, tol: float = 1e-3,
               max_iter: int | None = None) -> SmoResult:
    """Minimise ``1/2 a'Qa - sum(a)`` s.t. ``0 <= a <= C``, ``y'a = 0``.

    ``Q = (y y') * K`` with ``y`` in {-1, +1}.  Each step optimises the
    maximal-violating index ``i`` jointly with the ``j`` that gives the
    largest second-order decrease; stops when the KKT gap ``m - M`` drops
    below ``tol``, then refines the free multipliers exactly (see
    :func:`_polish`).  Ties break on the lowest index, so the solution is a
    deterministic function of the inputs.
    """
    n = len(y)
    y = y.astype(float)
    if max_iter is None:
        max_iter = max(100_000, 100 * n)
    alpha = np.zeros(n)
    grad = -np.ones(n)
    diag = np.diag(K).copy()
    pos = y > 0
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        at_upper = alpha >= C
        at_lower = alpha <= 0
        up = np.where(pos, ~at_upper, ~at_lower)
        low = np.where(pos, ~at_lower, ~at_upper)
        score = -y * grad
        up_scores = np.where(up, score, -np.inf)
        i = int(np.argmax(up_scores))
        m_val = up_scores[i]
        low_scores = np.where(low, score, np.inf)
        if m_val - low_scores.min() < tol:
            converged = True
            break
        b = m_val - score
        cand = low & (b > 0)
        a = diag[i] + diag - 2.0 * K[i]
        a = np.where(a > 0, a, TAU)
        gain = np.where(cand, -(b * b) / a, np.inf)
        j = int(np.argmin(gain))
        step = b[j] / a[j]
        # box limits along the direction that keeps y'alpha fixed
        lim_i = C - alpha[i] if pos[i] else alpha[i]
        lim_j = alpha[j] if pos[j] else C - alpha[j]
        if step >= lim_i:
            step = lim_i
        if step >= lim_j:
            step = lim_j
        new_i = alpha[i] + y[i] * step
        new_j = alpha[j] - y[j] * step
        if step == lim_i:
            new_i = C if pos[i] else 0.0
        if step == lim_j:
            new_j = 0.0 if pos[j] else C
        d_i = new_i - alpha[i]
        d_j = new_j - alpha[j]
        alpha[i] = new_i
        alpha[j] = new_j
        grad += y * (y[i] * d_i * K[:, i] + y[j] * d_j * K[:, j])
    if not converged:
        logger.warning("SMO stopped after %d iterations without reaching tol %g", max_iter, tol)
    else:
        polished = _polish(K, y, alpha, C, tol)
        if polished is not None:
            return SmoResult(polished[0], polished[1], it, converged)

    score = -y * grad
    free = (alpha > 0) & (alpha < C)
    if free.any():
        bias = float(score[free].mean())
    else:
        up = np.where(pos, alpha < C, alpha > 0)
        low = np.where(pos, alpha > 0, alpha < C)
        hi = score[up].max() if up.any() else 0.0
        lo = score[low].min() if low.any() else 0.0
        bias = float((hi + lo) / 2.0)
    return SmoResult(alpha, bias, it, converged)
