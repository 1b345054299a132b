"""Spectral centralities computed on the weighted adjacency matrix."""

from __future__ import annotations

import logging

import numpy as np

from .graph import ConversationGraph

logger = logging.getLogger(__name__)

MAX_ITER = 10_000
EIG_TOL = 1e-10
PAGERANK_TOL = 1e-12


def _power_iteration(op, x0: np.ndarray, what: str, diagnostics: dict | None) -> np.ndarray:
    """Iterate ``x <- op(x) / max(op(x))`` until the max-norm change is below EIG_TOL."""
    x = x0 / x0.max()
    converged = False
    it = 0
    for it in range(1, MAX_ITER + 1):
        y = op(x)
        y /= y.max()
        delta = np.abs(y - x).max()
        x = y
        if delta < EIG_TOL:
            converged = True
            break
    if diagnostics is not None:
        diagnostics[what] = {"converged": converged, "iterations": it}
    if not converged:
        logger.warning("%s power iteration did not converge in %d steps", what, MAX_ITER)
    return x


def eigenvector_centrality(g: ConversationGraph, diagnostics: dict | None = None) -> np.ndarray:
    """Leading eigenvector of the weighted adjacency matrix, scaled to max 1.

    The iteration runs on ``A + I``: same eigenvectors, but the spectrum is
    shifted so bipartite graphs (stars, paths) do not oscillate between the
    ``+lambda`` and ``-lambda`` eigenvectors.
    """
    a = g.weight_matrix()
    if g.m == 0:
        return np.zeros(g.n)
    return _power_iteration(lambda x: a @ x + x, np.ones(g.n), "eigenvector", diagnostics)


def hits(g: ConversationGraph, diagnostics: dict | None = None,
         start: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Hub and authority scores by power iteration on ``A A^T``, scaled to max 1.

    The start vector is the eigenvector centrality.  For a symmetric matrix
    it already spans the leading eigenspace of ``A A^T``, which is degenerate
    on bipartite graphs and would otherwise depend on the seed vector.
    Hub and authority coincide for undirected graphs.
    """
    if g.m == 0:
        zeros = np.zeros(g.n)
        return zeros, zeros.copy()
    a = g.weight_matrix()
    if start is None:
        start = eigenvector_centrality(g, diagnostics)
    aat = a @ a.T
    hub = _power_iteration(lambda x: aat @ x, start.copy(), "hub", diagnostics)
    if np.array_equal(a, a.T):
        return hub, hub.copy()
    ata = a.T @ a
    authority = _power_iteration(lambda x: ata @ x, start.copy(), "authority", diagnostics)
    return hub, authority


def pagerank(g: ConversationGraph, damping: float = 0.85,
             diagnostics: dict | None = None) -> np.ndarray:
    """Weighted PageRank; transition probabilities are proportional to edge weight.

    Mass sitting on vertices without edges is spread uniformly, so isolated
    vertices only ever receive teleport mass.  Stops when the L1 change drops
    below 1e-12.
    """
    if not 0.0 < damping < 1.0:
        raise ValueError("damping must lie in (0, 1)")
    n = g.n
    a = g.weight_matrix()
    strength = a.sum(axis=1)
    dangling = strength == 0
    inv = np.divide(1.0, strength, out=np.zeros(n), where=~dangling)
    # transition[i, j] = probability of stepping i -> j
    transition_t = (a * inv[:, None]).T
    x = np.full(n, 1.0 / n)
    teleport = (1.0 - damping) / n
    converged = False
    it = 0
    for it in range(1, MAX_ITER + 1):
        y = damping * (transition_t @ x) + (teleport + damping * x[dangling].sum() / n)
        y /= y.sum()
        delta = np.abs(y - x).sum()
        x = y
        if delta < PAGERANK_TOL:
            converged = True
            break
    if diagnostics is not None:
        diagnostics["pagerank"] = {"converged": converged, "iterations": it}
    if not converged:
        logger.warning("pagerank did not converge in %d steps", MAX_ITER)
    return x
