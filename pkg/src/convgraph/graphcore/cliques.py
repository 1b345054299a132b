"""Core decomposition and maximal clique enumeration on the unweighted skeleton."""

from __future__ import annotations

import numpy as np

from .graph import ConversationGraph


def coreness(g: ConversationGraph) -> np.ndarray:
    """k-core number of every vertex by repeated minimum-degree peeling."""
    deg = g.degrees()
    alive = set(range(g.n))
    core = np.zeros(g.n)
    k = 0
    while alive:
        # lowest index wins ties so peeling order is reproducible
        v = min(alive, key=lambda u: (deg[u], u))
        k = max(k, deg[v])
        core[v] = k
        alive.remove(v)
        for w in g.neighbors(v):
            if w in alive:
                deg[w] -= 1
    return core


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def neighbor_masks(g: ConversationGraph) -> list[int]:
    masks = []
    for v in range(g.n):
        m = 0
        for w in g.neighbors(v):
            m |= 1 << w
        masks.append(m)
    return masks


def count_maximal_cliques(g: ConversationGraph, min_size: int = 2) -> int:
    """Number of maximal cliques with at least ``min_size`` vertices.

    Bron-Kerbosch with Tomita pivoting on integer bitsets.  With the default
    ``min_size=2`` isolated vertices are not counted.
    """
    nbr = neighbor_masks(g)
    count = 0

    def expand(size: int, p: int, x: int) -> None:
        nonlocal count
        if not p:
            if not x and size >= min_size:
                count += 1
            return
        pivot = max(_bits(p | x), key=lambda u: (nbr[u] & p).bit_count())
        for v in _bits(p & ~nbr[pivot]):
            bit = 1 << v
            expand(size + 1, p & nbr[v], x & nbr[v])
            p &= ~bit
            x |= bit

    expand(0, (1 << g.n) - 1, 0)
    return count


def degree_assortativity(g: ConversationGraph) -> float:
    """Pearson correlation of endpoint degrees over both orientations of every edge.

    Returns 0 when the endpoint degrees have no variance (including edgeless
    graphs), keeping the value finite.
    """
    deg = g.degrees()
    src = []
    dst = []
    for u, v, _ in g.edges():
        src += (deg[u], deg[v])
        dst += (deg[v], deg[u])
    if len(set(src)) < 2:
        return 0.0
    x = np.asarray(src, dtype=float)
    y = np.asarray(dst, dtype=float)
    x -= x.mean()
    y -= y.mean()
    r = float((x * y).sum() / np.sqrt((x * x).sum() * (y * y).sum()))
    return min(1.0, max(-1.0, r))
