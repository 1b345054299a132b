"""Hop-count path measures (edge weights are ignored here)."""

from __future__ import annotations

from collections import deque

import numpy as np

from .graph import ConversationGraph


def bfs_distances(g: ConversationGraph, source: int) -> dict[int, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        d = dist[v] + 1
        for w in g.neighbors(v):
            if w not in dist:
                dist[w] = d
                queue.append(w)
    return dist


def all_distances(g: ConversationGraph) -> list[dict[int, int]]:
    return [bfs_distances(g, s) for s in range(g.n)]


def betweenness(g: ConversationGraph) -> np.ndarray:
    """Normalized shortest-path betweenness (Brandes accumulation over BFS).

    Each unordered pair contributes once; the result is divided by
    ``(n-1)(n-2)/2`` so values lie in ``[0, 1]``.  Graphs with fewer than
    three vertices get all zeros.
    """
    n = g.n
    cb = np.zeros(n)
    if n < 3:
        return cb
    for s in range(n):
        stack = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = [0] * n
        sigma[s] = 1
        dist = [-1] * n
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in g.neighbors(v):
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        while stack:
            w = stack.pop()
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                cb[w] += delta[w]
    # both orientations of every pair were accumulated
    return cb / ((n - 1) * (n - 2))


def closeness(g: ConversationGraph, dists: list[dict[int, int]] | None = None) -> np.ndarray:
    """``|R(v)| / sum of distances to R(v)`` over the reachable set; 0 if isolated."""
    dists = dists if dists is not None else all_distances(g)
    out = np.zeros(g.n)
    for v, dv in enumerate(dists):
        total = sum(dv.values())
        if total:
            out[v] = (len(dv) - 1) / total
    return out


def eccentricity(g: ConversationGraph, dists: list[dict[int, int]] | None = None) -> np.ndarray:
    """Largest finite distance from each vertex, i.e. within its component."""
    dists = dists if dists is not None else all_distances(g)
    return np.array([float(max(dv.values())) for dv in dists])


def distance_summary(g: ConversationGraph,
                     dists: list[dict[int, int]] | None = None) -> tuple[float, float]:
    """``(diameter, average_distance)`` over connected unordered pairs."""
    dists = dists if dists is not None else all_distances(g)
    longest = 0
    total = 0
    pairs = 0
    for v, dv in enumerate(dists):
        for u, d in dv.items():
            if u > v:
                total += d
                pairs += 1
                if d > longest:
                    longest = d
    return float(longest), (total / pairs if pairs else 0.0)
