"""Topological measures on conversation graphs.

Spectral measures (eigenvector, PageRank, hub/authority) use edge weights;
everything path-, degree- or subgraph-based works on the unweighted
skeleton.  All conventions for disconnected or trivial graphs yield finite
numbers.
"""

from __future__ import annotations

from dataclasses import astuple, dataclass, fields

import numpy as np

from .cliques import coreness, count_maximal_cliques, degree_assortativity
from .graph import ConversationGraph, GraphError, read_graph_csv, write_graph_csv
from .paths import all_distances, betweenness, closeness, distance_summary, eccentricity
from .spectral import eigenvector_centrality, hits, pagerank

LOCAL_NAMES = (
    "degree_centrality",
    "eigenvector",
    "pagerank",
    "hub",
    "authority",
    "betweenness",
    "closeness",
    "eccentricity",
    "coreness",
)
SCALAR_GLOBAL_NAMES = (
    "vertex_count",
    "edge_count",
    "density",
    "diameter",
    "average_distance",
    "clique_count",
    "degree_assortativity",
)
GLOBAL_NAMES = SCALAR_GLOBAL_NAMES + tuple(f"avg_{name}" for name in LOCAL_NAMES)


@dataclass(frozen=True)
class LocalMeasures:
    degree_centrality: float
    eigenvector: float
    pagerank: float
    hub: float
    authority: float
    betweenness: float
    closeness: float
    eccentricity: float
    coreness: float

    def values(self) -> tuple[float, ...]:
        return astuple(self)


@dataclass(frozen=True)
class GlobalMeasures:
    vertex_count: float
    edge_count: float
    density: float
    diameter: float
    average_distance: float
    clique_count: float
    degree_assortativity: float
    avg_degree_centrality: float
    avg_eigenvector: float
    avg_pagerank: float
    avg_hub: float
    avg_authority: float
    avg_betweenness: float
    avg_closeness: float
    avg_eccentricity: float
    avg_coreness: float

    def values(self) -> tuple[float, ...]:
        return astuple(self)


assert tuple(f.name for f in fields(LocalMeasures)) == LOCAL_NAMES
assert tuple(f.name for f in fields(GlobalMeasures)) == GLOBAL_NAMES


def degree_centrality_vector(g: ConversationGraph) -> np.ndarray:
    if g.n == 1:
        return np.zeros(1)
    return np.array(g.degrees(), dtype=float) / (g.n - 1)


def degree_centrality(g: ConversationGraph, v: int | str) -> float:
    v = g.vertex(v) if isinstance(v, str) else v
    if not 0 <= v < g.n:
        raise GraphError(f"unknown vertex index {v}")
    return float(degree_centrality_vector(g)[v])


def density(g: ConversationGraph) -> float:
    if g.n < 2:
        return 0.0
    return 2.0 * g.m / (g.n * (g.n - 1))


def local_vectors(g: ConversationGraph, damping: float = 0.85,
                  diagnostics: dict | None = None) -> dict[str, np.ndarray]:
    """Every local measure for every vertex, keyed by measure name."""
    return _vectors(g, all_distances(g), damping, diagnostics)


def _vectors(g, dists, damping=0.85, diagnostics=None):
    eig = eigenvector_centrality(g, diagnostics)
    hub, auth = hits(g, diagnostics, start=eig)
    return {
        "degree_centrality": degree_centrality_vector(g),
        "eigenvector": eig,
        "pagerank": pagerank(g, damping, diagnostics),
        "hub": hub,
        "authority": auth,
        "betweenness": betweenness(g),
        "closeness": closeness(g, dists),
        "eccentricity": eccentricity(g, dists),
        "coreness": coreness(g),
    }


def _local_from(vectors: dict[str, np.ndarray], v: int) -> LocalMeasures:
    return LocalMeasures(*(float(vectors[name][v]) for name in LOCAL_NAMES))


def _global_from(g: ConversationGraph, vectors: dict[str, np.ndarray],
                 dists=None) -> GlobalMeasures:
    diameter, avg_dist = distance_summary(g, dists)
    return GlobalMeasures(
        float(g.n),
        float(g.m),
        density(g),
        diameter,
        avg_dist,
        float(count_maximal_cliques(g)),
        degree_assortativity(g),
        *(float(vectors[name].mean()) for name in LOCAL_NAMES),
    )


def local_measures(g: ConversationGraph, v: int | str) -> LocalMeasures:
    v = g.vertex(v) if isinstance(v, str) else v
    if not 0 <= v < g.n:
        raise GraphError(f"unknown vertex index {v}")
    return _local_from(local_vectors(g), v)


def global_measures(g: ConversationGraph) -> GlobalMeasures:
    dists = all_distances(g)
    return _global_from(g, _vectors(g, dists), dists)


def graph_measures(g: ConversationGraph, damping: float = 0.85) -> tuple[LocalMeasures, GlobalMeasures]:
    """Target-vertex local measures and global measures, sharing one computation."""
    dists = all_distances(g)
    vectors = _vectors(g, dists, damping)
    return _local_from(vectors, g.target), _global_from(g, vectors, dists)


__all__ = [
    "ConversationGraph",
    "GLOBAL_NAMES",
    "GlobalMeasures",
    "GraphError",
    "LOCAL_NAMES",
    "LocalMeasures",
    "SCALAR_GLOBAL_NAMES",
    "betweenness",
    "closeness",
    "coreness",
    "count_maximal_cliques",
    "degree_assortativity",
    "degree_centrality",
    "density",
    "distance_summary",
    "eccentricity",
    "eigenvector_centrality",
    "global_measures",
    "graph_measures",
    "hits",
    "local_measures",
    "local_vectors",
    "pagerank",
    "read_graph_csv",
    "write_graph_csv",
]
