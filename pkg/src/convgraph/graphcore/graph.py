"""Weighted undirected user graph with a marked target vertex."""

from __future__ import annotations

import csv
from numbers import Real
from typing import IO, Iterable, Mapping, Sequence

import numpy as np


class GraphError(ValueError):
    pass


class ConversationGraph:
    """Simple weighted undirected graph over usernames.

    Vertices are indexed ``0..n-1`` in the order given at construction and
    every measure returns vectors in that order.  Weights are kept as given
    (``Fraction`` from extraction, ``float`` when read from CSV); spectral
    code sees them through :meth:`weight_matrix`.
    """

    __slots__ = ("names", "index", "target", "_adj", "_matrix")

    def __init__(self, names: Sequence[str], edges: Mapping[tuple[int, int], Real],
                 target: int = 0):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise GraphError("duplicate vertex names")
        if not self.names:
            raise GraphError("graph needs at least the target vertex")
        if not 0 <= target < len(self.names):
            raise GraphError(f"target index {target} out of range")
        self.index = {name: i for i, name in enumerate(self.names)}
        self.target = target
        adj: list[dict[int, Real]] = [{} for _ in self.names]
        for (u, v), w in edges.items():
            if u == v:
                raise GraphError(f"self-loop on {self.names[u]!r}")
            if not w > 0:
                raise GraphError(f"non-positive weight on {self.names[u]!r}-{self.names[v]!r}")
            if v in adj[u]:
                raise GraphError(f"duplicate edge {self.names[u]!r}-{self.names[v]!r}")
            adj[u][v] = w
            adj[v][u] = w
        self._adj = tuple(adj)
        self._matrix = None

    @classmethod
    def from_edge_list(cls, names: Sequence[str], edges: Iterable[tuple[str, str, Real]],
                       target: str | None = None) -> "ConversationGraph":
        index = {name: i for i, name in enumerate(names)}
        emap = {}
        for u, v, w in edges:
            emap[(index[u], index[v])] = w
        return cls(names, emap, index[target] if target is not None else 0)

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def m(self) -> int:
        return sum(len(a) for a in self._adj) // 2

    @property
    def target_name(self) -> str:
        return self.names[self.target]

    def neighbors(self, v: int) -> Mapping[int, Real]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def degrees(self) -> list[int]:
        return [len(a) for a in self._adj]

    def weight(self, u: int, v: int) -> Real | None:
        return self._adj[u].get(v)

    def edges(self) -> list[tuple[int, int, Real]]:
        """Edges as ``(u, v, w)`` with ``u < v``, sorted."""
        return [(u, v, w) for u, a in enumerate(self._adj) for v, w in sorted(a.items()) if u < v]

    def named_edges(self) -> dict[frozenset, Real]:
        return {frozenset((self.names[u], self.names[v])): w for u, v, w in self.edges()}

    def vertex(self, name: str) -> int:
        try:
            return self.index[name]
        except KeyError:
            raise GraphError(f"unknown vertex {name!r}") from None

    def weight_matrix(self) -> np.ndarray:
        if self._matrix is None:
            mat = np.zeros((self.n, self.n))
            for u, a in enumerate(self._adj):
                for v, w in a.items():
                    mat[u, v] = float(w)
            mat.setflags(write=False)
            self._matrix = mat
        return self._matrix

    def relabel(self, perm: Sequence[int]) -> "ConversationGraph":
        """Return the graph with old vertex ``i`` moved to index ``perm[i]``."""
        perm = [int(p) for p in perm]
        if sorted(perm) != list(range(self.n)):
            raise GraphError("relabel needs a permutation of the vertex indices")
        names = [None] * self.n
        for old, new in enumerate(perm):
            names[new] = self.names[old]
        edges = {(perm[u], perm[v]): w for u, v, w in self.edges()}
        return ConversationGraph(names, edges, perm[self.target])

    def __repr__(self) -> str:
        return f"ConversationGraph(n={self.n}, m={self.m}, target={self.target_name!r})"


def _fmt_weight(w: Real) -> str:
    return format(float(w), ".17g")


def write_graph_csv(g: ConversationGraph, stream: IO[str]) -> None:
    """Vertex block (``#vertex,name,is_target``) followed by ``u,v,weight`` rows."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["#vertex", "name", "is_target"])
    for i, name in enumerate(g.names):
        writer.writerow(["#vertex", name, int(i == g.target)])
    writer.writerow(["u", "v", "weight"])
    for u, v, w in g.edges():
        writer.writerow([g.names[u], g.names[v], _fmt_weight(w)])


def read_graph_csv(stream: IO[str]) -> ConversationGraph:
    names: list[str] = []
    target = None
    edges: list[tuple[str, str, float]] = []
    for row_no, row in enumerate(csv.reader(stream), start=1):
        if not row:
            continue
        if row[0] == "#vertex":
            if row[1:] == ["name", "is_target"]:
                continue
            if len(row) != 3:
                raise GraphError(f"row {row_no}: bad vertex row")
            names.append(row[1])
            if row[2] == "1":
                if target is not None:
                    raise GraphError("more than one target vertex")
                target = row[1]
        elif row == ["u", "v", "weight"]:
            continue
        else:
            if len(row) != 3:
                raise GraphError(f"row {row_no}: bad edge row")
            try:
                w = float(row[2])
            except ValueError:
                raise GraphError(f"row {row_no}: bad weight {row[2]!r}") from None
            edges.append((row[0], row[1], w))
    if target is None:
        raise GraphError("no target vertex marked")
    known = set(names)
    for u, v, _ in edges:
        if u not in known or v not in known:
            raise GraphError(f"edge {u}-{v} references an undeclared vertex")
    return ConversationGraph.from_edge_list(names, edges, target)
