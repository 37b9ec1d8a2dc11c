"""Finite simple graphs, Cartesian products and distance queries.

Vertices are the integers ``0..n-1``.  Product graphs index their vertices
row-major over the factor digits, last coordinate fastest, so the vertices
sharing a value of the last coordinate are spread with stride 1 and a
"slice" of the last factor is obtained by fixing that coordinate.
"""

from __future__ import annotations

import math
from collections import deque
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

#: Distance between vertices in different components.
INF = math.inf

# Internal marker inside integer distance arrays; never returned to callers.
_UNREACHED = -1


class Graph:
    """Immutable finite simple undirected graph on ``0..n-1``."""

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = (), name: str = ""):
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise ValueError(f"graph order must be a positive integer, got {n!r}")
        n = int(n)
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        self._set(n, tuple(tuple(sorted(s)) for s in nbrs), name)

    def _set(self, n, adj, name):
        self.n = n
        self.adj = adj
        self.name = name
        self._adjsets = None

    @classmethod
    def _from_adjacency(cls, adj: Sequence[Sequence[int]], name: str = "") -> "Graph":
        # trusted constructor: adj must already be symmetric, loop-free and sorted
        g = cls.__new__(cls)
        g._set(len(adj), tuple(tuple(a) for a in adj), name)
        return g

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"<{type(self).__name__}{label} n={self.n} m={self.num_edges}>"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.adj == other.adj

    def __hash__(self) -> int:
        return hash((self.n, self.adj))

    def __len__(self) -> int:
        return self.n

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def edges(self) -> list[tuple[int, int]]:
        """Sorted list of edges ``(u, v)`` with ``u < v``."""
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        if self._adjsets is None:
            self._adjsets = [frozenset(a) for a in self.adj]
        return v in self._adjsets[u]

    def check_vertex(self, v) -> int:
        if not isinstance(v, (int, np.integer)) or not 0 <= v < self.n:
            raise ValueError(f"vertex {v!r} is not in 0..{self.n - 1}")
        return int(v)

    def distance_row(self, source: int, cutoff: int | None = None) -> np.ndarray:
        """Distances from ``source`` as an int array; -1 marks unreached vertices.

        Vertices farther than ``cutoff`` count as unreached.
        """
        source = self.check_vertex(source)
        dist = [_UNREACHED] * self.n
        dist[source] = 0
        queue = deque([source])
        adj = self.adj
        while queue:
            u = queue.popleft()
            du = dist[u]
            if cutoff is not None and du >= cutoff:
                continue
            for w in adj[u]:
                if dist[w] < 0:
                    dist[w] = du + 1
                    queue.append(w)
        return np.asarray(dist, dtype=np.int64)

    def distance_matrix(self) -> np.ndarray:
        """All-pairs distances, -1 for disconnected pairs.  Small graphs only."""
        return np.vstack([self.distance_row(s) for s in range(self.n)])

    def is_connected(self) -> bool:
        return bool((self.distance_row(0) >= 0).all())

    def to_json(self) -> dict:
        return {"name": self.name, "n": self.n, "edges": [list(e) for e in self.edges()]}


class ProductGraph(Graph):
    """Cartesian product ``G_1 x ... x G_d`` with a row-major digit codec."""

    def __init__(self, factors: Sequence[Graph], name: str = ""):
        factors = list(factors)
        if not factors:
            raise ValueError("cartesian product needs at least one factor")
        for f in factors:
            if not isinstance(f, Graph):
                raise TypeError(f"factor {f!r} is not a Graph")
        self.factors = tuple(factors)
        self.orders = tuple(f.n for f in factors)
        strides = []
        acc = 1
        for q in reversed(self.orders):
            strides.append(acc)
            acc *= q
        self.strides = tuple(reversed(strides))
        n = acc

        adj: list[list[int]] = []
        for v in range(n):
            digits = self.decode(v)
            nbrs = []
            for i, f in enumerate(factors):
                base = v - digits[i] * self.strides[i]
                for w in f.adj[digits[i]]:
                    nbrs.append(base + w * self.strides[i])
            nbrs.sort()
            adj.append(nbrs)
        self._set(n, tuple(tuple(a) for a in adj), name)

    def to_json(self) -> dict:
        data = super().to_json()
        data["factors"] = [f.to_json() for f in self.factors]
        return data

    def encode(self, digits: Sequence[int]) -> int:
        if len(digits) != len(self.orders):
            raise ValueError(f"expected {len(self.orders)} digits, got {len(digits)}")
        value = 0
        for x, q, s in zip(digits, self.orders, self.strides):
            if not 0 <= x < q:
                raise ValueError(f"digit {x} out of range 0..{q - 1}")
            value += int(x) * s
        return value

    def decode(self, v: int) -> tuple[int, ...]:
        out = []
        for q in reversed(self.orders):
            v, x = divmod(v, q)
            out.append(x)
        if v:
            raise ValueError("flat index out of range")
        return tuple(reversed(out))

    @cached_property
    def digits(self) -> np.ndarray:
        """``(n, d)`` array of digit vectors, row ``v`` decoding vertex ``v``."""
        grid = np.unravel_index(np.arange(self.n), self.orders)
        return np.stack(grid, axis=1).astype(np.int64)

    @cached_property
    def factor_distances(self) -> tuple[np.ndarray, ...]:
        return tuple(f.distance_matrix() for f in self.factors)

    def _as_index(self, v) -> int:
        if isinstance(v, (int, np.integer)):
            return self.check_vertex(v)
        return self.encode(v)

    def distance_row(self, source: int, cutoff: int | None = None) -> np.ndarray:
        # sum of per-factor distances; equals BFS distance in the product
        source = self.check_vertex(source)
        sd = self.decode(source)
        total = np.zeros(self.n, dtype=np.int64)
        bad = np.zeros(self.n, dtype=bool)
        for i, table in enumerate(self.factor_distances):
            col = table[sd[i]][self.digits[:, i]]
            bad |= col < 0
            total += col
        total[bad] = _UNREACHED
        if cutoff is not None:
            total[total > cutoff] = _UNREACHED
        return total


def _tag(kind: str, *params) -> str:
    return f"{kind}({','.join(str(p) for p in params)})"


def complete_graph(q: int) -> Graph:
    if not isinstance(q, int) or q < 1:
        raise ValueError(f"complete graph order must be >= 1, got {q!r}")
    return Graph(q, combinations(range(q), 2), name=f"K{q}")


def path_graph(n: int) -> Graph:
    return Graph(n, ((i, i + 1) for i in range(n - 1)), name=f"P{n}")


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return Graph(n, ((i, (i + 1) % n) for i in range(n)), name=f"C{n}")


def star_graph(n: int) -> Graph:
    """Star on ``n`` vertices with centre 0."""
    return Graph(n, ((0, i) for i in range(1, n)), name=f"S{n}")


def graph_from_edges(n: int, edges: Iterable[tuple[int, int]], name: str = "") -> Graph:
    return Graph(n, edges, name=name)


def cartesian_product(factors: Sequence[Graph], name: str = "") -> ProductGraph:
    factors = list(factors)
    if not factors:
        raise ValueError("cartesian product needs at least one factor")
    if not name:
        name = "x".join(f.name or f"G{f.n}" for f in factors)
    return ProductGraph(factors, name=name)


def hamming_graph(orders: Sequence[int]) -> ProductGraph:
    orders = list(orders)
    if not orders:
        raise ValueError("hamming graph needs at least one order")
    if any(not isinstance(q, int) or q < 2 for q in orders):
        raise ValueError(f"hamming graph orders must all be >= 2, got {orders}")
    return cartesian_product([complete_graph(q) for q in orders],
                             name=_tag("H", *orders))


def hypercube(d: int) -> ProductGraph:
    if not isinstance(d, int) or d < 1:
        raise ValueError(f"hypercube dimension must be >= 1, got {d!r}")
    return cartesian_product([complete_graph(2)] * d, name=f"Q{d}")


def bounded_distances(G: Graph, source: int, cutoff: int) -> dict[int, int]:
    """BFS distances from ``source`` to every vertex within ``cutoff``."""
    if cutoff < 0:
        raise ValueError("cutoff must be >= 0")
    row = Graph.distance_row(G, source, cutoff)
    return {int(v): int(d) for v, d in enumerate(row) if d >= 0}


def product_distance(PG: ProductGraph, u, v) -> int | float:
    """Sum of per-factor distances; ``INF`` if some factor pair is disconnected.

    ``u`` and ``v`` may be flat indices or digit vectors.
    """
    du = PG.decode(PG._as_index(u))
    dv = PG.decode(PG._as_index(v))
    total = 0
    for table, a, b in zip(PG.factor_distances, du, dv):
        d = int(table[a, b])
        if d < 0:
            return INF
        total += d
    return total


def graph_power(G: Graph, l: int) -> Graph:
    """Graph on V(G) joining u, v whenever ``1 <= dist(u, v) <= l``."""
    if not isinstance(l, int) or l < 1:
        raise ValueError(f"power must be a positive integer, got {l!r}")
    adj = []
    for s in range(G.n):
        row = G.distance_row(s, l)
        adj.append(np.flatnonzero(row > 0).tolist())
    return Graph._from_adjacency(adj, name=f"{G.name}^{l}" if G.name else "")


def diameter(G: Graph) -> int | float:
    """Largest pairwise distance, or ``INF`` if ``G`` is disconnected."""
    best = 0
    for s in range(G.n):
        row = G.distance_row(s)
        if (row < 0).any():
            return INF
        best = max(best, int(row.max()))
    return best


def induced_subgraph(G: Graph, S: Iterable[int]) -> tuple[Graph, list[int]]:
    """Induced subgraph on ``S`` and the map from its vertices back to ``G``."""
    verts = sorted({G.check_vertex(v) for v in S})
    if not verts:
        raise ValueError("induced subgraph needs a nonempty vertex set")
    index = {v: i for i, v in enumerate(verts)}
    adj = [[index[w] for w in G.adj[v] if w in index] for v in verts]
    return Graph._from_adjacency(adj), verts
