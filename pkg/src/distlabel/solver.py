"""Exact values of the four labelling invariants and of chromatic numbers.

All searches are plain backtracking over a fixed vertex order with a node
budget.  Running out of budget raises :class:`UnresolvedError`; a value is
never guessed.  ``oracle=True`` turns off every shortcut (bracketing bounds,
rotation pinning, counting prunes) and scans spans from zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

import networkx as nx

from .graphs import INF, Graph, diameter, graph_power, induced_subgraph
from .labelling import HVector, Labelling, no_hole_cyclic

DEFAULT_BUDGET = 10**8

LAMBDA, NLAMBDA, SIGMA, NSIGMA, CHROMATIC = "lambda", "nlambda", "sigma", "nsigma", "chromatic"


class UnresolvedError(RuntimeError):
    """The node budget ran out before the value was pinned down."""

    def __init__(self, invariant: str, lo, hi, nodes: int):
        self.invariant = invariant
        self.lo = lo
        self.hi = hi
        self.nodes = nodes
        super().__init__(f"{invariant} unresolved after {nodes} nodes; value in [{lo}, {hi}]")


class _BudgetExceeded(Exception):
    pass


@dataclass
class SolveResult:
    invariant: str
    value: int | float
    witness: Labelling | None
    nodes: int = 0
    spans_tested: list[int] = field(default_factory=list)

    @property
    def finite(self) -> bool:
        return self.value != INF

    def to_json(self) -> dict:
        return {
            "invariant": self.invariant,
            "value": "infinity" if self.value == INF else self.value,
            "witness": self.witness.to_json() if self.witness is not None else None,
            "nodes": self.nodes,
        }


def _to_nx(G: Graph) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(G.n))
    g.add_edges_from(G.edges())
    return g


def max_clique(G: Graph) -> list[int]:
    clique, _ = nx.max_weight_clique(_to_nx(G), weight=None)
    return sorted(clique)


def greedy_colour_count(G: Graph) -> int:
    colours: dict[int, int] = {}
    for v in sorted(range(G.n), key=lambda v: -G.degree(v)):
        taken = {colours[w] for w in G.adj[v] if w in colours}
        colours[v] = next(c for c in range(G.n) if c not in taken)
    return max(colours.values()) + 1


def _effective_reach(h: HVector) -> int:
    # trailing zero separations impose nothing
    reach = h.l
    while reach and h.entries[reach - 1] == 0:
        reach -= 1
    return reach


class _Backtracker:
    """Label assignment search over a fixed order, shared across spans."""

    def __init__(self, G: Graph, h: HVector, budget: int, oracle: bool):
        self.G = G
        self.h = h
        self.n = G.n
        self.budget = budget
        self.oracle = oracle
        self.nodes = 0
        reach = _effective_reach(h)
        sep_of = h.as_array()
        cons: list[list[tuple[int, int]]] = [[] for _ in range(G.n)]
        if reach:
            for u in range(G.n):
                row = G.distance_row(u, reach)
                for v in range(G.n):
                    if v != u and row[v] > 0:
                        cons[u].append((v, int(sep_of[row[v]])))
        if oracle:
            order = list(range(G.n))
        else:
            order = sorted(range(G.n), key=lambda v: (-len(cons[v]), v))
        pos = {v: i for i, v in enumerate(order)}
        self.order = order
        self.back = [[(w, s) for w, s in cons[v] if pos[w] < pos[v]] for v in order]

    def solve(self, size: int, modulus: int | None = None, onto: bool = False,
              pin: bool = False, leaf: Callable[[list[int]], bool] | None = None) -> list[int] | None:
        """Labels from ``0..size-1`` meeting every constraint, or None.

        ``onto`` demands every label be used; ``pin`` fixes the first vertex
        to 0; ``leaf`` is an extra predicate on complete assignments.
        """
        n, order, back = self.n, self.order, self.back
        if size < 1:
            return None
        lab = [-1] * n
        used = [0] * size
        unused = size
        prune_onto = onto and not self.oracle
        budget = self.budget

        def rec(i: int) -> bool:
            nonlocal unused
            if i == n:
                if onto and unused:
                    return False
                return leaf is None or leaf(lab)
            if prune_onto and unused > n - i:
                return False
            v = order[i]
            cons = back[i]
            for c in ((0,) if pin and i == 0 else range(size)):
                self.nodes += 1
                if self.nodes > budget:
                    raise _BudgetExceeded
                for w, s in cons:
                    d = c - lab[w]
                    if d < 0:
                        d = -d
                    if modulus is not None and modulus - d < d:
                        d = modulus - d
                    if d < s:
                        break
                else:
                    lab[v] = c
                    if not used[c]:
                        unused -= 1
                    used[c] += 1
                    if rec(i + 1):
                        return True
                    used[c] -= 1
                    if not used[c]:
                        unused += 1
                    lab[v] = -1
            return False

        return list(lab) if rec(0) else None


def _check_h(h) -> HVector:
    h = HVector.of(h)
    if not h.is_monotone():
        raise ValueError(f"solvers need a nonincreasing separation vector, got {h}")
    return h


def _span_bounds(G: Graph, h: HVector) -> tuple[int, int]:
    reach = _effective_reach(h)
    if not reach:
        return 0, 0
    power = graph_power(G, reach)
    # vertices pairwise within distance i need labels h_i apart
    lo = 0
    for i in range(1, reach + 1):
        sub = power if i == reach else graph_power(G, i)
        lo = max(lo, h.entries[i - 1] * (len(max_clique(sub)) - 1))
    hi = h.h1 * (greedy_colour_count(power) - 1)
    return lo, hi


def feasible_linear(G: Graph, h, k: int, budget: int = DEFAULT_BUDGET) -> Labelling | None:
    """A labelling into ``0..k`` meeting ``h``, or None if none exists."""
    h = _check_h(h)
    if k < 0:
        raise ValueError("span budget must be >= 0")
    bt = _Backtracker(G, h, budget, oracle=False)
    try:
        labels = bt.solve(k + 1)
    except _BudgetExceeded:
        raise UnresolvedError(LAMBDA, None, None, bt.nodes) from None
    return Labelling.linear(labels) if labels is not None else None


def _lambda(bt: _Backtracker, tested: list[int]) -> tuple[int, list[int]]:
    lo, hi = _span_bounds(bt.G, bt.h)
    start = 0 if bt.oracle else lo
    for s in range(start, hi + 1):
        tested.append(s)
        try:
            labels = bt.solve(s + 1)
        except _BudgetExceeded:
            raise UnresolvedError(LAMBDA, s, hi, bt.nodes) from None
        if labels is not None:
            return s, labels
    raise AssertionError("scaled colouring bound was not feasible")


def lambda_exact(G: Graph, h, budget: int = DEFAULT_BUDGET, oracle: bool = False) -> SolveResult:
    """Minimum span of a linear labelling meeting ``h``."""
    h = _check_h(h)
    bt = _Backtracker(G, h, budget, oracle)
    tested: list[int] = []
    value, labels = _lambda(bt, tested)
    return SolveResult(LAMBDA, value, Labelling.linear(labels), bt.nodes, tested)


def _sigma(bt: _Backtracker, lam: int, tested: list[int]) -> tuple[int, list[int]]:
    h1 = max(bt.h.h1, 1)
    lo = 1 if bt.oracle else lam + 1
    hi = lam + h1
    for k in range(lo, hi + 1):
        tested.append(k - 1)
        try:
            labels = bt.solve(k, modulus=k, pin=not bt.oracle)
        except _BudgetExceeded:
            raise UnresolvedError(SIGMA, k - 1, hi - 1, bt.nodes) from None
        if labels is not None:
            return k - 1, labels
    raise AssertionError("no cyclic labelling inside the guaranteed window")


def sigma_exact(G: Graph, h, budget: int = DEFAULT_BUDGET, oracle: bool = False) -> SolveResult:
    """Minimum ``k - 1`` over cyclic labellings mod ``k`` meeting ``h``."""
    h = _check_h(h)
    bt = _Backtracker(G, h, budget, oracle)
    tested: list[int] = []
    lam, _ = _lambda(bt, [])
    value, labels = _sigma(bt, lam, tested)
    return SolveResult(SIGMA, value, Labelling.cyclic(labels, value + 1), bt.nodes, tested)


def _nlambda(bt: _Backtracker, lam: int, tested: list[int]) -> tuple[int | float, list[int] | None]:
    # a no-hole labelling of span s uses s + 1 distinct labels, so s <= n - 1
    start = 0 if bt.oracle else lam
    for s in range(start, bt.n):
        tested.append(s)
        try:
            labels = bt.solve(s + 1, onto=True)
        except _BudgetExceeded:
            raise UnresolvedError(NLAMBDA, s, bt.n - 1, bt.nodes) from None
        if labels is not None:
            return s, labels
    return INF, None


def nlambda_exact(G: Graph, h, budget: int = DEFAULT_BUDGET, oracle: bool = False) -> SolveResult:
    """Minimum span of a no-hole linear labelling, ``INF`` if none exists."""
    h = _check_h(h)
    bt = _Backtracker(G, h, budget, oracle)
    tested: list[int] = []
    lam, _ = _lambda(bt, [])
    value, labels = _nlambda(bt, lam, tested)
    witness = Labelling.linear(labels) if labels is not None else None
    return SolveResult(NLAMBDA, value, witness, bt.nodes, tested)


def nsigma_window(nlambda: int, h1: int) -> int:
    """Largest modulus worth trying for a no-hole cyclic labelling.

    A no-hole linear labelling of span ``s`` read modulo ``s + max(h1, 1)``
    is a no-hole cyclic labelling (the wrap gap is at least ``h1``), so the
    optimum modulus never exceeds that; one extra is allowed as slack.
    """
    return nlambda + max(h1, 1) + 1


def _nsigma(bt: _Backtracker, sigma: int, nlam, tested: list[int]):
    if nlam == INF:
        return INF, None
    hi = nsigma_window(nlam, bt.h.h1)
    lo = 1 if bt.oracle else sigma + 1
    for k in range(lo, hi + 1):
        tested.append(k - 1)
        try:
            if bt.oracle:
                labels = bt.solve(k, modulus=k, leaf=lambda lab, k=k: no_hole_cyclic(
                    Labelling.cyclic(lab, k)))
            else:
                # rotate the used interval to start at 0
                labels = None
                for m in range(min(k, bt.n)):
                    labels = bt.solve(m + 1, modulus=k, onto=True)
                    if labels is not None:
                        break
        except _BudgetExceeded:
            raise UnresolvedError(NSIGMA, k - 1, hi - 1, bt.nodes) from None
        if labels is not None:
            return k - 1, labels
    raise AssertionError("no no-hole cyclic labelling inside the derived window")


def nsigma_exact(G: Graph, h, budget: int = DEFAULT_BUDGET, oracle: bool = False) -> SolveResult:
    """Minimum ``k - 1`` over no-hole cyclic labellings, ``INF`` if none exists."""
    h = _check_h(h)
    bt = _Backtracker(G, h, budget, oracle)
    tested: list[int] = []
    lam, _ = _lambda(bt, [])
    nlam, _ = _nlambda(bt, lam, [])
    if nlam == INF:
        return SolveResult(NSIGMA, INF, None, bt.nodes, tested)
    sig, _ = _sigma(bt, lam, [])
    value, labels = _nsigma(bt, sig, nlam, tested)
    return SolveResult(NSIGMA, value, Labelling.cyclic(labels, value + 1), bt.nodes, tested)


def all_invariants(G: Graph, h, budget: int = DEFAULT_BUDGET, oracle: bool = False) -> dict[str, SolveResult]:
    """The four invariants from one shared search state."""
    h = _check_h(h)
    bt = _Backtracker(G, h, budget, oracle)
    out = {}
    lam, lab = _lambda(bt, [])
    out[LAMBDA] = SolveResult(LAMBDA, lam, Labelling.linear(lab), bt.nodes)
    sig, lab = _sigma(bt, lam, [])
    out[SIGMA] = SolveResult(SIGMA, sig, Labelling.cyclic(lab, sig + 1), bt.nodes)
    nlam, lab = _nlambda(bt, lam, [])
    out[NLAMBDA] = SolveResult(NLAMBDA, nlam, Labelling.linear(lab) if lab else None, bt.nodes)
    nsig, lab = _nsigma(bt, sig, nlam, [])
    out[NSIGMA] = SolveResult(NSIGMA, nsig,
                              Labelling.cyclic(lab, nsig + 1) if lab else None, bt.nodes)
    return out


def chromatic_exact(G: Graph, budget: int = DEFAULT_BUDGET) -> SolveResult:
    """Chromatic number by backtracking, seeded with a maximum clique."""
    clique = max_clique(G)
    rest = sorted((v for v in range(G.n) if v not in set(clique)), key=lambda v: (-G.degree(v), v))
    order = clique + rest
    pos = {v: i for i, v in enumerate(order)}
    back = [[w for w in G.adj[v] if pos[w] < pos[v]] for v in order]
    nodes = 0
    hi = greedy_colour_count(G)

    def colourable(c: int) -> list[int] | None:
        nonlocal nodes
        col = [-1] * G.n
        for i, v in enumerate(clique):
            col[v] = i

        def rec(i: int) -> bool:
            nonlocal nodes
            if i == G.n:
                return True
            v = order[i]
            taken = {col[w] for w in back[i]}
            # colours beyond the largest in use are interchangeable
            top = max(col[order[j]] for j in range(i)) + 1 if i else 0
            for colour in range(min(c, top + 1)):
                nodes += 1
                if nodes > budget:
                    raise _BudgetExceeded
                if colour in taken:
                    continue
                col[v] = colour
                if rec(i + 1):
                    return True
            col[v] = -1
            return False

        return col if rec(len(clique)) else None

    for c in range(len(clique), hi + 1):
        try:
            col = colourable(c)
        except _BudgetExceeded:
            raise UnresolvedError(CHROMATIC, c, hi, nodes) from None
        if col is not None:
            return SolveResult(CHROMATIC, c, Labelling.linear(col), nodes, [c])
    raise AssertionError("greedy colouring bound was not achievable")


@dataclass
class Certificate:
    vertices: tuple[int, ...]
    l: int
    order: int
    diameter: int | float
    accepted: bool

    @property
    def bound(self) -> int | None:
        """Lower bound on all four invariants when accepted."""
        return self.order - 1 if self.accepted else None

    def to_json(self) -> dict:
        return {"order": self.order, "diameter": "infinity" if self.diameter == INF else self.diameter,
                "l": self.l, "accepted": self.accepted, "bound": self.bound}


def certificate_check(G: Graph, S: Iterable[int], l: int) -> Certificate:
    """Vertex sets of diameter at most ``l`` need pairwise distinct labels.

    The diameter is taken in the induced subgraph, which is at least the
    distance in ``G``, so acceptance is conservative.
    """
    S = sorted(set(S))
    if not S:
        raise ValueError("certificate needs a nonempty vertex set")
    K, back = induced_subgraph(G, S)
    diam = diameter(K)
    return Certificate(tuple(back), l, len(back), diam, diam <= l)
