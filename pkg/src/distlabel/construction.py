"""Inductive offset-set construction of no-hole cyclic labellings.

For ``H = G_1 x ... x G_{l-1} x G`` with ``q_i = |G_i|``, ``q = |G|`` and a
chosen ``1 <= q_l <= q``, each vertex ``(x_1, ..., x_{l-1}, x)`` gets

    sum_i ((a_i(x) + x_i) mod q_i) * N_{i+1} + (x mod q_l)

where ``N_i = q_i * ... * q_l`` and ``a(x)`` is an offset vector chosen per
slice ``x`` of the last factor.  ``a(0)`` is zero; every later offset is the
lexicographically smallest vector keeping the new slice compatible with all
earlier ones, for separation ``q_l`` at distance 1 and 1 at distances
``2..l`` in the cyclic metric mod ``N_1``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import prod
from typing import Sequence

import numpy as np

from .conditions import Condition, check_product_condition
from .graphs import Graph, ProductGraph, cartesian_product
from .labelling import HVector, Labelling, no_hole_cyclic, verify_cyclic

log = logging.getLogger(__name__)

# upper bound on candidate x pair cells evaluated per numpy block
_BLOCK_CELLS = 1 << 21


class ConstructionStuck(RuntimeError):
    """No offset vector is compatible with the slices already placed."""

    def __init__(self, t: int, failures: list[dict]):
        self.t = t
        self.failures = failures
        super().__init__(f"construction stuck at t={t}: all {len(failures)} candidates rejected")


@dataclass(frozen=True)
class RadixSpec:
    radices: tuple[int, ...]
    suffix: tuple[int, ...]  # N_1..N_{l+1}

    @property
    def l(self) -> int:
        return len(self.radices)

    @property
    def modulus(self) -> int:
        return self.suffix[0]


def radix_spec(*q) -> RadixSpec:
    if len(q) == 1 and not isinstance(q[0], (int, np.integer)):
        q = tuple(q[0])
    q = tuple(int(x) for x in q)
    if not q or any(x < 1 for x in q):
        raise ValueError(f"radices must be positive, got {q}")
    suffix = [1]
    for x in reversed(q):
        suffix.append(suffix[-1] * x)
    return RadixSpec(q, tuple(reversed(suffix)))


def encode(spec: RadixSpec, digits: Sequence[int]) -> int:
    if len(digits) != spec.l:
        raise ValueError(f"expected {spec.l} digits, got {len(digits)}")
    value = 0
    for i, (x, q) in enumerate(zip(digits, spec.radices)):
        if not 0 <= x < q:
            raise ValueError(f"digit {x} at position {i} outside 0..{q - 1}")
        value += int(x) * spec.suffix[i + 1]
    return value


def decode(spec: RadixSpec, value: int) -> tuple[int, ...]:
    if not 0 <= value < spec.modulus:
        raise ValueError(f"value {value} outside 0..{spec.modulus - 1}")
    out = []
    for q in reversed(spec.radices):
        value, x = divmod(value, q)
        out.append(x)
    return tuple(reversed(out))


def residue(x: int, ql: int) -> int:
    if ql < 1:
        raise ValueError("q_l must be >= 1")
    return x % ql


class OffsetSet:
    """Offset vectors ``a(0), a(1), ...``, one per slice; ``a(0)`` is zero."""

    def __init__(self, radices: Sequence[int], vectors: Sequence[Sequence[int]] | None = None):
        self.radices = tuple(radices)
        self.vectors: list[tuple[int, ...]] = [(0,) * len(self.radices)]
        for vec in (vectors or [])[1:]:
            self.append(vec)
        if vectors and tuple(vectors[0]) != self.vectors[0]:
            raise ValueError("the first offset vector must be zero")

    def append(self, vec: Sequence[int]) -> None:
        vec = tuple(int(a) for a in vec)
        if len(vec) != len(self.radices) or any(not 0 <= a < q for a, q in zip(vec, self.radices)):
            raise ValueError(f"offset {vec} does not fit radices {self.radices}")
        self.vectors.append(vec)

    def __len__(self):
        return len(self.vectors)

    def __getitem__(self, x):
        return self.vectors[x]

    def __iter__(self):
        return iter(self.vectors)

    def to_json(self) -> list[list[int]]:
        return [list(v) for v in self.vectors]


@dataclass
class ConstructionContext:
    """Precomputed tables for one construction, in the permuted factor order."""

    factors: tuple[Graph, ...]
    last: Graph
    ql: int
    permutation: tuple[int, ...]
    spec: RadixSpec
    prefix_digits: np.ndarray
    prefix_dist: np.ndarray
    last_dist: np.ndarray
    shift_table: np.ndarray
    factor_dist: tuple = ()

    @property
    def l(self) -> int:
        return len(self.factors) + 1

    @property
    def q(self) -> int:
        return self.last.n

    @property
    def modulus(self) -> int:
        return self.spec.modulus

    @property
    def num_prefixes(self) -> int:
        return len(self.prefix_digits)

    @classmethod
    def build(cls, factors: Sequence[Graph], last: Graph, ql: int) -> "ConstructionContext":
        factors = list(factors)
        if len(factors) < 2:
            raise ValueError("need at least two leading factors (l >= 3)")
        if any(f.n < 2 for f in factors) or last.n < 2:
            raise ValueError("every factor must have at least two vertices")
        if not 1 <= ql <= last.n:
            raise ValueError(f"q_l must satisfy 1 <= q_l <= {last.n}, got {ql}")

        # move a minimum-order factor to the last leading position
        orders = [f.n for f in factors]
        low = max(i for i, q in enumerate(orders) if q == min(orders))
        perm = list(range(len(factors)))
        perm[low], perm[-1] = perm[-1], perm[low]
        factors = [factors[i] for i in perm]
        radices = tuple(f.n for f in factors)

        spec = radix_spec(*radices, ql)
        grid = np.unravel_index(np.arange(prod(radices)), radices)
        pdig = np.stack(grid, axis=1).astype(np.int64)

        tables = tuple(f.distance_matrix() for f in factors)
        pdist = np.zeros((len(pdig), len(pdig)), dtype=np.int64)
        bad = np.zeros_like(pdist, dtype=bool)
        for i, table in enumerate(tables):
            part = table[pdig[:, i][:, None], pdig[:, i][None, :]]
            bad |= part < 0
            pdist += part
        pdist[bad] = -1

        weights = np.array(spec.suffix[1:-1], dtype=np.int64)
        rad = np.array(radices, dtype=np.int64)
        shifted = (pdig[:, None, :] + pdig[None, :, :]) % rad
        shift_table = shifted @ weights

        return cls(tuple(factors), last, ql, tuple(perm), spec, pdig, pdist,
                   last.distance_matrix(), shift_table, tables)

    def offset_index(self, vec: Sequence[int]) -> int:
        idx = 0
        for a, q in zip(vec, self.spec.radices):
            idx = idx * q + int(a)
        return idx

    def distance(self, u: Sequence[int], v: Sequence[int]) -> float:
        """Distance in H between digit vectors ``(x_1..x_{l-1}, x)``."""
        total = 0
        tables = self.factor_dist + (self.last_dist,)
        for table, a, b in zip(tables, u, v):
            d = int(table[a, b])
            if d < 0:
                return float("inf")
            total += d
        return total


def phi_evaluate(ctx: ConstructionContext, A: OffsetSet, vertex: Sequence[int]) -> int:
    """Label of ``vertex = (x_1, ..., x_{l-1}, x)`` under the offsets ``A``."""
    *prefix, x = vertex
    if len(prefix) != ctx.l - 1:
        raise ValueError(f"vertex needs {ctx.l} coordinates")
    if not 0 <= x < len(A):
        raise ValueError(f"slice {x} has no offset yet (defined: 0..{len(A) - 1})")
    value = 0
    for i, (xi, q) in enumerate(zip(prefix, ctx.spec.radices)):
        if not 0 <= xi < q:
            raise ValueError(f"coordinate {xi} outside 0..{q - 1}")
        value += ((A[x][i] + xi) % q) * ctx.spec.suffix[i + 1]
    return value + residue(x, ctx.ql)


def slice_pair_ok(ctx: ConstructionContext, A: OffsetSet, u: Sequence[int], v: Sequence[int]) -> bool:
    """Whether ``u`` (in the newest slice) and ``v`` are separated enough."""
    if tuple(u) == tuple(v):
        raise ValueError("u and v must be distinct")
    d = ctx.distance(u, v)
    if d > ctx.l:
        return True
    need = ctx.ql if d == 1 else 1
    a, b = phi_evaluate(ctx, A, u), phi_evaluate(ctx, A, v)
    sep = abs(a - b)
    return min(sep, ctx.modulus - sep) >= need


def case1_filter_psi(ctx: ConstructionContext, a_y: Sequence[int], z: Sequence[int]) -> bool:
    """Accept ``z`` iff its shift against ``a_y`` is at least ``2 q_l`` cyclically.

    Conservative: an accepted candidate never breaks a pair of vertices that
    share their leading coordinates and sit in slices ``y`` and ``t``.
    """
    psi = sum(((zi - ai) % q) * n
              for zi, ai, q, n in zip(z, a_y, ctx.spec.radices, ctx.spec.suffix[1:]))
    n1 = ctx.modulus
    return min(psi, n1 - psi) >= 2 * ctx.ql


def _psi_mask(ctx: ConstructionContext, A: OffsetSet, t: int) -> np.ndarray:
    rad = np.array(ctx.spec.radices[:-1], dtype=np.int64)
    weights = np.array(ctx.spec.suffix[1:-1], dtype=np.int64)
    ok = np.ones(ctx.num_prefixes, dtype=bool)
    n1 = ctx.modulus
    for y in range(t):
        if ctx.last_dist[t, y] < 0 or ctx.last_dist[t, y] > ctx.l:
            continue
        psi = ((ctx.prefix_digits - np.array(A[y])) % rad) @ weights
        ok &= np.minimum(psi, n1 - psi) >= 2 * ctx.ql
    return ok


@dataclass
class OffsetChoice:
    t: int
    offset: tuple[int, ...]
    survivors: int
    rejected: int
    filtered: int = 0


def _inverse_slice(ctx: ConstructionContext, a_y: Sequence[int]) -> np.ndarray:
    # prefix sitting at each multiple of q_l within slice y
    row = ctx.shift_table[ctx.offset_index(a_y)] // ctx.ql
    inv = np.empty_like(row)
    inv[row] = np.arange(len(row))
    return inv


def _scan(ctx: ConstructionContext, A: OffsetSet, t: int, cands: np.ndarray, first: bool = False):
    """Pass mask over candidate offsets for slice ``t`` against slices ``< t``.

    Labels in one slice are distinct multiples of ``q_l`` shifted by the
    slice residue, so a new label can come within ``q_l`` of at most three
    labels of an earlier slice; only those pairs are looked up.  Pairs inside
    slice ``t`` are distinct multiples of ``q_l`` apart and always pass.
    With ``first`` the first violation per candidate is returned instead.
    """
    ql, l, n1 = ctx.ql, ctx.l, ctx.modulus
    m = n1 // ql
    rt = t % ql
    P = ctx.num_prefixes
    ok = np.ones(len(cands), dtype=bool)
    found: dict[int, dict] = {}
    step = max(1, _BLOCK_CELLS // max(P, 1))
    cols = np.arange(P)
    for y in range(t):
        g = int(ctx.last_dist[t, y])
        if g < 0 or g > l:
            continue
        inv = _inverse_slice(ctx, A[y])
        rd = rt - y % ql
        for k in (-1, 0, 1):
            diff = (k * ql + rd) % n1
            sep = min(diff, n1 - diff)
            if sep >= ql:
                continue
            for start in range(0, len(cands), step):
                block = cands[start:start + step]
                w = (ctx.shift_table[block] // ql - k) % m
                v = inv[w]
                d = ctx.prefix_dist[cols[None, :], v]
                total = d + g
                thr = np.where(total == 1, ql, 1)
                bad = (d >= 0) & (total <= l) & (sep < thr)
                if not first:
                    ok[start:start + step] &= ~bad.any(axis=1)
                    continue
                for i in np.flatnonzero(bad.any(axis=1)):
                    c = int(block[i])
                    if c in found:
                        continue
                    p = int(np.flatnonzero(bad[i])[0])
                    found[c] = {"candidate": [int(a) for a in ctx.prefix_digits[c]],
                                "u": [*map(int, ctx.prefix_digits[p]), t],
                                "v": [*map(int, ctx.prefix_digits[v[i, p]]), y],
                                "required": int(thr[i, p]), "observed": sep}
    if first:
        return found
    return ok


def candidate_mask(ctx: ConstructionContext, A: OffsetSet, use_psi_filter: bool = False):
    """Pass mask over all offset candidates for slice ``t = len(A)``, and the filtered count."""
    t = len(A)
    if not 1 <= t < ctx.q:
        raise ValueError(f"slice index {t} outside 1..{ctx.q - 1}")
    cands = np.arange(ctx.num_prefixes)
    mask = np.zeros(len(cands), dtype=bool)
    keep = np.ones(len(cands), dtype=bool)
    if use_psi_filter:
        keep = _psi_mask(ctx, A, t)
    mask[keep] = _scan(ctx, A, t, cands[keep])
    return mask, int((~keep).sum())


def stuck_report(ctx: ConstructionContext, A: OffsetSet) -> ConstructionStuck:
    t = len(A)
    found = _scan(ctx, A, t, np.arange(ctx.num_prefixes), first=True)
    return ConstructionStuck(t, [found[c] for c in sorted(found)])


def choose_offset(ctx: ConstructionContext, A: OffsetSet, use_psi_filter: bool = False) -> OffsetChoice:
    """Pick ``a(t)`` for ``t = len(A)``: the smallest candidate passing every check.

    Only pairs touching the new slice are checked; pairs among earlier
    slices do not depend on the new offset.  All candidates are evaluated so
    the number of survivors is known.
    """
    mask, filtered = candidate_mask(ctx, A, use_psi_filter)
    passing = np.flatnonzero(mask)
    if not len(passing):
        raise stuck_report(ctx, A)
    best = int(passing[0])
    return OffsetChoice(len(A), tuple(int(a) for a in ctx.prefix_digits[best]),
                        survivors=len(passing), rejected=ctx.num_prefixes - len(passing),
                        filtered=filtered)


def search_offsets(ctx: ConstructionContext, use_psi_filter: bool = False,
                   max_nodes: int = 5000) -> tuple[OffsetSet, list[OffsetChoice], int]:
    """Offsets for every slice: depth-first, candidates in lexicographic order.

    Equals the plain greedy run whenever that never gets stuck; otherwise
    the latest slice with an untried candidate is revised.  ``max_nodes``
    caps the number of candidate evaluations.
    """
    A = OffsetSet(ctx.spec.radices[:-1])
    levels: list[list] = []  # per slice t >= 1: [passing, next index, filtered]
    nodes = backtracks = 0
    deepest = None
    t = 1
    while t < ctx.q:
        if len(levels) < t:
            nodes += 1
            if nodes > max_nodes:
                break
            mask, filtered = candidate_mask(ctx, A, use_psi_filter)
            levels.append([np.flatnonzero(mask), 0, filtered])
        passing, idx, _ = levels[t - 1]
        if idx < len(passing):
            levels[t - 1][1] += 1
            del A.vectors[t:]
            A.append(ctx.prefix_digits[int(passing[idx])])
            t += 1
            continue
        if deepest is None or t > len(deepest):
            deepest = OffsetSet(A.radices, A.vectors[:t])
        levels.pop()
        backtracks += 1
        t -= 1
        if t == 0:
            break
    if t < ctx.q:
        if deepest is None:
            deepest = OffsetSet(A.radices, A.vectors[:t])
        raise stuck_report(ctx, deepest)
    steps = []
    for t, (passing, idx, filtered) in enumerate(levels, 1):
        steps.append(OffsetChoice(t, A[t], survivors=len(passing),
                                  rejected=ctx.num_prefixes - len(passing) - filtered,
                                  filtered=filtered))
    return A, steps, backtracks


def translation_reach(ctx: ConstructionContext) -> int:
    """Largest ``min_p d(p, p + delta)`` over prefix translations ``delta``.

    Two slices with equal residue always hold a pair of equal labels whose
    prefixes are at this distance or less.
    """
    moved = ctx.shift_table // ctx.ql
    d = ctx.prefix_dist[np.arange(ctx.num_prefixes)[None, :], moved]
    d = np.where(d < 0, np.iinfo(np.int64).max // 4, d)
    return int(d.min(axis=1).max())


def order_blocked(G: Graph, ql: int, reach: int, l: int) -> tuple[int, int] | None:
    """A pair of equal-residue slices too close in ``G`` for any offsets, if any."""
    dist = G.distance_matrix()
    for x in range(G.n):
        for y in range(x + ql, G.n, ql):
            if 0 <= dist[x, y] and dist[x, y] + reach <= l:
                return x, y
    return None


def residue_class_order(G: Graph, ql: int, sep: int, max_nodes: int = 100_000) -> list[int] | None:
    """Vertex order whose residues mod ``q_l`` keep equal classes more than ``sep`` apart.

    Slot ``i`` of the returned order receives residue ``i mod q_l``, so each
    class must get exactly as many vertices as there are slots with its
    residue.  Found by backtracking; ``None`` if there is none within budget.
    """
    n = G.n
    dist = G.distance_matrix()
    close = [np.flatnonzero((dist[v] >= 0) & (dist[v] <= sep) & (np.arange(n) != v)).tolist()
             for v in range(n)]
    caps = [len(range(r, n, ql)) for r in range(ql)]
    order = sorted(range(n), key=lambda v: (-len(close[v]), v))
    colour = [-1] * n
    nodes = 0

    def place(i: int) -> bool:
        nonlocal nodes
        if i == n:
            return True
        nodes += 1
        if nodes > max_nodes:
            return False
        v = order[i]
        banned = {colour[u] for u in close[v]}
        tried_caps = set()
        for c in range(ql):
            if caps[c] == 0 or c in banned:
                continue
            # colours with equal remaining capacity that are still unused are interchangeable
            fresh = all(colour[u] != c for u in range(n))
            key = (caps[c], len(range(c, n, ql)))
            if fresh and key in tried_caps:
                continue
            if fresh:
                tried_caps.add(key)
            colour[v] = c
            caps[c] -= 1
            if place(i + 1):
                return True
            caps[c] += 1
            colour[v] = -1
        return False

    if not place(0):
        return None
    slots = [[v for v in range(n) if colour[v] == r] for r in range(ql)]
    return [slots[i % ql][i // ql] for i in range(n)]


def relabel(G: Graph, order: Sequence[int]) -> Graph:
    """Copy of ``G`` with vertex ``order[i]`` renamed ``i``."""
    pos = {v: i for i, v in enumerate(order)}
    return Graph(G.n, [(pos[u], pos[v]) for u, v in G.edges()], name=G.name)


def candidate_slice_orders(G: Graph, ql: int, reach: int, l: int):
    """The given order first, then residue-class orders, most spread out first."""
    yield "given", list(range(G.n))
    if ql < 2 or G.n <= ql:
        return
    finite = G.distance_matrix()
    top = int(finite[finite >= 0].max())
    seen = set()
    for sep in range(top, max(1, l - reach) - 1, -1):
        order = residue_class_order(G, ql, sep)
        if order is not None and tuple(order) not in seen:
            seen.add(tuple(order))
            yield f"residue-separated>{sep}", order


@dataclass
class Construction:
    H: ProductGraph
    labelling: Labelling
    offsets: OffsetSet
    permutation: tuple[int, ...]
    steps: list[OffsetChoice]
    condition: Condition
    ql: int
    slice_order: tuple[int, ...] = ()
    slice_order_kind: str = "given"
    backtracks: int = 0

    @property
    def l(self) -> int:
        return len(self.H.factors)

    @property
    def modulus(self) -> int:
        return self.labelling.k

    @property
    def value(self) -> int:
        return self.labelling.k - 1

    def trace_json(self) -> dict:
        return {
            "permutation": list(self.permutation),
            "slice_order": list(self.slice_order),
            "slice_order_kind": self.slice_order_kind,
            "offsets": self.offsets.to_json(),
            "candidates_rejected_per_t": [s.rejected for s in self.steps],
            "candidates_surviving_per_t": [s.survivors for s in self.steps],
            "backtracks": self.backtracks,
            "modulus": self.modulus,
            "ql": self.ql,
            "condition": self.condition.to_json(),
        }


def construct_labelling(factors: Sequence[Graph], G: Graph, ql: int, *,
                        use_psi_filter: bool = False, check: bool = True,
                        H: ProductGraph | None = None, slice_order: Sequence[int] | None = None,
                        max_nodes: int = 5000) -> Construction:
    """Cyclic labelling of ``factors[0] x ... x factors[-1] x G`` with modulus ``N_1``.

    Labels are reported on the original coordinates.  Slices of ``G`` are
    taken in the given vertex order first.  If that order puts two
    equal-residue vertices too close together, or the offset search fails,
    orders that spread the residue classes of ``G`` apart are tried next.
    Pass ``slice_order`` to fix the order.  The product condition on factor
    orders is recorded but not enforced; outside it the construction may
    raise :class:`ConstructionStuck`.  With ``check`` the result is
    re-verified as a ``C(q_l, 1, ..., 1)`` labelling before it is returned.
    """
    factors = list(factors)
    cond = check_product_condition([f.n for f in factors], G.n)
    if not cond.holds:
        log.warning("product condition fails (%d <= %d); construction is opportunistic",
                    cond.lhs, cond.rhs)
    if H is None:
        H = cartesian_product(factors + [G])
    elif H.orders != tuple(f.n for f in factors) + (G.n,):
        raise ValueError("product graph does not match the factors")

    ctx = ConstructionContext.build(factors, G, ql)
    reach = translation_reach(ctx)
    if slice_order is not None:
        order = [int(v) for v in slice_order]
        if sorted(order) != list(range(G.n)):
            raise ValueError("slice_order must be a permutation of the vertices of G")
        orders = [("fixed", order)]
    else:
        orders = candidate_slice_orders(G, ql, reach, ctx.l)

    first_error = None
    for kind, order in orders:
        G2 = relabel(G, order)
        blocked = order_blocked(G2, ql, reach, ctx.l)
        if blocked is not None:
            log.info("slice order %s: slices %s share a residue but are too close", kind, blocked)
            if first_error is None:
                first_error = ConstructionStuck(blocked[1], [{"slices": list(blocked),
                                                             "reason": "equal residue, too close"}])
            continue
        if order != list(range(G.n)):
            ctx = ConstructionContext.build(factors, G2, ql)
        try:
            A, steps, backtracks = search_offsets(ctx, use_psi_filter, max_nodes)
            break
        except ConstructionStuck as exc:
            log.info("slice order %s: stuck at t=%d", kind, exc.t)
            first_error = first_error or exc
    else:
        raise first_error if first_error is not None else ConstructionStuck(0, [])

    digits = H.digits
    perm = list(ctx.permutation)
    prefix = digits[:, :-1][:, perm]
    strides = np.array(ctx.spec.suffix[1:-1], dtype=np.int64) // ql
    pidx = prefix @ strides
    pos = np.empty(G.n, dtype=np.int64)
    pos[order] = np.arange(G.n)
    x = pos[digits[:, -1]]
    offset_idx = np.array([ctx.offset_index(a) for a in A], dtype=np.int64)
    labels = ctx.shift_table[offset_idx[x], pidx] + x % ql
    phi = Labelling.cyclic(labels.tolist(), ctx.modulus)

    if check:
        report = verify_cyclic(H, HVector.leading(ql, ctx.l), phi)
        if not report.passed or not no_hole_cyclic(phi):
            raise AssertionError(f"constructed labelling fails verification: {report.violations[:3]}")
    return Construction(H, phi, A, ctx.permutation, steps, cond, ql,
                        tuple(order), kind, backtracks)
