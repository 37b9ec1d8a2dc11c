"""Construct, verify and certify optimal labellings of product graphs.

An experiment builds the offset-set labelling of ``H = G_1 x ... x G_{l-1} x G``,
verifies it in all four constraint families, and matches its span against
the lower bound forced by a vertex set of order ``N_1`` and diameter at most
``l``.  When the two meet, all four invariants equal ``N_1 - 1`` and the
labelling is an optimal colouring of ``H^l``.  Sandwich runs repeat the
checks on random graphs between the certificate and ``H``.
"""

from __future__ import annotations

import csv
import io
import logging
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import prod
from typing import Sequence

from .conditions import (
    Condition,
    check_hamming_condition,
    check_hypercube_condition,
    check_product_condition,
    necessary_ball_condition,
    necessary_neighbor_condition,
)
from .construction import Construction, ConstructionStuck, construct_labelling
from .graphs import (
    Graph,
    ProductGraph,
    cartesian_product,
    complete_graph,
    graph_from_edges,
    hamming_graph,
    path_graph,
)
from .labelling import (
    HVector,
    colouring_from_labelling,
    no_hole_cyclic,
    no_hole_linear,
    restrict,
    verify_cyclic,
    verify_linear,
)
from .solver import Certificate, certificate_check

log = logging.getLogger(__name__)

INVARIANTS = ("lambda", "nlambda", "sigma", "nsigma")


class CertificateMissing(ValueError):
    pass


@dataclass
class InstanceSpec:
    """One ``H = G_1 x ... x G_{l-1} x G`` with its target ``q_l`` and ``h``."""

    name: str
    factors: list[Graph]
    last: Graph
    h: int
    ql: int
    kind: str = "product"
    params: dict = field(default_factory=dict)
    g_star: tuple[int, ...] | None = None
    certificate: tuple[int, ...] | None = None
    seed: int | None = None

    def __post_init__(self):
        if len(self.factors) < 2:
            raise ValueError("need l >= 3, i.e. at least two leading factors")
        if any(f.n < 2 for f in self.factors) or self.last.n < 2:
            raise ValueError("every factor must have at least two vertices")
        if self.h < 1:
            raise ValueError("h must be >= 1")
        self._product = None

    @property
    def l(self) -> int:
        return len(self.factors) + 1

    @property
    def modulus(self) -> int:
        return prod(f.n for f in self.factors) * self.ql

    @property
    def product(self) -> ProductGraph:
        if self._product is None:
            self._product = cartesian_product(self.factors + [self.last], name=self.name)
        return self._product

    def with_h(self, h: int) -> "InstanceSpec":
        return InstanceSpec(self.name, self.factors, self.last, h, self.ql, self.kind,
                            dict(self.params), self.g_star, self.certificate, self.seed)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "name": self.name, "l": self.l, "h": self.h, "ql": self.ql}
        if self.kind in ("hamming", "hypercube", "non_hamming"):
            out.update(self.params)
        else:
            out["factors"] = [f.to_json() for f in self.factors]
            out["last"] = self.last.to_json()
        if self.g_star is not None:
            out["g_star"] = list(self.g_star)
        if self.certificate is not None:
            out["certificate"] = list(self.certificate)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "InstanceSpec":
        from .jsonio import graph_from_json

        kind = data.get("kind", "product")
        h = int(data.get("h", 1))
        if kind == "hamming":
            spec = hamming_instance(data["orders"], int(data["l"]), h, data.get("ql"))
        elif kind == "hypercube":
            spec = hypercube_instance(int(data["d"]), int(data["l"]), h)
        elif kind == "non_hamming":
            spec = non_hamming_instance(int(data["q1"]), int(data["l"]), data.get("middle"),
                                        data.get("ql"), data.get("q"), h)
        elif kind == "product":
            factors = [graph_from_json(f) for f in data["factors"]]
            last = graph_from_json(data["last"])
            spec = cls(data.get("name", "product"), factors, last, h, int(data["ql"]),
                       g_star=tuple(data["g_star"]) if data.get("g_star") is not None else None,
                       certificate=tuple(data["certificate"]) if data.get("certificate") is not None else None)
        else:
            raise ValueError(f"unknown instance kind {kind!r}")
        if "l" in data and int(data["l"]) != spec.l:
            raise ValueError(f"instance has l={spec.l} but l={data['l']} was requested")
        if data.get("name"):
            spec.name = data["name"]
        return spec


def hamming_instance(orders: Sequence[int], l: int, h: int, ql: int | None = None) -> InstanceSpec:
    """``H_{q_1..q_d}`` split as ``K_{q_1}, ..., K_{q_{l-1}}`` and the trailing product."""
    orders = [int(q) for q in orders]
    if not 3 <= l <= len(orders):
        raise ValueError(f"need 3 <= l <= d, got l={l}, d={len(orders)}")
    factors = [complete_graph(q) for q in orders[: l - 1]]
    tail = orders[l - 1:]
    last = hamming_graph(tail) if len(tail) > 1 else complete_graph(tail[0])
    ql = int(ql) if ql is not None else tail[0]
    name = "H(" + ",".join(map(str, orders)) + ")"
    return InstanceSpec(name, factors, last, h, ql, "hamming", {"orders": orders})


def hypercube_instance(d: int, l: int, h: int) -> InstanceSpec:
    spec = hamming_instance([2] * d, l, h, 2)
    spec.name = f"Q{d}"
    spec.kind = "hypercube"
    spec.params = {"d": d}
    return spec


def non_hamming_window(q1: int, middle: Sequence[int], ql: int) -> range:
    """Orders ``q`` of the last factor allowed by the non-Hamming recipe.

    ``q_2...q_{l-1} q_l <= q`` and ``3 (q_{l-1} + 1) q < q_1 q_2...q_{l-2} q_l``.
    """
    middle = list(middle)
    low = prod(middle) * ql
    top_num = q1 * prod(middle[:-1]) * ql
    den = 3 * (middle[-1] + 1)
    high = (top_num - 1) // den  # largest q with den * q < top_num
    return range(low, high + 1)


def _spread_graph(order: int, diam: int, ql: int) -> Graph:
    """Connected graph of the given order and diameter where ``u = v mod q_l`` means non-adjacent.

    Diameter 2 uses the complete multipartite graph on the residue classes.
    Otherwise a path ``0..diam`` carries the rest of the vertices, each joined
    to the vertices among ``0, 1, 2`` with a different residue.
    """
    if diam <= 2 and ql >= 2:
        edges = [(u, v) for u in range(order) for v in range(u + 1, order) if (v - u) % ql]
        return graph_from_edges(order, edges)
    edges = [(i, i + 1) for i in range(diam)]
    for v in range(diam + 1, order):
        near = [u for u in (0, 1, 2) if (v - u) % ql] or [1]
        edges += [(u, v) for u in near]
    return graph_from_edges(order, edges)


def non_hamming_instance(q1: int, l: int, middle: Sequence[int] | None = None,
                         ql: int | None = None, q: int | None = None,
                         h: int | None = None) -> InstanceSpec:
    """``K_{q_1} x P_{q_2} x ... x P_{q_{l-1}} x G`` meeting every hypothesis.

    ``G`` has order ``q`` and contains ``G*``: a caterpillar of order
    ``q_2...q_{l-1} q_l`` and diameter ``l - 1`` (or less when the order is too
    small to reach it).  ``K = K_{q_1} x G*`` is then a certificate of
    diameter at most ``l``.  Vertices of ``G`` with equal residue mod ``q_l``
    are never adjacent, which the offset construction needs.
    """
    if l < 3:
        raise ValueError("need l >= 3")
    middle = [2] * (l - 2) if middle is None else [int(x) for x in middle]
    if len(middle) != l - 2:
        raise ValueError(f"need {l - 2} middle orders, got {len(middle)}")
    if any(x < 2 for x in middle) or q1 < 2:
        raise ValueError("factor orders must be >= 2")
    qmin = middle[-1]
    if min([q1] + middle) != qmin:
        raise ValueError("the last middle order must be the minimum of the leading orders")
    if not 3 * qmin * (qmin + 1) < q1:
        raise ValueError(f"need 3 q_(l-1) (q_(l-1) + 1) < q_1: {3 * qmin * (qmin + 1)} >= {q1}")
    ql = qmin if ql is None else int(ql)
    if not 1 <= ql <= qmin:
        raise ValueError(f"need 1 <= q_l <= {qmin}, got {ql}")
    window = non_hamming_window(q1, middle, ql)
    if not len(window):
        raise ValueError(f"no admissible order q for q_1={q1}, middle={middle}, q_l={ql}")
    q = window[0] if q is None else int(q)
    if q not in window:
        raise ValueError(f"q={q} outside the admissible range {window.start}..{window.stop - 1}")

    star_order = prod(middle) * ql
    gstar = _spread_graph(star_order, min(l - 1, star_order - 1), ql)
    edges = gstar.edges() + [(1 if (j - 1) % ql else 0, j) for j in range(star_order, q)]
    G = graph_from_edges(q, edges, name=f"G{q}")
    factors = [complete_graph(q1)] + [path_graph(m) for m in middle]
    name = f"K{q1}x" + "x".join(f"P{m}" for m in middle) + f"x{G.name}"
    return InstanceSpec(name, factors, G, 1 if h is None else int(h), ql, "non_hamming",
                        {"q1": q1, "middle": middle, "q": q}, g_star=tuple(range(star_order)))


def _leaf_factors(G: Graph) -> list[Graph]:
    if isinstance(G, ProductGraph):
        return [leaf for f in G.factors for leaf in _leaf_factors(f)]
    return [G]


def _is_complete(G: Graph) -> bool:
    return G.num_edges == G.n * (G.n - 1) // 2


def canonical_certificate(PG: ProductGraph, l: int, ql: int,
                          g_star: Sequence[int] | None = None) -> Certificate:
    """Standard certificate vertex set, validated by :func:`certificate_check`.

    For products of complete graphs: the first ``l - 1`` coordinates free,
    coordinate ``l`` below ``q_l`` and the rest 0.  Otherwise ``g_star``, a
    vertex set of the last factor, gives ``G_1 x G*`` with every middle
    coordinate fixed at 0.
    """
    leaves = _leaf_factors(PG)
    if g_star is not None:
        if len(PG.factors) != l:
            raise ValueError(f"expected a product of {l} factors, got {len(PG.factors)}")
        allowed = set(g_star)
        verts = [v for v in range(PG.n)
                 if all(x == 0 for x in PG.decode(v)[1:-1]) and PG.decode(v)[-1] in allowed]
    elif all(_is_complete(f) for f in leaves) and len(leaves) >= l:
        flat = cartesian_product(leaves)
        if ql > leaves[l - 1].n:
            raise ValueError(f"q_l={ql} exceeds the order of factor {l}")
        verts = []
        for v in range(flat.n):
            dig = flat.decode(v)
            if dig[l - 1] < ql and all(x == 0 for x in dig[l:]):
                verts.append(v)
    else:
        raise CertificateMissing("no canonical certificate for this product; supply G* or a vertex set")
    return certificate_check(PG, verts, l)


def sandwich_sample(H: Graph, K: Sequence[int], density: float, seed: int) -> Graph:
    """Graph on V(H) with every H-edge inside K plus a Bernoulli sample of the rest."""
    if not 0 <= density <= 1:
        raise ValueError("density must lie in [0, 1]")
    inside = set(K)
    rng = random.Random(seed)
    edges = []
    for u, v in H.edges():
        if u in inside and v in inside:
            edges.append((u, v))
        elif rng.random() < density:
            edges.append((u, v))
    return Graph(H.n, edges, name=f"X(seed={seed})")


@dataclass
class ExperimentReport:
    name: str
    l: int
    h: int
    ql: int
    modulus: int
    conditions: list[Condition] = field(default_factory=list)
    guaranteed: bool = False
    constructed: int | None = None
    stuck: dict | None = None
    verification: dict = field(default_factory=dict)
    certificate: Certificate | None = None
    values: dict = field(default_factory=dict)
    chromatic: int | None = None
    colouring: dict | None = None
    reproduced: bool = False
    disconnected_factors: list[int] = field(default_factory=list)
    trace: dict | None = None
    timings: dict = field(default_factory=dict)
    construction: Construction | None = field(default=None, repr=False)

    def to_json(self) -> dict:
        return {
            "instance": self.name,
            "l": self.l,
            "h": self.h,
            "ql": self.ql,
            "modulus": self.modulus,
            "conditions": [c.to_json() for c in self.conditions],
            "guaranteed": self.guaranteed,
            "constructed": self.constructed,
            "stuck": self.stuck,
            "verification": self.verification,
            "certificate": self.certificate.to_json() if self.certificate else None,
            "values": self.values,
            "chromatic": self.chromatic,
            "colouring": self.colouring,
            "reproduced": self.reproduced,
            "disconnected_factors": self.disconnected_factors,
            "trace": self.trace,
            "timings": {k: round(v, 4) for k, v in self.timings.items()},
        }

    def summary_row(self) -> dict:
        product = next((c for c in self.conditions if c.name == "product"), None)
        return {
            "instance": self.name,
            "l": self.l,
            "h": self.h,
            "condition": product.holds if product else "",
            "constructed": "" if self.constructed is None else self.constructed,
            "certificate": "" if not self.certificate or self.certificate.bound is None
            else self.certificate.bound,
            "reproduced": self.reproduced,
        }


SUMMARY_COLUMNS = ["instance", "l", "h", "condition", "constructed", "certificate", "reproduced"]


def summary_csv(reports: Sequence[ExperimentReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SUMMARY_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.summary_row())
    return buf.getvalue()


def instance_conditions(spec: InstanceSpec) -> list[Condition]:
    conds = [check_product_condition([f.n for f in spec.factors], spec.last.n)]
    orders = spec.params.get("orders")
    if orders is not None:
        d, l = len(orders), spec.l
        if l < d and all(a >= b for a, b in zip(orders, orders[1:])):
            conds.append(check_hamming_condition(orders, l))
        if len(set(orders)) == 1 and d >= 6:
            conds.append(check_hypercube_condition(d, orders[0], l))
        conds.append(necessary_ball_condition(orders, l))
        conds.append(necessary_neighbor_condition(orders, l, spec.h))
    return conds


def instance_certificate(spec: InstanceSpec) -> Certificate:
    H = spec.product
    if spec.certificate is not None:
        return certificate_check(H, spec.certificate, spec.l)
    if spec.g_star is not None:
        return canonical_certificate(H, spec.l, spec.ql, spec.g_star)
    return canonical_certificate(H, spec.l, spec.ql)


def run_theorem_experiment(spec: InstanceSpec) -> ExperimentReport:
    """Construct, verify and certify; report partial results if construction sticks."""
    if not 1 <= spec.h <= spec.ql:
        raise ValueError(f"need 1 <= h <= q_l, got h={spec.h}, q_l={spec.ql}")
    clock = time.perf_counter
    n1 = spec.modulus
    report = ExperimentReport(spec.name, spec.l, spec.h, spec.ql, n1)
    report.conditions = instance_conditions(spec)
    report.guaranteed = report.conditions[0].holds
    report.disconnected_factors = [i for i, f in enumerate(spec.factors + [spec.last])
                                   if not f.is_connected()]
    H = spec.product

    t0 = clock()
    try:
        built = construct_labelling(spec.factors, spec.last, spec.ql, H=H)
    except ConstructionStuck as exc:
        report.stuck = {"t": exc.t, "candidates": len(exc.failures),
                        "first_failures": exc.failures[:5]}
        built = None
    report.timings["construct"] = clock() - t0

    t0 = clock()
    try:
        report.certificate = instance_certificate(spec)
    except CertificateMissing as exc:
        log.warning("%s", exc)
    report.timings["certificate"] = clock() - t0

    if built is None:
        return report
    report.construction = built
    report.trace = built.trace_json()
    report.constructed = built.value
    phi = built.labelling
    l, h = spec.l, spec.h

    t0 = clock()
    native = verify_cyclic(H, HVector.leading(spec.ql, l), phi)
    cyc = verify_cyclic(H, HVector.leading(h, l), phi)
    lin = verify_linear(H, HVector.leading(h, l), phi.as_linear())
    surjective = sorted(set(phi.labels)) == list(range(n1))
    report.verification = {
        "cyclic_ql": {"pass": native.passed, "no_hole": native.no_hole, "modulus": n1},
        "cyclic_h": {"pass": cyc.passed, "no_hole": cyc.no_hole, "modulus": n1,
                     "pairs_checked": sum(cyc.pairs_checked.values())},
        "linear_h": {"pass": lin.passed, "no_hole": lin.no_hole, "span": lin.span},
        "surjective": surjective,
    }
    report.timings["verify"] = clock() - t0

    verified = (native.passed and cyc.passed and lin.passed and cyc.no_hole
                and lin.no_hole and lin.span == n1 - 1 and surjective)
    cert = report.certificate
    certified = cert is not None and cert.accepted and cert.bound == n1 - 1
    report.reproduced = bool(verified and certified and built.value == cert.bound)
    if report.reproduced:
        report.values = {name: n1 - 1 for name in INVARIANTS}

    t0 = clock()
    col = colouring_from_labelling(H, l, phi)
    report.colouring = col.to_json()
    # a proper N_1-colouring plus an N_1-clique of H^l pins the chromatic number
    if col.proper and certified and col.num_colours == n1:
        report.chromatic = n1
    report.timings["colouring"] = clock() - t0
    return report


@dataclass
class SandwichReport:
    base: ExperimentReport
    density: float
    samples: list[dict] = field(default_factory=list)

    @property
    def reproduced_count(self) -> int:
        return sum(1 for s in self.samples if s["reproduced"])

    @property
    def all_reproduced(self) -> bool:
        return bool(self.samples) and self.reproduced_count == len(self.samples)

    def to_json(self) -> dict:
        return {"base": self.base.to_json(), "density": self.density,
                "reproduced": f"{self.reproduced_count}/{len(self.samples)}",
                "samples": self.samples}


def _check_sandwich(spec: InstanceSpec, base: ExperimentReport, density: float, seed: int) -> dict:
    H = spec.product
    n1, l, h = spec.modulus, spec.l, spec.h
    K = base.certificate.vertices
    X = sandwich_sample(H, K, density, seed)
    phi = restrict(base.construction.labelling, range(H.n), X)
    hv = HVector.leading(h, l)
    lin = verify_linear(X, hv, phi.as_linear())
    cyc = verify_cyclic(X, hv, phi)
    on_k = sorted(phi.labels[v] for v in K)
    bijective = on_k == list(range(n1))
    cert = certificate_check(X, K, l)
    col = colouring_from_labelling(X, l, phi)
    ok = (lin.passed and cyc.passed and lin.no_hole and no_hole_cyclic(phi)
          and lin.span == n1 - 1 and bijective and cert.accepted and cert.bound == n1 - 1
          and col.proper and col.num_colours == n1)
    return {
        "seed": seed,
        "edges": X.num_edges,
        "linear_pass": lin.passed,
        "cyclic_pass": cyc.passed,
        "no_hole": lin.no_hole and no_hole_linear(phi.as_linear()),
        "span": lin.span,
        "certificate_bijective": bijective,
        "certificate_bound": cert.bound,
        "colouring_proper": col.proper,
        "colours": col.num_colours,
        "values": {name: n1 - 1 for name in INVARIANTS} if ok else None,
        "chromatic": n1 if ok else None,
        "reproduced": bool(ok),
    }


def run_sandwich_experiment(spec: InstanceSpec, samples: int, seed: int, density: float = 0.5,
                            threads: int = 1, base: ExperimentReport | None = None) -> SandwichReport:
    """Check the restricted labelling on ``samples`` seeded graphs between K and H.

    Sample ``i`` uses seed ``seed + i``; results are ordered by seed.
    """
    base = run_theorem_experiment(spec) if base is None else base
    if not base.reproduced:
        raise ValueError("base experiment was not reproduced; nothing to sandwich")
    seeds = [seed + i for i in range(samples)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda s: _check_sandwich(spec, base, density, s), seeds))
    else:
        rows = [_check_sandwich(spec, base, density, s) for s in seeds]
    return SandwichReport(base, density, rows)
