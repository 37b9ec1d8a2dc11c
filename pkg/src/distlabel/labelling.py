"""Labellings and their verification.

A labelling is linear (plain nonnegative integers, normalised so the smallest
label is 0) or cyclic with modulus ``k`` (labels in ``0..k-1``, separations
measured with the k-cyclic distance).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .graphs import Graph

LINEAR = "linear"
CYCLIC = "cyclic"


@dataclass(frozen=True)
class HVector:
    """Separation requirements ``(h_1, ..., h_l)`` for distances ``1..l``."""

    entries: tuple[int, ...]

    def __post_init__(self):
        entries = tuple(int(h) for h in self.entries)
        if not entries:
            raise ValueError("separation vector needs at least one entry")
        if any(h < 0 for h in entries):
            raise ValueError(f"separations must be nonnegative, got {entries}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def of(cls, h) -> "HVector":
        if isinstance(h, HVector):
            return h
        if isinstance(h, str):
            return cls(tuple(int(x) for x in h.replace(" ", "").split(",") if x))
        if isinstance(h, (int, np.integer)):
            return cls((int(h),))
        return cls(tuple(h))

    @classmethod
    def leading(cls, h: int, l: int) -> "HVector":
        """The vector ``(h, 1, ..., 1)`` of length ``l``."""
        return cls((h,) + (1,) * (l - 1))

    @property
    def l(self) -> int:
        return len(self.entries)

    @property
    def h1(self) -> int:
        return self.entries[0]

    def is_monotone(self) -> bool:
        return all(a >= b for a, b in zip(self.entries, self.entries[1:]))

    def at(self, dist: int) -> int:
        """Required separation at distance ``dist`` (0 beyond ``l``)."""
        return self.entries[dist - 1] if 1 <= dist <= self.l else 0

    def as_array(self) -> np.ndarray:
        # index by distance; slot 0 (the vertex itself) is unconstrained
        return np.array((0,) + self.entries, dtype=np.int64)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __str__(self):
        return ",".join(map(str, self.entries))


@dataclass(frozen=True)
class Labelling:
    labels: tuple[int, ...]
    mode: str = LINEAR
    k: int | None = None

    def __post_init__(self):
        labels = tuple(int(x) for x in self.labels)
        if not labels:
            raise ValueError("a labelling needs at least one vertex")
        if self.mode == LINEAR:
            if self.k is not None:
                raise ValueError("linear labellings carry no modulus")
            if min(labels) < 0:
                raise ValueError("labels must be nonnegative")
            low = min(labels)
            labels = tuple(x - low for x in labels)
        elif self.mode == CYCLIC:
            if self.k is None or self.k < 1:
                raise ValueError(f"cyclic labelling needs modulus k >= 1, got {self.k!r}")
            bad = [x for x in labels if not 0 <= x < self.k]
            if bad:
                raise ValueError(f"cyclic labels must lie in 0..{self.k - 1}, got {bad[0]}")
        else:
            raise ValueError(f"unknown labelling mode {self.mode!r}")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def linear(cls, labels: Iterable[int]) -> "Labelling":
        return cls(tuple(labels))

    @classmethod
    def cyclic(cls, labels: Iterable[int], k: int) -> "Labelling":
        return cls(tuple(labels), CYCLIC, int(k))

    def as_linear(self) -> "Labelling":
        return Labelling.linear(self.labels)

    def __len__(self):
        return len(self.labels)

    def __getitem__(self, v):
        return self.labels[v]

    def to_json(self) -> dict:
        return {"mode": self.mode, "k": self.k, "labels": list(self.labels)}

    @classmethod
    def from_json(cls, data: dict) -> "Labelling":
        mode = data.get("mode", LINEAR)
        k = data.get("k")
        return cls(tuple(data["labels"]), mode, None if mode == LINEAR else k)


@dataclass(frozen=True, order=True)
class Violation:
    u: int
    v: int
    distance: int
    required: int
    observed: int

    def to_json(self) -> dict:
        return {"pair": [self.u, self.v], "distance": self.distance,
                "required": self.required, "observed": self.observed}


@dataclass
class VerificationReport:
    mode: str
    k: int | None
    h: tuple[int, ...]
    violations: list[Violation] = field(default_factory=list)
    pairs_checked: dict[int, int] = field(default_factory=dict)
    no_hole: bool = False
    span: int = 0

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.passed

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "mode": self.mode,
            "k": self.k,
            "h": list(self.h),
            "span": self.span,
            "no_hole": self.no_hole,
            "pairs_checked": {str(d): c for d, c in sorted(self.pairs_checked.items())},
            "violations": [v.to_json() for v in self.violations],
        }


def cyclic_distance(x: int, y: int, k: int) -> int:
    if k < 1:
        raise ValueError("modulus must be >= 1")
    if not (0 <= x < k and 0 <= y < k):
        raise ValueError(f"labels {x}, {y} must lie in 0..{k - 1}")
    d = abs(x - y)
    return min(d, k - d)


def span(phi: Labelling) -> int:
    if phi.mode == CYCLIC:
        return phi.k - 1
    return max(phi.labels) - min(phi.labels)


def no_hole_linear(phi: Labelling) -> bool:
    used = set(phi.labels)
    return max(used) - min(used) + 1 == len(used)


def no_hole_cyclic(phi: Labelling, k: int | None = None) -> bool:
    """True iff the used labels form one cyclic interval of Z_k."""
    k = phi.k if k is None else k
    if k is None:
        raise ValueError("cyclic no-hole check needs a modulus")
    used = {x % k for x in phi.labels}
    if len(used) == k:
        return True
    # an interval has exactly one used residue whose predecessor is unused
    starts = sum(1 for x in used if (x - 1) % k not in used)
    return starts == 1


def _sweep(G: Graph, h: HVector, labels: np.ndarray, k: int | None) -> tuple[list[Violation], dict[int, int]]:
    if len(labels) != G.n:
        raise ValueError(f"labelling covers {len(labels)} vertices, graph has {G.n}")
    req = h.as_array()
    l = h.l
    violations: list[Violation] = []
    counts = np.zeros(l + 1, dtype=np.int64)
    for u in range(G.n):
        row = G.distance_row(u, l)
        row[: u + 1] = -1  # each unordered pair once
        vs = np.flatnonzero(row > 0)
        if not len(vs):
            continue
        d = row[vs]
        counts += np.bincount(d, minlength=l + 1)
        sep = np.abs(labels[vs] - labels[u])
        if k is not None:
            sep = np.minimum(sep, k - sep)
        need = req[d]
        for j in np.flatnonzero(sep < need):
            violations.append(Violation(u, int(vs[j]), int(d[j]), int(need[j]), int(sep[j])))
    violations.sort()
    return violations, {i: int(c) for i, c in enumerate(counts) if i >= 1}


def verify_linear(G: Graph, h, phi: Labelling) -> VerificationReport:
    """Check ``|phi(u) - phi(v)| >= h_i`` for every pair at distance ``i <= l``."""
    h = HVector.of(h)
    labels = np.asarray(phi.labels, dtype=np.int64)
    viol, counts = _sweep(G, h, labels, None)
    lin = phi if phi.mode == LINEAR else phi.as_linear()
    return VerificationReport(LINEAR, None, h.entries, viol, counts,
                              no_hole_linear(lin), span(lin))


def verify_cyclic(G: Graph, h, phi: Labelling, k: int | None = None) -> VerificationReport:
    """Same sweep as :func:`verify_linear` with the k-cyclic distance."""
    h = HVector.of(h)
    k = phi.k if k is None else int(k)
    if k is None or k < 1:
        raise ValueError("cyclic verification needs a modulus k >= 1")
    bad = [x for x in phi.labels if not 0 <= x < k]
    if bad:
        raise ValueError(f"label {bad[0]} is outside 0..{k - 1}")
    labels = np.asarray(phi.labels, dtype=np.int64)
    viol, counts = _sweep(G, h, labels, k)
    return VerificationReport(CYCLIC, k, h.entries, viol, counts,
                              no_hole_cyclic(phi, k), k - 1)


def restrict(phi: Labelling, S: Sequence[int], X: Graph | None = None) -> Labelling:
    """Labels of the vertices ``S`` in the given order; mode is preserved.

    Linear restrictions are renormalised to start at 0.  ``X`` (the graph
    on ``S``) is only used to check sizes.
    """
    S = list(S)
    if X is not None and X.n != len(S):
        raise ValueError("graph order does not match the vertex set")
    if any(not 0 <= v < len(phi) for v in S):
        raise ValueError("vertex set is not inside the labelling's domain")
    labels = tuple(phi.labels[v] for v in S)
    if phi.mode == CYCLIC:
        return Labelling.cyclic(labels, phi.k)
    return Labelling.linear(labels)


@dataclass
class ColouringReport:
    proper: bool
    colours: tuple[int, ...] | None
    num_colours: int
    pairs_checked: int
    conflicts: list[tuple[int, int]]
    power_edges_checked: int = 0

    def to_json(self) -> dict:
        return {"proper": self.proper, "num_colours": self.num_colours,
                "pairs_checked": self.pairs_checked,
                "power_edges_checked": self.power_edges_checked,
                "conflicts": [list(c) for c in self.conflicts]}


def colouring_from_labelling(G: Graph, l: int, phi: Labelling,
                             power: Graph | None = None) -> ColouringReport:
    """Read ``phi`` as a colouring of ``G^l`` and check it is proper.

    Labels must differ on every pair within distance ``l``.  When ``power``
    (an explicit ``G^l``) is given the colouring is also checked edge by edge
    against it; otherwise pairs come from bounded distance sweeps.
    """
    labels = np.asarray(phi.labels, dtype=np.int64)
    viol, counts = _sweep(G, HVector((1,) * l), labels, None)
    conflicts = [(v.u, v.v) for v in viol]
    edges_checked = 0
    if power is not None:
        if power.n != G.n:
            raise ValueError("power graph has the wrong order")
        for u, v in power.edges():
            edges_checked += 1
            if labels[u] == labels[v] and (u, v) not in conflicts:
                conflicts.append((u, v))
    proper = not conflicts
    return ColouringReport(
        proper=proper,
        colours=tuple(phi.labels) if proper else None,
        num_colours=len(set(phi.labels)),
        pairs_checked=sum(counts.values()),
        conflicts=sorted(conflicts),
        power_edges_checked=edges_checked,
    )
