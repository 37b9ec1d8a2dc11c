"""Arithmetic hypotheses and necessary conditions on factor orders.

Every checker returns a :class:`Condition` carrying all operands, so reports
can show exactly which numbers were compared.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Sequence


@dataclass
class Condition:
    name: str
    holds: bool
    lhs: int | None = None
    rhs: int | None = None
    relation: str = ""
    operands: dict = field(default_factory=dict)
    note: str = ""

    def __bool__(self):
        return self.holds

    def to_json(self) -> dict:
        out = {"name": self.name, "holds": self.holds, "lhs": self.lhs,
               "relation": self.relation, "rhs": self.rhs, "operands": self.operands}
        if self.note:
            out["note"] = self.note
        return out


def _orders(qs: Sequence[int], what: str) -> list[int]:
    qs = [int(q) for q in qs]
    if any(q < 1 for q in qs):
        raise ValueError(f"{what} must be positive integers, got {qs}")
    return qs


def check_product_condition(prefix_orders: Sequence[int], q: int) -> Condition:
    """``q_1...q_{l-1} > 3 (min q_i + 1) q`` for the leading factor orders."""
    qs = _orders(prefix_orders, "factor orders")
    if len(qs) < 2:
        raise ValueError("need at least two leading factors (l >= 3)")
    lhs = prod(qs)
    rhs = 3 * (min(qs) + 1) * q
    return Condition("product", lhs > rhs, lhs, rhs, ">",
                     {"prefix_orders": qs, "q": q, "min": min(qs)})


def check_hamming_condition(orders: Sequence[int], l: int) -> Condition:
    """``q_1...q_{l-1} > 3 (q_{l-1} + 1) q_l...q_d`` for sorted Hamming orders."""
    qs = _orders(orders, "orders")
    d = len(qs)
    if not 3 <= l < d:
        raise ValueError(f"need 3 <= l < d, got l={l}, d={d}")
    if any(a < b for a, b in zip(qs, qs[1:])):
        raise ValueError(f"orders must be nonincreasing, got {qs}")
    lhs = prod(qs[: l - 1])
    rhs = 3 * (qs[l - 2] + 1) * prod(qs[l - 1:])
    return Condition("hamming", lhs > rhs, lhs, rhs, ">", {"orders": qs, "l": l})


def check_hypercube_condition(d: int, q: int, l: int) -> Condition:
    """``(d + 4 + max(4 - q, 0)) / 2 <= l < d`` with ``d >= 6``, ``q >= 2``."""
    if d < 6 or q < 2:
        raise ValueError(f"need d >= 6 and q >= 2, got d={d}, q={q}")
    twice_lower = d + 4 + max(4 - q, 0)
    holds = twice_lower <= 2 * l and l < d
    return Condition("hamming_power", holds, None, None, "(d+4+max(4-q,0))/2 <= l < d",
                     {"d": d, "q": q, "l": l, "lower": twice_lower / 2, "upper": d})


def elementary_symmetric(values: Sequence[int], upto: int) -> list[int]:
    """``e_0..e_upto`` of ``values``."""
    e = [1] + [0] * upto
    for x in values:
        for i in range(upto, 0, -1):
            e[i] += e[i - 1] * x
    return e


def necessary_ball_condition(orders: Sequence[int], l: int) -> Condition:
    """Ball-packing necessary condition with radius ``floor(l/2)``.

    The inequality is evaluated exactly as ``q_1...q_l >= sum`` where ``sum``
    adds the elementary symmetric sums of ``(q_j - 1)`` up to the radius.  The
    ball itself has ``sum + 1`` vertices; that count and the comparison
    against it are reported alongside.
    """
    qs = _orders(orders, "orders")
    if not 1 <= l <= len(qs):
        raise ValueError(f"need 1 <= l <= d, got l={l}, d={len(qs)}")
    radius = l // 2
    e = elementary_symmetric([q - 1 for q in qs], radius)
    total = sum(e[1:])
    lhs = prod(qs[:l])
    ball = total + 1
    return Condition("ball", lhs >= total, lhs, total, ">=",
                     {"orders": qs, "l": l, "radius": radius, "ball_count": ball,
                      "holds_with_ball_count": lhs >= ball},
                     note="the ball has sum+1 vertices; the inequality compares against sum")


def necessary_neighbor_condition(orders: Sequence[int], l: int, h: int) -> Condition:
    """``q_1...q_l >= h + sum(q_i - 1)``."""
    qs = _orders(orders, "orders")
    if h < 1:
        raise ValueError("h must be >= 1")
    if not 1 <= l <= len(qs):
        raise ValueError(f"need 1 <= l <= d, got l={l}, d={len(qs)}")
    lhs = prod(qs[:l])
    rhs = h + sum(q - 1 for q in qs)
    return Condition("neighbour", lhs >= rhs, lhs, rhs, ">=", {"orders": qs, "l": l, "h": h})
