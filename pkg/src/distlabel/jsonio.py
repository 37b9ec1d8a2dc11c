"""JSON and DIMACS readers/writers for graphs and labellings."""

from __future__ import annotations

import json
from pathlib import Path

from .graphs import Graph, ProductGraph, cartesian_product


def graph_from_json(data: dict) -> Graph:
    """Inverse of ``Graph.to_json``; product graphs are rebuilt from their factors."""
    if "factors" in data:
        factors = [graph_from_json(f) for f in data["factors"]]
        g = cartesian_product(factors, name=data.get("name", ""))
        if "edges" in data:
            given = Graph(int(data["n"]), data["edges"])
            if given != g:
                raise ValueError("product graph edges disagree with its factors")
        return g
    return Graph(int(data["n"]), [tuple(e) for e in data.get("edges", [])], name=data.get("name", ""))


def read_dimacs(text: str, name: str = "") -> Graph:
    """Plain DIMACS edge format: ``p edge n m`` then ``e u v`` lines (1-based)."""
    n = None
    edges = []
    for lineno, line in enumerate(text.splitlines(), 1):
        parts = line.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] == "p":
            if len(parts) < 3:
                raise ValueError(f"line {lineno}: malformed problem line")
            n = int(parts[2])
        elif parts[0] == "e":
            if n is None:
                raise ValueError(f"line {lineno}: edge before problem line")
            u, v = int(parts[1]) - 1, int(parts[2]) - 1
            if u != v:
                edges.append((u, v))
        else:
            raise ValueError(f"line {lineno}: unknown record {parts[0]!r}")
    if n is None:
        raise ValueError("missing problem line")
    return Graph(n, edges, name=name)


def write_dimacs(G: Graph) -> str:
    lines = [f"p edge {G.n} {G.num_edges}"]
    lines += [f"e {u + 1} {v + 1}" for u, v in G.edges()]
    return "\n".join(lines) + "\n"


def load_graph(path: str | Path, fmt: str = "json") -> Graph:
    text = Path(path).read_text()
    if fmt == "dimacs":
        return read_dimacs(text, name=Path(path).stem)
    return graph_from_json(json.loads(text))


def dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=False) + "\n"
