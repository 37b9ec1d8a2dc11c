"""Command-line front end: ``distlabel <subcommand> ...``.

Exit codes: 0 success, 1 verification failure, 2 construction stuck,
3 solver budget exhausted, 4 invalid input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .construction import ConstructionStuck, construct_labelling
from .graphs import (
    ProductGraph,
    cartesian_product,
    complete_graph,
    cycle_graph,
    graph_from_edges,
    graph_power,
    hamming_graph,
    hypercube,
    path_graph,
    star_graph,
)
from .jsonio import dumps, load_graph, write_dimacs
from .lab import (
    InstanceSpec,
    run_sandwich_experiment,
    run_theorem_experiment,
    summary_csv,
)
from .labelling import HVector, Labelling, no_hole_cyclic, verify_cyclic, verify_linear
from .solver import (
    DEFAULT_BUDGET,
    UnresolvedError,
    certificate_check,
    chromatic_exact,
    lambda_exact,
    nlambda_exact,
    nsigma_exact,
    sigma_exact,
)

OK, VERIFY_FAILED, STUCK, UNRESOLVED, BAD_INPUT = 0, 1, 2, 3, 4

SOLVERS = {
    "lambda": lambda_exact,
    "nlambda": nlambda_exact,
    "sigma": sigma_exact,
    "nsigma": nsigma_exact,
}


class InputError(ValueError):
    pass


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None


def _edge_list(text: str) -> list[tuple[int, int]]:
    edges = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            u, v = item.split("-")
            edges.append((int(u), int(v)))
        except ValueError:
            raise InputError(f"bad edge {item!r}; use u-v") from None
    return edges


def _emit(data, output: str | None):
    text = data if isinstance(data, str) else dumps(data)
    if output and output != "-":
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _read_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _graph(args, path=None):
    return load_graph(path or args.graph, args.format)


def cmd_gen(args) -> int:
    kind = args.kind
    if kind in ("complete", "path", "cycle", "star", "edges") and args.n is None:
        raise InputError(f"gen {kind} needs --n")
    if kind == "complete":
        G = complete_graph(args.n)
    elif kind == "path":
        G = path_graph(args.n)
    elif kind == "cycle":
        G = cycle_graph(args.n)
    elif kind == "star":
        G = star_graph(args.n)
    elif kind == "edges":
        G = graph_from_edges(args.n, _edge_list(args.edges or ""))
    elif kind == "hamming":
        if not args.orders:
            raise InputError("gen hamming needs --orders")
        G = hamming_graph(_ints(args.orders))
    else:
        if args.d is None:
            raise InputError("gen hypercube needs --d")
        G = hypercube(args.d)
    _emit(write_dimacs(G) if args.to == "dimacs" else G.to_json(), args.output)
    return OK


def cmd_product(args) -> int:
    factors = [_graph(args, p) for p in args.graphs]
    _emit(cartesian_product(factors, name=args.name or "").to_json(), args.output)
    return OK


def cmd_power(args) -> int:
    _emit(graph_power(_graph(args), args.l).to_json(), args.output)
    return OK


def _split(args):
    """Leading factors and last factor for ``construct``."""
    l = args.l
    if args.hamming:
        orders = _ints(args.hamming)
    elif args.hypercube:
        orders = [2] * args.hypercube
    else:
        orders = None
    if orders is not None:
        if not 3 <= l <= len(orders):
            raise InputError(f"need 3 <= l <= d, got l={l}, d={len(orders)}")
        leaves = [complete_graph(q) for q in orders]
    else:
        if not args.graph:
            raise InputError("construct needs --hamming, --hypercube or a product graph file")
        G = _graph(args)
        if not isinstance(G, ProductGraph):
            raise InputError("construct needs a product graph (JSON with factors)")
        leaves = list(G.factors)
        if not 3 <= l <= len(leaves):
            raise InputError(f"need 3 <= l <= number of factors ({len(leaves)}), got {l}")
    tail = leaves[l - 1:]
    last = tail[0] if len(tail) == 1 else cartesian_product(tail)
    return leaves[: l - 1], last, tail[0].n


def cmd_construct(args) -> int:
    factors, last, first_tail = _split(args)
    ql = args.ql if args.ql is not None else first_tail
    h = args.h if args.h is not None else ql
    if not 1 <= h <= ql:
        raise InputError(f"need 1 <= h <= q_l, got h={h}, q_l={ql}")
    try:
        built = construct_labelling(factors, last, ql, check=False)
    except ConstructionStuck as exc:
        print(f"construction stuck at t={exc.t}", file=sys.stderr)
        _emit({"stuck": {"t": exc.t, "first_failures": exc.failures[:10]}}, args.output)
        return STUCK
    H, phi = built.H, built.labelling
    hv = HVector.leading(h, built.l)
    cyc = verify_cyclic(H, hv, phi)
    lin = verify_linear(H, hv, phi.as_linear())
    passed = cyc.passed and lin.passed and no_hole_cyclic(phi)
    _emit({
        "labelling": phi.to_json(),
        "span": built.value,
        "trace": built.trace_json(),
        "verification": {"cyclic": cyc.to_json(), "linear": lin.to_json()},
    }, args.output)
    print(f"span {built.value}, verification {'passed' if passed else 'FAILED'}", file=sys.stderr)
    return OK if passed else VERIFY_FAILED


def cmd_solve(args) -> int:
    G = _graph(args)
    if args.variant == "chromatic":
        res = chromatic_exact(G, args.budget)
    else:
        res = SOLVERS[args.variant](G, HVector.of(args.h), args.budget, oracle=args.oracle)
    _emit(res.to_json(), args.output)
    return OK


def cmd_verify(args) -> int:
    G = _graph(args)
    data = _read_json(args.labelling)
    if "labelling" in data:
        data = data["labelling"]
    phi = Labelling.from_json(data)
    hv = HVector.of(args.h)
    if args.k is not None or phi.mode == "cyclic":
        k = args.k if args.k is not None else phi.k
        report = verify_cyclic(G, hv, Labelling.cyclic(phi.labels, k), k)
    else:
        report = verify_linear(G, hv, phi)
    _emit(report.to_json(), args.output)
    return OK if report.passed else VERIFY_FAILED


def cmd_certify(args) -> int:
    G = _graph(args)
    if args.vertices:
        S = _ints(args.vertices)
    elif args.vertex_file:
        S = _read_json(args.vertex_file)
    else:
        raise InputError("certify needs --vertices or --vertex-file")
    cert = certificate_check(G, S, args.l)
    out = cert.to_json()
    out["vertices"] = list(cert.vertices)
    _emit(out, args.output)
    return OK if cert.accepted else VERIFY_FAILED


def _load_specs(path: str) -> list[InstanceSpec]:
    data = _read_json(path)
    items = data if isinstance(data, list) else data.get("instances", [data])
    return [InstanceSpec.from_json(item) for item in items]


def cmd_experiment(args) -> int:
    specs = _load_specs(args.spec)
    if args.threads > 1 and len(specs) > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            reports = list(pool.map(run_theorem_experiment, specs))
    else:
        reports = [run_theorem_experiment(s) for s in specs]
    _emit([r.to_json() for r in reports] if len(reports) > 1 else reports[0].to_json(), args.output)
    if args.csv:
        Path(args.csv).write_text(summary_csv(reports))
    for r in reports:
        print(f"{r.name} l={r.l} h={r.h}: constructed={r.constructed} "
              f"reproduced={r.reproduced}", file=sys.stderr)
    if any(r.stuck for r in reports):
        return STUCK
    return OK if all(r.reproduced for r in reports) else VERIFY_FAILED


def cmd_sandwich(args) -> int:
    specs = _load_specs(args.spec)
    if len(specs) != 1:
        raise InputError("sandwich takes a single instance")
    base = run_theorem_experiment(specs[0])
    if base.stuck:
        print(f"construction stuck at t={base.stuck['t']}", file=sys.stderr)
        return STUCK
    if not base.reproduced:
        _emit({"base": base.to_json()}, args.output)
        return VERIFY_FAILED
    report = run_sandwich_experiment(specs[0], args.samples, args.seed, args.density,
                                     args.threads, base=base)
    _emit(report.to_json(), args.output)
    print(f"{report.reproduced_count}/{len(report.samples)} reproduced", file=sys.stderr)
    return OK if report.all_reproduced else VERIFY_FAILED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="output file (default stdout)")
    common.add_argument("--format", choices=["json", "dimacs"], default="json",
                        help="format of graph input files")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="distlabel", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate a graph")
    g.add_argument("kind", choices=["complete", "path", "cycle", "star", "hamming", "hypercube", "edges"])
    g.add_argument("--n", type=int)
    g.add_argument("--d", type=int)
    g.add_argument("--orders")
    g.add_argument("--edges", help="u-v,u-v,...")
    g.add_argument("--to", choices=["json", "dimacs"], default="json")
    g.set_defaults(func=cmd_gen)

    g = sub.add_parser("product", parents=[common], help="Cartesian product of graph files")
    g.add_argument("graphs", nargs="+")
    g.add_argument("--name")
    g.set_defaults(func=cmd_product)

    g = sub.add_parser("power", parents=[common], help="l-th power of a graph")
    g.add_argument("graph")
    g.add_argument("--l", type=int, required=True)
    g.set_defaults(func=cmd_power)

    g = sub.add_parser("construct", parents=[common], help="offset-set labelling of a product")
    g.add_argument("graph", nargs="?")
    g.add_argument("--hamming", help="orders q1,...,qd")
    g.add_argument("--hypercube", type=int, metavar="D")
    g.add_argument("--l", type=int, required=True)
    g.add_argument("--ql", type=int)
    g.add_argument("--h", type=int)
    g.set_defaults(func=cmd_construct)

    g = sub.add_parser("solve", parents=[common], help="exact invariant by backtracking")
    g.add_argument("graph")
    g.add_argument("--variant", choices=[*SOLVERS, "chromatic"], required=True)
    g.add_argument("--h", default="1")
    g.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    g.add_argument("--oracle", action="store_true", help="exhaustive search without bounds")
    g.set_defaults(func=cmd_solve)

    g = sub.add_parser("verify", parents=[common], help="check a labelling")
    g.add_argument("graph")
    g.add_argument("labelling")
    g.add_argument("--h", required=True)
    g.add_argument("--k", type=int, help="cyclic modulus")
    g.set_defaults(func=cmd_verify)

    g = sub.add_parser("certify", parents=[common], help="diameter certificate for a vertex set")
    g.add_argument("graph")
    g.add_argument("--l", type=int, required=True)
    g.add_argument("--vertices")
    g.add_argument("--vertex-file")
    g.set_defaults(func=cmd_certify)

    g = sub.add_parser("experiment", parents=[common], help="construct, verify and certify")
    g.add_argument("--spec", required=True)
    g.add_argument("--csv")
    g.set_defaults(func=cmd_experiment)

    g = sub.add_parser("sandwich", parents=[common], help="check graphs between K and H")
    g.add_argument("--spec", required=True)
    g.add_argument("--samples", type=int, default=20)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--density", type=float, default=0.5)
    g.set_defaults(func=cmd_sandwich)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return BAD_INPUT if exc.code else OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return BAD_INPUT
    try:
        return args.func(args)
    except UnresolvedError as exc:
        print(f"unresolved: {exc}", file=sys.stderr)
        return UNRESOLVED
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
