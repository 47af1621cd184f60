"""Command-line front end: ``hyperlap <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data error (bad input files,
invalid hypergraphs, I/O failures), 3 a flow hit its iteration cap. When a
flow does not converge its last state and trace are still written.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from . import dynamics, ingest, operators, spectral_oracle
from .errors import HypergraphError, ParseError

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NOT_CONVERGED = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _tau(text: str):
    if text == "auto":
        return None
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("tau must be positive or 'auto'")
    return value


def _params(text: str) -> tuple[float, ...]:
    parts = text.split(",")
    if len(parts) != 5:
        raise argparse.ArgumentTypeError("expected five comma-separated exponents a,b,g,e,eta")
    return tuple(float(x) for x in parts)


def _boundary(text: str) -> list[tuple[str, float]]:
    pairs = []
    for item in text.split(","):
        label, sep, value = item.rpartition("=")
        if not sep or not label:
            raise argparse.ArgumentTypeError(f"bad boundary entry {item!r}, expected LABEL=VALUE")
        pairs.append((label.strip(), float(value)))
    return pairs


def _read_state_file(path) -> tuple[list[str], np.ndarray]:
    """``label,value`` CSV without a hypergraph to check labels against."""
    labels, values = [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"label", "value"} <= set(reader.fieldnames):
            raise ParseError("header must contain label,value", f"{path}:1")
        for row_no, row in enumerate(reader, start=2):
            try:
                values.append(float(row["value"]))
            except (TypeError, ValueError) as exc:
                raise ParseError(str(exc), f"{path}:{row_no}") from None
            labels.append(row["label"])
    return labels, np.array(values)


def _initial_state(init: str, h, sys_, seed: int) -> np.ndarray:
    kind, _, arg = init.partition(":")
    if kind == "zero":
        return np.zeros(h.n_vertices)
    if kind == "random":
        lo, hi = (float(x) for x in (arg or "-1,1").split(","))
        f = np.random.default_rng(seed).uniform(lo, hi, h.n_vertices)
        f -= np.dot(sys_.vertex_inner, f) / np.sum(sys_.vertex_inner)
        return f / np.sqrt(np.dot(sys_.vertex_inner * f, f))
    if kind == "file":
        return ingest.load_vertex_state(h, arg)
    raise HypergraphError(f"unknown --init {init!r}; use zero, random:LO,HI or file:PATH")


def _finish(result, h, args) -> int:
    ingest.save_vertex_state(h, result.final_state, args.out)
    if args.trace:
        ingest.save_trace(result.trace, args.trace)
    status = "converged" if result.converged else "NOT converged"
    print(f"{status} after {result.iterations} iterations (tau={result.tau:.6g})")
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def cmd_build(args) -> int:
    if args.input == "-":
        arcs = ingest.parse_edge_list(sys.stdin, args.max_lines, args.reverse_pairs)
    else:
        with open(args.input) as fh:
            arcs = ingest.parse_edge_list(fh, args.max_lines, args.reverse_pairs)
    print(
        f"{arcs.n_arcs} arcs on {arcs.n_labels} users "
        f"({arcs.self_loops_removed} self-loops, {arcs.duplicates_removed} duplicates dropped)"
    )
    if args.leader is not None or args.max_vertices is not None:
        arcs = ingest.extract_subnetwork(arcs, args.leader or "auto", args.max_vertices)
        print(f"sub-network: {arcs.n_labels} users, {arcs.n_arcs} arcs")
    if args.mode == "star":
        h = ingest.build_follower_star(arcs)
    else:
        h = ingest.build_pairwise(arcs)
    ingest.save_hypergraph(h, args.out)
    print(f"wrote {h.n_vertices} vertices, {h.n_hyperarcs} hyperarcs to {args.out}")
    return EXIT_OK


def cmd_apply(args) -> int:
    h = ingest.load_hypergraph(args.hg)
    params = operators.OperatorParams(*args.params, variant=args.variant)
    s = operators.assemble(h, params)
    if args.op in ("grad", "plap"):
        f = ingest.load_vertex_state(h, args.state)
        if args.op == "grad":
            ingest.save_hyperarc_state(h, operators.gradient(s, f), args.out)
        else:
            reg = args.regularization
            if reg is None:
                reg = operators.DEFAULT_REGULARIZATION if args.p < 2 else 0.0
            ingest.save_vertex_state(h, operators.p_laplacian(s, f, args.p, reg), args.out)
    else:
        F = ingest.load_hyperarc_state(h, args.state)
        op = operators.adjoint if args.op == "adjoint" else operators.divergence
        ingest.save_vertex_state(h, op(s, F), args.out)
    return EXIT_OK


def cmd_diffuse(args) -> int:
    h = ingest.load_hypergraph(args.hg)
    s = operators.assemble(h)
    f0 = _initial_state(args.init, h, s, args.seed)
    cfg = dynamics.FlowConfig(
        p=args.p,
        tau=args.tau,
        tolerance=args.tol,
        max_iterations=args.max_iter,
        regularization=args.regularization,
        seed=args.seed,
        renormalize=args.renormalize,
        record_every=args.record_every,
    )
    flow = dynamics.renormalized_flow if args.renormalize else dynamics.neumann_flow
    return _finish(flow(s, f0, cfg), h, args)


def cmd_dirichlet(args) -> int:
    h = ingest.load_hypergraph(args.hg)
    s = operators.assemble(h)
    bc = dynamics.BoundaryCondition([(h.index_of(lab), v) for lab, v in args.boundary])
    cfg = dynamics.FlowConfig(
        p=args.p,
        tau=args.tau,
        tolerance=args.tol,
        max_iterations=args.max_iter,
        regularization=args.regularization,
        record_every=args.record_every,
    )
    return _finish(dynamics.dirichlet_solve(s, np.zeros(h.n_vertices), bc, cfg), h, args)


def cmd_cluster(args) -> int:
    labels, f = _read_state_file(args.state)
    lab = dynamics.threshold(f, args.level)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["label", "value", "cluster"])
        for name, x, c in zip(labels, f, lab):
            w.writerow([name, repr(float(x)), int(c)])
    print(f"{int(np.sum(lab == 1))} vertices in +1, {int(np.sum(lab == -1))} in -1")
    return EXIT_OK


def cmd_eigen(args) -> int:
    h = ingest.load_hypergraph(args.hg)
    s = operators.assemble(h)
    w, v = spectral_oracle.eigendecomposition(spectral_oracle.dense_laplacian(s))
    k = min(args.k, w.size)
    with open(args.out, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["index", "eigenvalue", *h.labels])
        for j in range(k):
            out.writerow([j, repr(float(w[j])), *(repr(float(x)) for x in v[:, j])])
    return EXIT_OK


def _flow_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--hg", required=True, help="hypergraph JSON written by 'build'")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--tau", type=_tau, default=None, help="step size or 'auto' (default)")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=1_000_000)
    p.add_argument("--regularization", type=float, default=None,
                   help="smoothing for p < 2 (default 1e-8)")
    p.add_argument("--record-every", type=int, default=100)
    p.add_argument("--out", required=True)
    p.add_argument("--trace", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hyperlap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="edge list -> hypergraph JSON")
    p.add_argument("--input", required=True, help="whitespace edge list ('-' for stdin)")
    p.add_argument("--max-lines", type=int, default=None)
    p.add_argument("--reverse-pairs", action="store_true",
                   help="read lines as 'followed follower' instead of 'follower followed'")
    p.add_argument("--mode", choices=["star", "pairwise"], required=True)
    p.add_argument("--leader", default=None, help="label or 'auto' (most followers)")
    p.add_argument("--max-vertices", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("apply", help="evaluate one operator on a state")
    p.add_argument("--hg", required=True)
    p.add_argument("--op", choices=["grad", "adjoint", "div", "plap"], required=True)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--state", required=True,
                   help="label,value CSV (grad, plap) or index,value CSV (adjoint, div)")
    p.add_argument("--params", type=_params, default=(0.0,) * 5, help="alpha,beta,gamma,epsilon,eta")
    p.add_argument("--variant", choices=["general", "simplified"], default="general")
    p.add_argument("--regularization", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("diffuse", help="explicit p-Laplacian flow from an initial state")
    _flow_options(p)
    p.add_argument("--init", default="random:-1,1",
                   help="zero, random:LO,HI (zero mean, unit norm) or file:CSV")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--renormalize", action="store_true",
                   help="track g = (f - mean)/||f - mean|| (second eigenfunction)")
    p.set_defaults(func=cmd_diffuse)

    p = sub.add_parser("dirichlet", help="flow with fixed boundary values")
    _flow_options(p)
    p.add_argument("--boundary", type=_boundary, required=True, help='e.g. "L1=-1,L2=1"')
    p.set_defaults(func=cmd_dirichlet)

    p = sub.add_parser("cluster", help="threshold a state into +1/-1 labels")
    p.add_argument("--state", required=True)
    p.add_argument("--level", type=float, default=0.0,
                   help="values >= level get +1 (ties go to +1), others -1")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("eigen", help="dense 2-Laplacian spectrum (small hypergraphs only)")
    p.add_argument("--hg", required=True)
    p.add_argument("--k", type=int, default=5, help="number of smallest eigenpairs")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eigen)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (HypergraphError, OSError) as exc:
        print(f"hyperlap: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
