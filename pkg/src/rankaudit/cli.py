"""Command-line front end.

Subcommands: ``pagerank`` (print the ranking), ``audit`` (greedy
influence audit), ``baseline`` (reference selectors), ``oracle``
(exhaustive optimum) and ``bench`` (scaling or comparison runs).

Exit codes: 0 success, 2 usage error, 3 data error, 4 convergence
failure, 5 resource limit exceeded. Analytical CSV/JSON outputs are
byte-reproducible for identical inputs; ``bench`` timing columns are the
one documented exception. The environment variable ``RANKAUDIT_THREADS``
caps the numba thread pool (the bundled kernels are single-threaded, so
this only matters for user extensions).
"""

import argparse
import json
import os
import sys

import numpy as np

from .audit import audit, evaluate_delta_f, format_element
from .baselines import (DEFAULT_BRUTE_LIMIT, brute_force, hits,
                        select_degree, select_hits, select_pagerank,
                        select_random)
from .errors import RankAuditError, UsageError, ValidationError
from .graph import ElementKind, ElementSet, load_edge_list
from .harness import ExperimentConfig, emit_tables, run_comparison, run_scaling
from .losses import parse_loss
from .solvers import (DEFAULT_MAX_ITER, DEFAULT_TOL, TeleportSpec,
                      default_damping, pagerank)


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _int_list(text):
    return tuple(int(tok) for tok in text.split(",") if tok.strip())


def _add_graph_args(parser):
    parser.add_argument("--graph", required=True,
                        help="edge-list file: 'src dst [weight]' per line")
    parser.add_argument("--directed", action="store_true", default=None,
                        help="treat the graph as directed "
                        "(default: sidecar metadata, else undirected)")
    parser.add_argument("--norm", choices=["column", "raw"], default=None,
                        help="weight normalization "
                        "(default: sidecar metadata, else column)")


def _add_solver_args(parser):
    parser.add_argument("--damping", type=float, default=None,
                        help="damping factor in (0,1); default: half the "
                        "inverse dominant eigenvalue, printed to stderr")
    parser.add_argument("--tol", type=float, default=DEFAULT_TOL,
                        help=f"solver tolerance (default {DEFAULT_TOL})")
    parser.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER,
                        help=f"solver iteration cap (default {DEFAULT_MAX_ITER})")
    parser.add_argument("--teleport", default="uniform",
                        help="uniform | node:<label> | file:<path> "
                        "(default uniform)")


def _add_selection_args(parser):
    parser.add_argument("--kind", required=True,
                        choices=["edges", "nodes", "subgraph"])
    parser.add_argument("--k", required=True, type=_positive_int,
                        help="selection budget")
    parser.add_argument("--loss", default="l2sq",
                        help="l2sq | lp:<p> | softmax | energy:<matrix-file> "
                        "(default l2sq)")


def _add_output_args(parser):
    parser.add_argument("--out", default=None,
                        help="output directory (default: print to stdout)")
    parser.add_argument("--format", choices=["csv", "json"], default="csv")


def _resolve_teleport(arg, graph):
    if arg == "uniform":
        return TeleportSpec.uniform()
    if arg.startswith("node:"):
        return TeleportSpec.single_node(graph.node_id(arg[5:]))
    if arg.startswith("file:"):
        path = arg[5:]
        weights = np.zeros(graph.n)
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                text = line.strip()
                if not text or text.startswith("#"):
                    continue
                parts = text.split()
                if len(parts) != 2:
                    raise ValidationError(
                        f"{path}:{lineno}: expected 'label weight'")
                weights[graph.node_id(parts[0])] = float(parts[1])
        total = weights.sum()
        if total <= 0.0 or weights.min() < 0.0:
            raise ValidationError(
                f"{path}: teleport weights must be non-negative with "
                "positive total")
        return TeleportSpec.personalized(weights / total)
    raise UsageError(f"unknown teleport spec {arg!r}")


def _resolve_damping(args, graph):
    if args.damping is not None:
        return args.damping
    c = default_damping(graph)
    print(f"damping auto-selected: {c!r} (half the inverse dominant "
          "eigenvalue)", file=sys.stderr)
    return c


def _load_graph(args):
    return load_edge_list(args.graph, directed=args.directed,
                          norm_mode=args.norm)


def _write_or_print(text, out_dir, filename):
    if out_dir is None:
        sys.stdout.write(text)
        return
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, filename)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    print(f"wrote {path}", file=sys.stderr)


def _selection_csv(graph, kind, members, scores, deltas):
    lines = ["step,element,influence,delta_f"]
    for i, (member, score, delta) in enumerate(zip(members, scores, deltas), 1):
        label = format_element(graph, kind, member)
        lines.append(f"{i},{label},{float(score)!r},{float(delta)!r}")
    return "\n".join(lines) + "\n"


def _selection_json(graph, kind, members, scores, deltas, config):
    payload = {
        "kind": kind.value,
        "config": config,
        "steps": [
            {"step": i, "element": format_element(graph, kind, member),
             "influence": float(score), "delta_f": float(delta)}
            for i, (member, score, delta)
            in enumerate(zip(members, scores, deltas), 1)
        ],
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _prefix_deltas(graph, kind, members, loss, damping, teleport, tol,
                   max_iter):
    """Goodness of each selection prefix, so baselines share the audit shape."""
    deltas = []
    for end in range(1, len(members) + 1):
        subset = ElementSet(kind, tuple(members[:end]))
        deltas.append(evaluate_delta_f(graph, subset, loss=loss,
                                       damping=damping, teleport=teleport,
                                       tol=tol, max_iter=max_iter))
    return deltas


def _cmd_pagerank(args):
    graph = _load_graph(args)
    teleport = _resolve_teleport(args.teleport, graph)
    c = _resolve_damping(args, graph)
    ranking = pagerank(graph, teleport, c, args.tol, args.max_iter)
    if args.format == "json":
        payload = {
            "damping": c,
            "residual": ranking.residual,
            "iterations": ranking.iterations,
            "scores": {lab: val for lab, val
                       in zip(graph.labels, ranking.values)},
        }
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
        _write_or_print(text, args.out, "pagerank.json")
    else:
        _write_or_print(ranking.to_csv(graph.labels), args.out,
                        "pagerank.csv")
    return 0


def _cmd_audit(args):
    if args.kind == "subgraph" and args.k < 2:
        raise UsageError(
            "--kind subgraph needs --k of at least 2: a 1-node "
            "vertex-induced subgraph has no edges")
    graph = _load_graph(args)
    teleport = _resolve_teleport(args.teleport, graph)
    c = _resolve_damping(args, graph)
    loss = parse_loss(args.loss)
    result = audit(graph, args.kind, args.k, loss=loss, damping=c,
                   teleport=teleport, tol=args.tol, max_iter=args.max_iter,
                   normalized=args.normalized_pr,
                   abs_influence=args.abs_influence)
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    text = result.to_json() if args.format == "json" else result.to_csv()
    _write_or_print(text, args.out, f"audit_{args.kind}.{args.format}")
    return 0


def _cmd_baseline(args):
    graph = _load_graph(args)
    kind = ElementKind.parse(args.kind)
    teleport = _resolve_teleport(args.teleport, graph)
    c = _resolve_damping(args, graph)
    loss = parse_loss(args.loss)
    if args.method == "random":
        selection = select_random(graph, args.k, kind, seed=args.seed)
        scores = [0.0] * len(selection)
    elif args.method == "degree":
        selection = select_degree(graph, args.k, kind)
        degs = graph.degrees().astype(float)
        scores = _baseline_scores(graph, kind, selection, degs)
    elif args.method == "pagerank":
        selection = select_pagerank(graph, args.k, kind, damping=c,
                                    tol=args.tol, max_iter=args.max_iter)
        ranking = pagerank(graph, TeleportSpec.uniform(), c, args.tol,
                           args.max_iter)
        scores = _baseline_scores(graph, kind, selection, ranking.values)
    else:
        selection = select_hits(graph, args.k, kind, max_iter=args.max_iter)
        hs = hits(graph, max_iter=args.max_iter)
        if kind is ElementKind.EDGES:
            scores = [hs.hub[u] * hs.hub[v] + hs.auth[u] * hs.auth[v]
                      for u, v in selection.members]
        else:
            scores = [hs.hub[v] + hs.auth[v] for v in selection.members]
    deltas = _prefix_deltas(graph, kind, list(selection.members), loss, c,
                            teleport, args.tol, args.max_iter)
    config = {"method": args.method, "kind": kind.value, "k": args.k,
              "damping": c, "loss": loss.describe(),
              "teleport": teleport.describe(), "seed": args.seed}
    if args.format == "json":
        text = _selection_json(graph, kind, selection.members, scores,
                               deltas, config)
    else:
        text = _selection_csv(graph, kind, selection.members, scores, deltas)
    _write_or_print(text, args.out,
                    f"baseline_{args.method}_{kind.value}.{args.format}")
    return 0


def _baseline_scores(graph, kind, selection, node_scores):
    if kind is ElementKind.EDGES:
        out = []
        for u, v in selection.members:
            su, sv = node_scores[u], node_scores[v]
            mult = su if graph.directed else max(su, sv)
            out.append(float((su + sv) * mult))
        return out
    return [float(node_scores[v]) for v in selection.members]


def _cmd_oracle(args):
    graph = _load_graph(args)
    kind = ElementKind.parse(args.kind)
    teleport = _resolve_teleport(args.teleport, graph)
    c = _resolve_damping(args, graph)
    loss = parse_loss(args.loss)
    selection, delta = brute_force(graph, args.k, kind, loss=loss, damping=c,
                                   teleport=teleport, tol=args.tol,
                                   max_iter=args.max_iter, limit=args.limit)
    deltas = _prefix_deltas(graph, kind, list(selection.members), loss, c,
                            teleport, args.tol, args.max_iter)
    scores = [0.0] * len(selection)
    config = {"method": "oracle", "kind": kind.value, "k": args.k,
              "damping": c, "loss": loss.describe(),
              "teleport": teleport.describe(), "limit": args.limit,
              "delta_f": delta}
    if args.format == "json":
        text = _selection_json(graph, kind, selection.members, scores,
                               deltas, config)
    else:
        text = _selection_csv(graph, kind, selection.members, scores, deltas)
    _write_or_print(text, args.out, f"oracle_{kind.value}.{args.format}")
    return 0


def _cmd_bench(args):
    if args.mode == "compare":
        if not args.config:
            raise UsageError("bench --mode compare requires --config")
        cfg = ExperimentConfig.load(args.config)
        report = run_comparison(cfg)
        out_dir = args.out or cfg.out_dir
    else:
        if not args.sizes:
            raise UsageError("bench --mode scaling requires --sizes")
        report = run_scaling(args.sizes, args.ks, kind=args.kind,
                             avg_degree=args.avg_degree, seed=args.seed,
                             damping=args.damping, tol=args.tol,
                             max_iter=args.max_iter, repeats=args.repeats)
        out_dir = args.out or "."
    paths = emit_tables(report, out_dir, stem=f"bench_{args.mode}")
    for path in paths:
        print(f"wrote {path}", file=sys.stderr)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rankaudit",
        description="Explain PageRank-style rankings by finding the graph "
        "elements whose removal moves a ranking loss the most.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_rank = sub.add_parser("pagerank", help="print the ranking vector")
    _add_graph_args(p_rank)
    _add_solver_args(p_rank)
    _add_output_args(p_rank)
    p_rank.set_defaults(fn=_cmd_pagerank)

    p_audit = sub.add_parser("audit", help="greedy influence audit")
    _add_graph_args(p_audit)
    _add_selection_args(p_audit)
    _add_solver_args(p_audit)
    _add_output_args(p_audit)
    p_audit.add_argument("--normalized-pr", action="store_true",
                         help="audit the loss of the L1-normalized ranking "
                         "(squared-L2 loss only)")
    p_audit.add_argument("--abs-influence", action="store_true",
                         help="rank elements by |influence| instead of the "
                         "signed value")
    p_audit.set_defaults(fn=_cmd_audit)

    p_base = sub.add_parser("baseline", help="reference selectors")
    _add_graph_args(p_base)
    p_base.add_argument("--method", required=True,
                        choices=["random", "degree", "pagerank", "hits"])
    _add_selection_args(p_base)
    _add_solver_args(p_base)
    _add_output_args(p_base)
    p_base.add_argument("--seed", type=int, default=0,
                        help="seed for --method random (default 0)")
    p_base.set_defaults(fn=_cmd_baseline)

    p_oracle = sub.add_parser("oracle", help="exhaustive optimum")
    _add_graph_args(p_oracle)
    _add_selection_args(p_oracle)
    _add_solver_args(p_oracle)
    _add_output_args(p_oracle)
    p_oracle.add_argument("--limit", type=int, default=DEFAULT_BRUTE_LIMIT,
                          help="max subset evaluations before refusing "
                          f"(default {DEFAULT_BRUTE_LIMIT})")
    p_oracle.set_defaults(fn=_cmd_oracle)

    p_bench = sub.add_parser("bench", help="scaling or comparison runs")
    p_bench.add_argument("--mode", choices=["scaling", "compare"],
                         default="scaling")
    p_bench.add_argument("--config", default=None,
                         help="experiment config file (compare mode)")
    p_bench.add_argument("--sizes", type=_int_list, default=(),
                         help="comma-separated node counts (scaling mode)")
    p_bench.add_argument("--ks", type=_int_list, default=(10,),
                         help="comma-separated budgets (default 10)")
    p_bench.add_argument("--kind", choices=["edges", "nodes", "subgraph"],
                         default="edges")
    p_bench.add_argument("--avg-degree", type=float, default=10.0)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--repeats", type=int, default=3)
    p_bench.add_argument("--damping", type=float, default=None)
    p_bench.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p_bench.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    p_bench.add_argument("--out", default=None)
    p_bench.set_defaults(fn=_cmd_bench)
    return parser


def main(argv=None):
    if "RANKAUDIT_THREADS" in os.environ:
        try:
            import numba
            numba.set_num_threads(max(1, int(os.environ["RANKAUDIT_THREADS"])))
        except (ValueError, RuntimeError):
            pass
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except RankAuditError as exc:
        category = type(exc).__name__
        print(f"error [{category}]: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"error [DataError]: {exc}", file=sys.stderr)
        return 3


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
