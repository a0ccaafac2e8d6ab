"""Command-line interface: graph generation, route tracing, scaling sweeps,
and self-verification suites.

Exit codes: 0 success, 1 a verification check failed, 2 usage, parameter,
or I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys

import numpy as np

from . import analysis, genmodel, routing
from .genmodel import GraphFormatError, ModelParams
from .geometry import torus_distance


def _model_flags(p, with_seed=True):
    p.add_argument("--n", type=float, required=True, help="expected node count")
    p.add_argument("--c", type=float, default=4.0, help="local radius constant")
    p.add_argument("--alpha", type=float, default=2.0, help="shortcut exponent")
    p.add_argument("--dbar", type=float, default=1.0,
                   help="target expected incident shortcut degree")
    if with_seed:
        p.add_argument("--seed", type=int, default=0)
    p.add_argument("--degree-convention", choices=["incident", "generated"],
                   default="incident")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pswg", description=__doc__)
    sub = ap.add_subparsers(dest="subcommand", required=True)

    g = sub.add_parser("generate", help="sample a graph and write it to a file")
    _model_flags(g)
    g.add_argument("--graph-out", required=True)

    r = sub.add_parser("route", help="route one message on a stored graph")
    r.add_argument("--graph-in", required=True)
    r.add_argument("--source", default="random", help="node id or 'random'")
    r.add_argument("--dest", default="random", help="node id or 'random'")
    r.add_argument("--algo", choices=["approx_greedy", "pure_greedy"],
                   default="approx_greedy")
    r.add_argument("--hop-budget", type=int, default=None)
    r.add_argument("--trace", action="store_true",
                   help="print one line per hop after the JSON summary")
    r.add_argument("--seed", type=int, default=0,
                   help="seed for random source/destination selection")

    s = sub.add_parser("sweep", help="hop-count scaling experiment over an n grid")
    s.add_argument("--n-grid", required=True,
                   help="comma-separated strictly increasing list of n values")
    s.add_argument("--alpha", type=float, default=2.0)
    s.add_argument("--c", type=float, default=4.0)
    s.add_argument("--dbar", type=float, default=1.0)
    s.add_argument("--seeds", type=int, default=10, help="graphs per n")
    s.add_argument("--pairs", type=int, default=20, help="routed pairs per graph")
    s.add_argument("--algo", choices=["approx_greedy", "pure_greedy"],
                   default="approx_greedy")
    s.add_argument("--base-seed", type=int, default=0)
    s.add_argument("--fit", choices=["powerlaw", "polylog"], default=None,
                   help="print a fit report as JSON to stdout")
    s.add_argument("--out", default=None, help="CSV output path (default stdout)")

    v = sub.add_parser("verify", help="run a property/verification suite")
    v.add_argument("--suite", choices=["model", "routing", "scaling", "all"],
                   default="all")
    v.add_argument("--n", type=float, default=2048)
    v.add_argument("--seed", type=int, default=1)
    v.add_argument("--seeds", type=int, default=3, help="seeds per check")
    return ap


def cmd_generate(args) -> int:
    params = ModelParams(n=args.n, c=args.c, alpha=args.alpha, dbar=args.dbar,
                         seed=args.seed, degree_convention=args.degree_convention)
    graph = genmodel.generate(params)
    genmodel.save_graph(graph, args.graph_out)
    print(json.dumps({
        "n_nodes": graph.n_nodes,
        "local_edges": int(graph.local_edges.shape[0]),
        "shortcut_edges": int(graph.shortcut_edges.shape[0]),
        "mean_shortcut_degree": graph.mean_shortcut_degree,
        "graph_out": args.graph_out,
    }))
    return 0


def cmd_route(args) -> int:
    graph = genmodel.load_graph(args.graph_in)
    if graph.n_nodes == 0:
        raise ValueError("cannot route on an empty graph")
    rng = np.random.default_rng(args.seed)
    s = int(rng.integers(graph.n_nodes)) if args.source == "random" else int(args.source)
    t = int(rng.integers(graph.n_nodes)) if args.dest == "random" else int(args.dest)
    route = (routing.route_approx_greedy if args.algo == "approx_greedy"
             else routing.route_pure_greedy)
    res = route(graph, s, t, hop_budget=args.hop_budget, collect_trace=args.trace)
    out = dataclasses.asdict(res)
    trace = out.pop("trace")
    print(json.dumps(out))
    if args.trace and trace:
        print("\n".join(trace))
    return 0


def cmd_sweep(args) -> int:
    try:
        n_grid = tuple(int(v) for v in args.n_grid.split(","))
    except ValueError:
        raise ValueError(f"malformed --n-grid {args.n_grid!r}")
    config = analysis.SweepConfig(n_grid=n_grid, alpha=args.alpha, c=args.c,
                                  dbar=args.dbar, seeds_per_n=args.seeds,
                                  pairs_per_graph=args.pairs, algorithm=args.algo,
                                  base_seed=args.base_seed)
    records = analysis.run_sweep(config)
    csv_text = analysis.records_to_csv(records)
    if args.out:
        with open(args.out, "w") as f:
            f.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    if records and all(r.status == "error" for r in records):
        print("all trials failed", file=sys.stderr)
        return 2
    if args.fit:
        report = analysis.fit_scaling(records, args.fit)
        threshold = analysis.lower_bound_threshold(args.alpha)
        payload = json.loads(report.to_json())
        payload["hop_exponent_threshold"] = threshold
        print(json.dumps(payload))
    return 0


class _Checker:
    def __init__(self):
        self.failed = 0

    def check(self, name: str, ok: bool, detail: str = ""):
        if ok:
            print(f"{name}: pass")
        else:
            self.failed += 1
            print(f"{name}: FAIL" + (f" ({detail})" if detail else ""))


def _hand_instance() -> genmodel.Graph:
    """Four collinear nodes with one shortcut; routes are known by hand."""
    n = 400.0  # L = 20
    params = ModelParams(n=n, c=4.0 / math.log(n), alpha=2.0, dbar=1.0, seed=0)
    pos = np.array([[0.0, 0.0], [3.0, 0.0], [4.5, 0.0], [6.0, 0.0]])
    local = np.array([[1, 2], [2, 3]], dtype=np.int32)
    shortcut = np.array([[0, 1]], dtype=np.int32)
    return genmodel.Graph.build(params, pos, local, shortcut)


def _verify_model(ck: _Checker, n: float, seeds: int):
    for k in range(seeds):
        params = ModelParams(n=n, c=4.0, alpha=2.0, dbar=1.0, seed=k)
        pos = genmodel.sample_points(params)
        grid = genmodel.build_cell_grid(pos, params.L, params.r_n)
        fast = genmodel.sample_shortcuts_fast(pos, grid, params)
        exact = genmodel.sample_shortcuts_exact(pos, params)
        ck.check(f"fast_sampler == exact_sampler (seed {k})",
                 fast.shape == exact.shape and bool(np.all(fast == exact)))
    degs = []
    for k in range(seeds):
        params = ModelParams(n=n, c=4.0, alpha=2.0, dbar=1.0, seed=100 + k)
        graph = genmodel.generate(params)
        try:
            graph.validate()
            ck.check(f"graph invariants (seed {100 + k})", True)
        except ValueError as exc:
            ck.check(f"graph invariants (seed {100 + k})", False, str(exc))
        degs.append(graph.mean_shortcut_degree)
    mean_deg = float(np.mean(degs))
    ck.check("mean shortcut degree near dbar",
             abs(mean_deg - 1.0) < 0.2, f"grand mean {mean_deg:.4f}")
    params = ModelParams(n=n, c=4.0, alpha=2.0, dbar=1.0, seed=7)
    g1 = genmodel.generate(params)
    g2 = genmodel.generate(params)
    text = genmodel.dumps_graph(g1)
    ck.check("generation deterministic per seed",
             text == genmodel.dumps_graph(g2))
    ck.check("serialisation round-trips byte-identically",
             genmodel.dumps_graph(genmodel.loads_graph(text)) == text)
    empty = genmodel.Graph.build(params, np.empty((0, 2)),
                                 np.empty((0, 2), np.int32), np.empty((0, 2), np.int32))
    ck.check("empty graph degenerate cases",
             empty.mean_shortcut_degree == 0.0
             and analysis.estimate_annulus_count(empty, (0.0, 0.0), 5.0) == 0)


def _verify_routing(ck: _Checker, n: float, seed: int):
    g = _hand_instance()
    res = routing.route_approx_greedy(g, 0, 3)
    ck.check("hand instance: annulus route s->a->b->t",
             res.path == [0, 1, 2, 3] and res.hops_total == 3
             and res.hops_shortcut == 1 and res.phases == 2
             and res.status == "delivered",
             f"got path={res.path} phases={res.phases}")
    res = routing.route_pure_greedy(g, 0, 3)
    ck.check("hand instance: greedy route s->a->b->t",
             res.path == [0, 1, 2, 3] and res.hops_total == 3)
    res = routing.route_approx_greedy(g, 2, 2)
    ck.check("self route is zero hops", res.hops_total == 0
             and res.status == "delivered")

    params = ModelParams(n=n, c=4.0, alpha=2.0, dbar=1.0, seed=seed)
    graph = genmodel.generate(params)
    rng = np.random.default_rng(seed)
    ok = True
    delivered = 0
    for _ in range(50):
        s, t = (int(v) for v in rng.integers(graph.n_nodes, size=2))
        res = routing.route_approx_greedy(graph, s, t)
        if res.status == "delivered":
            delivered += 1
            ok = ok and routing.replay_path(graph, res.path)
    ck.check("sampled routes replay against adjacency", ok,
             f"{delivered}/50 delivered")
    samples = 0
    holds = 0
    for _ in range(200):
        x = int(rng.integers(graph.n_nodes))
        t = rng.uniform(0, graph.L, 2)
        if torus_distance(graph.L, graph.pos[x], t) < graph.r_n:
            continue
        samples += 1
        holds += routing.has_closer_local_contact(graph, x, t)
    ck.check("closer-local-contact property holds on samples",
             samples > 0 and holds == samples, f"{holds}/{samples}")


def _verify_scaling(ck: _Checker, seeds: int):
    grid = (1024, 2048, 4096, 8192)
    for alpha in (1.0, 2.0, 3.0):
        config = analysis.SweepConfig(n_grid=grid, alpha=alpha, seeds_per_n=seeds,
                                      pairs_per_graph=10)
        records = analysis.run_sweep(config)
        failures = sum(r.status != "delivered" for r in records)
        ck.check(f"alpha={alpha:g}: failure rate < 5%",
                 failures <= 0.05 * len(records), f"{failures}/{len(records)}")
        model = "polylog" if alpha == 2.0 else "powerlaw"
        report = analysis.fit_scaling(records, model)
        threshold = analysis.lower_bound_threshold(alpha)
        print(f"  alpha={alpha:g}: fit {model} b={report.b:.3f} "
              f"(+-{report.ci_b:.3f}), hop-exponent threshold={threshold}")
        ck.check(f"alpha={alpha:g}: fitted exponent finite and positive",
                 math.isfinite(report.b) and report.b > 0, f"b={report.b}")
    config = analysis.SweepConfig(n_grid=(1024, 2048), alpha=2.0, seeds_per_n=1,
                                  pairs_per_graph=5)
    r1 = analysis.run_sweep(config)
    r2 = analysis.run_sweep(config)
    ck.check("sweeps are deterministic",
             analysis.records_to_csv(r1) == analysis.records_to_csv(r2))


def cmd_verify(args) -> int:
    ck = _Checker()
    if args.suite in ("model", "all"):
        _verify_model(ck, args.n, args.seeds)
    if args.suite in ("routing", "all"):
        _verify_routing(ck, args.n, args.seed)
    if args.suite in ("scaling", "all"):
        _verify_scaling(ck, args.seeds)
    if ck.failed:
        print(f"{ck.failed} check(s) failed")
        return 1
    print("all checks passed")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.subcommand == "generate":
            return cmd_generate(args)
        if args.subcommand == "route":
            return cmd_route(args)
        if args.subcommand == "sweep":
            return cmd_sweep(args)
        return cmd_verify(args)
    except (ValueError, GraphFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
