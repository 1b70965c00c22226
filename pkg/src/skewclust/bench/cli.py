"""``skewclust`` command line: generate, sweep, timing, cluster, svd.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from ..algorithms import METHODS, NORMS, ClusterSpec
from ..dsbm import read_truth
from ..graph import build_skew, load_edge_list, normalize_skew
from ..linalg import ConvergenceError, PairMismatchError, RankDeficientError, truncated_svd
from . import runner

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(s):
    try:
        return tuple(float(x) for x in s.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}")


def _shared(p, *, method_default="skew_f", methods_list=False):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="out", help="output directory (or file for cluster/svd)")
    p.add_argument("--format", choices=("tsv", "pajek"), default="tsv")
    p.add_argument("--unweighted", action="store_true", help="set every edge weight to 1")
    p.add_argument("--norm", choices=NORMS, default="none")
    if methods_list:
        p.add_argument("--method", action="append", choices=METHODS,
                       help="repeat to select several methods (default: a standard set)")
    else:
        p.add_argument("--method", choices=METHODS, default=method_default)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--l-pairs", type=int, default=None,
                   help="complex-pair count for skew_r (real dimension 2*l)")
    p.add_argument("--c-cuts", type=int, default=None)
    p.add_argument("--alpha", type=float, default=0.5, help="DD-Sym mixing weight")
    p.add_argument("--d", type=int, default=None, help="SVD-M rank")
    p.add_argument("--tau", type=float, default=None, help="BCS teleportation")


def _sweep_args(p):
    p.add_argument("--pattern", choices=runner.PATTERNS, default="circulant")
    p.add_argument("--preset", choices=("desk", "paper"), default="desk")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--p", type=_floats, default=None, help="comma-separated p (=q) values")
    p.add_argument("--mu", type=_floats, default=None, help="comma-separated mu values")
    p.add_argument("--graphs", type=int, default=None)
    p.add_argument("--runs", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="skewclust", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    g = sub.add_parser("generate", help="write DSBM instances and a manifest")
    _shared(g, methods_list=True)
    _sweep_args(g)

    s = sub.add_parser("sweep", help="ARI / TopTF sweep over mu")
    _shared(s, methods_list=True)
    _sweep_args(s)
    s.add_argument("--manifest", default=None, help="reuse instances written by 'generate'")
    s.add_argument("--svg", action="store_true", help="also write SVG line charts")

    t = sub.add_parser("timing", help="setup / embedding / k-means timing table")
    _shared(t, methods_list=True)
    t.add_argument("--pattern", choices=runner.PATTERNS, default="circulant")
    t.add_argument("--n", type=int, default=2000)
    t.add_argument("--p", type=float, default=0.01)
    t.add_argument("--mu", type=float, default=0.0)
    t.add_argument("--graphs", type=int, default=1)
    t.add_argument("--runs", type=int, default=3)
    t.add_argument("--graph", default=None, help="time on this graph file instead of a DSBM")

    c = sub.add_parser("cluster", help="cluster one graph file and report cut scores")
    _shared(c)
    c.add_argument("graph")
    c.add_argument("--truth", default=None, help="vertex<TAB>cluster file")
    c.add_argument("--trials", type=int, default=1, help="keep the best TopTF of this many seeds")

    v = sub.add_parser("svd", help="dump leading singular values of K")
    _shared(v)
    v.add_argument("graph")
    v.add_argument("--count", type=int, default=10)
    return ap


def _spec(args, method) -> ClusterSpec:
    l_override = None
    if method == "skew_r":
        l_override = 2 * (args.l_pairs if args.l_pairs is not None else 1)
    try:
        return ClusterSpec(method, args.k, l_override=l_override, alpha=args.alpha, d=args.d,
                           normalization=args.norm, seed=args.seed, tau=args.tau)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _methods(args):
    if args.method:
        return tuple(_spec(args, m) for m in dict.fromkeys(args.method))
    base = runner.DEFAULT_SWEEP_METHODS if args.command != "timing" else runner.DEFAULT_TIMING_METHODS
    out = []
    for m in base:
        l = m.l_override
        if m.method == "skew_r" and args.l_pairs is not None:
            l = 2 * args.l_pairs
        norm = args.norm if m.method in ("skew_f", "skew_r", "skew_s", "herm", "herm_dense", "dd_sym") else "none"
        try:
            out.append(ClusterSpec(m.method, args.k, l_override=l, alpha=args.alpha, d=args.d,
                                   normalization=norm, tau=args.tau))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return tuple(out)


def _config(args) -> runner.SweepConfig:
    preset = runner.paper_preset if args.preset == "paper" else runner.desk_preset
    kw = dict(k=args.k, methods=_methods(args), c_cuts=args.c_cuts, seed=args.seed, out=args.out)
    for key, val in (("n", args.n), ("p_values", args.p), ("mu_values", args.mu),
                     ("graphs_per_cell", args.graphs), ("runs_per_graph", args.runs)):
        if val is not None:
            kw[key] = val
    try:
        return preset(args.pattern, **kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _load(args, path):
    return load_edge_list(path, format=args.format, unweighted=args.unweighted)


def _cmd_generate(args):
    path = runner.cmd_generate(_config(args))
    print(path)


def _cmd_sweep(args):
    if args.manifest:
        config, instances = runner.load_manifest(args.manifest)
        over = {"out": args.out} if args.out != "out" else {}
        if args.method:
            over["methods"] = [runner._spec_to_dict(m) for m in _methods(args)]
        if over:
            config = runner.SweepConfig.from_dict({**config.to_dict(), **over})
    else:
        config, instances = _config(args), None
    rows, agg = runner.cmd_sweep(config, instances, svg=args.svg)
    for r in agg:
        print(f"{r['method']}\tp={r['p']:g}\tmu={r['mu']:g}\tARI={r['ari_mean']:.4f}"
              f"+-{r['ari_std']:.4f}\tTopTF={r['top_tf_mean']:.2f}")


def _cmd_timing(args):
    graph = _load(args, args.graph)[0] if args.graph else None
    rows = runner.cmd_timing(n=args.n, k=args.k, p=args.p, mu=args.mu, pattern=args.pattern,
                             methods=_methods(args), graphs=args.graphs, runs=args.runs,
                             seed=args.seed, out=args.out, graph=graph)
    for r in rows:
        sp = "" if r.speedup_vs_herm is None else f"{r.speedup_vs_herm:.2f}x"
        print(f"{r.alg}\tsetup={r.setup_ms:.1f}\tembed={r.embed_ms:.1f}\t"
              f"kmeans={r.kmeans_ms:.1f}\tspeedup={sp}\tdim={r.embed_dim}\t{r.note}")


def _cmd_cluster(args):
    g, labels = _load(args, args.graph)
    truth = read_truth(args.truth, g.n) if args.truth else None
    spec = _spec(args, args.method)
    res = runner.cmd_cluster(g, spec, labels=labels, truth=truth, c_cuts=args.c_cuts,
                             trials=args.trials)
    os.makedirs(args.out, exist_ok=True)
    runner.write_partition(os.path.join(args.out, "partition.tsv"), res, g.n, labels)
    report = {k: v for k, v in res.report.items()}
    with open(os.path.join(args.out, "report.json"), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    keys = ("top_tf", "top_ci_vol", "top_ci_sz", "ari", "exact_tf", "achieved_fraction")
    for key in keys:
        if key in report:
            print(f"{key}\t{report[key]:.6g}")
    if report["flags"]:
        print("flags\t" + ",".join(report["flags"]))


def _cmd_svd(args):
    g, _ = _load(args, args.graph)
    kmat = build_skew(g)
    if args.norm != "none":
        kmat = normalize_skew(kmat, args.norm)
    m = min(args.count, g.n)
    if m < 1:
        raise UsageError("--count must be positive")
    svd = truncated_svd(kmat, m, seed=args.seed, check_rank=False)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "singular_values.csv")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("index", "sigma"))
        for i, s in enumerate(svd.sigma):
            w.writerow((i + 1, repr(float(s))))
    for i, s in enumerate(svd.sigma):
        print(f"{i + 1}\t{s:.10g}")


_COMMANDS = {
    "generate": _cmd_generate,
    "sweep": _cmd_sweep,
    "timing": _cmd_timing,
    "cluster": _cmd_cluster,
    "svd": _cmd_svd,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.k < 1:
            raise UsageError("--k must be positive")
        _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"skewclust: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, RankDeficientError, PairMismatchError) as exc:
        print(f"skewclust: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, ValueError, KeyError) as exc:
        print(f"skewclust: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
