"""Command-line interface: ``ccd {gen,detect,ccd,metrics,experiment}``.

Exit status is 0 for a result, 2 for a null result (no valid partition) and
1 for errors. The default thread count comes from ``CCD_THREADS``.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import benchgen
from .consensus import STRATEGIES, CcdConfig, ccd, write_consensus_csv
from .detectors import ALGORITHMS, DetectorConfig, detect
from .graph import read_edge_list
from .metrics import NMI_VARIANTS, assess, nmi
from .partition import check_lengths, read_partition, write_partition

EXIT_OK, EXIT_ERROR, EXIT_NULL = 0, 1, 2
THREADS_ENV = "CCD_THREADS"


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        return 1


def _add_detector_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alg", default="louvain",
                   help=f"base detector: {', '.join(ALGORITHMS)} (or lv/ld/lp/wt)")
    p.add_argument("--r", type=float, default=1.0, help="resolution (louvain/leiden)")
    p.add_argument("--walk-length", type=int, default=4, help="walktrap steps")
    p.add_argument("--max-sweeps", type=int, default=100)


def _detector(args) -> DetectorConfig:
    return DetectorConfig(args.alg, args.r, args.walk_length, args.max_sweeps)


def cmd_gen(args) -> int:
    if args.family == "rc":
        inst = benchgen.ring_of_cliques(args.k0, args.s, args.bridges, args.center)
    elif args.family == "lfr":
        inst = benchgen.lfr_like(args.n, args.tau1, args.tau2, args.mu, args.avg_deg,
                                 args.c_min, args.c_max, seed=args.seed)
    elif args.family == "er":
        g = benchgen.erdos_renyi(args.n, args.edge_prob, seed=args.seed)
        inst = benchgen.BenchmarkInstance(g, np.ones(g.n, dtype=np.int64), {"family": "er"}, 0.0)
    else:
        inst = benchgen.karate()
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    edges, truth = Path(f"{out}.edges.tsv"), Path(f"{out}.truth.tsv")
    inst.write(edges, truth)
    print(f"nodes\t{inst.graph.n}")
    print(f"edges\t{inst.graph.m}")
    print(f"realized_mu\t{inst.realized_mu:.6f}")
    print(f"wrote\t{edges}\t{truth}")
    return EXIT_OK


def cmd_detect(args) -> int:
    g = read_edge_list(args.graph)
    membership = detect(g, _detector(args).with_seed(args.seed))
    if args.out:
        write_partition(membership, g.labels, args.out)
    q = assess(g, membership)
    print(f"k\t{q.k}\nmu\t{q.mu:.6f}\nmodularity\t{q.modularity:.6f}\nvalid\t{q.valid}")
    return EXIT_OK


def cmd_ccd(args) -> int:
    g = read_edge_list(args.graph)
    cfg = CcdConfig(
        t=args.t, p=args.p, q=args.q, outlier_strategy=args.strategy,
        detector=_detector(args), resolution_range=tuple(args.r_range) if args.r_range else None,
        master_seed=args.seed, nmi_variant=args.nmi_variant,
    )
    cp, D = ccd(g, cfg, threads=args.threads, return_matrix=True)
    write_consensus_csv(cp, g.labels, args.out)
    if cp is None:
        print("null result: no trial produced a valid partition", file=sys.stderr)
        return EXIT_NULL
    if args.matrix_out:
        D.write_triplets(args.matrix_out, g.labels)
    print(f"k\t{cp.k}\noutliers\t{int(cp.outlier_flags.sum())}")
    print(f"trials_valid\t{cp.trials_valid}\ntrials_used\t{cp.trials_used}")
    return EXIT_OK


def cmd_metrics(args) -> int:
    g = read_edge_list(args.graph)
    a = read_partition(args.partition, g)
    q = assess(g, a)
    print(f"k\t{q.k}\nmu\t{q.mu:.6f}\nmodularity\t{q.modularity:.6f}\nvalid\t{q.valid}")
    if args.partition2:
        b = read_partition(args.partition2, g)
        check_lengths(a, b)
        print(f"nmi\t{nmi(a, b, args.variant):.6f}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    from .experiments import load_spec, run_experiment

    spec = load_spec(args.spec)
    path = run_experiment(spec, args.seed, args.out_dir, threads=args.threads)
    print(f"wrote\t{path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ccd", description="Consensus community detection.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a benchmark network and its truth file")
    p.add_argument("family", choices=("rc", "lfr", "er", "karate"))
    p.add_argument("--out", required=True, help="output prefix (writes .edges.tsv/.truth.tsv)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k0", type=int, default=4)
    p.add_argument("--s", type=int, default=6)
    p.add_argument("--bridges", action="store_true")
    p.add_argument("--center", action="store_true")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--tau1", type=float, default=2.0)
    p.add_argument("--tau2", type=float, default=3.0)
    p.add_argument("--mu", type=float, default=0.3)
    p.add_argument("--avg-deg", type=float, default=10.0)
    p.add_argument("--c-min", type=int, default=20)
    p.add_argument("--c-max", type=int, default=50)
    p.add_argument("--edge-prob", type=float, default=0.05)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("detect", help="run one base detector")
    p.add_argument("graph")
    _add_detector_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="partition file (node<TAB>community)")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("ccd", help="consensus community detection")
    p.add_argument("graph")
    _add_detector_args(p)
    p.add_argument("--r-range", type=float, nargs=2, metavar=("R_MIN", "R_MAX"),
                   help="draw each trial's resolution uniformly from this range")
    p.add_argument("--t", type=int, default=100, help="number of trials")
    p.add_argument("--p", type=float, default=0.8, help="co-occurrence threshold")
    p.add_argument("--q", type=float, default=0.5, help="pruning quantile")
    p.add_argument("--strategy", choices=STRATEGIES, default="group")
    p.add_argument("--nmi-variant", choices=NMI_VARIANTS, default="arithmetic")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=_default_threads())
    p.add_argument("--out", required=True, help="consensus CSV")
    p.add_argument("--matrix-out", help="co-occurrence triplets CSV")
    p.set_defaults(func=cmd_ccd)

    p = sub.add_parser("metrics", help="quality of a partition, NMI against a second")
    p.add_argument("graph")
    p.add_argument("partition")
    p.add_argument("partition2", nargs="?")
    p.add_argument("--variant", choices=NMI_VARIANTS, default="arithmetic")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("experiment", help="run a declarative experiment spec")
    p.add_argument("spec")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-dir", default="results")
    p.add_argument("--threads", type=int, default=_default_threads())
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_ERROR
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
