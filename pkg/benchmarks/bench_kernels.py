"""Time the compiled kernels against the pure-Python twins.

Usage::

    python3 benchmarks/bench_kernels.py [--n 1000] [--repeats 3]

Each detector runs on the same LFR-like graph and seed under both backends;
the script also checks that both give identical memberships.
"""

import argparse
import time

import numpy as np

from ccd import kernels
from ccd.benchgen import lfr_like
from ccd.detectors import label_propagation, leiden, louvain


def _best(fn, repeats):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--mu", type=float, default=0.3)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if kernels.compiled_backend is None:
        raise SystemExit("compiled extension not built; reinstall without CCD_NO_EXTENSION")
    g = lfr_like(n=args.n, mu_nominal=args.mu, seed=args.seed).graph
    print(f"graph: n={g.n} m={g.m}")
    print(f"{'detector':<20}{'python s':>10}{'cython s':>10}{'speedup':>9}  same")
    for name, fn in (("louvain", louvain), ("leiden", leiden),
                     ("label_propagation", label_propagation)):
        run = lambda: fn(g, seed=args.seed)  # noqa: E731
        with kernels.use_backend("python"):
            t_py, m_py = _best(run, args.repeats)
        with kernels.use_backend("cython"):
            t_cy, m_cy = _best(run, args.repeats)
        same = np.array_equal(m_py, m_cy)
        print(f"{name:<20}{t_py:>10.4f}{t_cy:>10.4f}{t_py / t_cy:>8.1f}x  {same}")


if __name__ == "__main__":
    main()
