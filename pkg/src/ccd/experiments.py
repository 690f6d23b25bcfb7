"""Declarative experiment runner.

An experiment spec is an INI file::

    [experiment]
    name = stability
    replicates = 1
    ensemble = 10

    [benchmark]
    family = lfr
    n = 1000
    mu = 0.3

    [detector]
    algorithm = louvain

    [ccd]
    t = 1, 10, 50, 100
    p = 0.8

Any value in ``[benchmark]``, ``[detector]`` or ``[ccd]`` may be a comma
list; the grid is the cartesian product of all lists, in file order. Each
``(grid point, replicate)`` produces one CSV row. Seeds come from the master
seed only, so the CSV is byte-identical across runs and thread counts.
Wall-clock times go to a ``<name>_timing.csv`` sidecar for that reason.
"""

from __future__ import annotations

import configparser
import csv
import itertools
import time
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import benchgen
from .consensus import CcdConfig, ccd, recursive_consensus, run_trial
from .detectors import DetectorConfig, detect
from .graph import permute
from .metrics import assess, modularity, nmi, pairwise_similarity

EXPERIMENTS = ("stability", "bias", "uncertainty-sweep", "rc-sweep", "lfr-sweep",
               "karate", "validity")
GRID_SECTIONS = ("benchmark", "detector", "ccd")

BASE_COLUMNS = ["experiment", "grid_index", "replicate"]
OUTPUT_COLUMNS = ["status", "error", "k", "mu", "modularity", "nmi_truth", "mean_pairwise_nmi",
                  "gamma_mean", "gamma_median", "gamma_p10", "gamma_p90", "gamma_frac_pos"]
EXTRA_COLUMNS = {
    "stability": [],
    "bias": ["center_clique"],
    "uncertainty-sweep": ["n_outliers"],
    "rc-sweep": ["n_core", "bridge_gamma_mean", "bridge_gamma_min", "bridge_gamma_max",
                 "recursive_k", "recursive_converged"],
    "lfr-sweep": ["single_nmi_truth", "realized_mu"],
    "karate": ["node10_community", "node10_gamma", "node10_outlier"],
    "validity": ["valid", "ccd_null"],
}


class SpecError(ValueError):
    """Malformed experiment spec."""


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    replicates: int
    grid: list
    options: dict

    @property
    def param_columns(self) -> list[str]:
        return [f"{sec}.{key}" for sec, key in self.grid[0]["_order"]] if self.grid else []


def _parse_value(text: str):
    text = text.strip()
    low = text.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def load_spec(path) -> ExperimentSpec:
    """Parse an INI experiment spec and expand its grid."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    if not cp.read(path, encoding="utf-8"):
        raise SpecError(f"{path}: cannot read spec")
    if not cp.has_section("experiment"):
        raise SpecError(f"{path}: missing [experiment] section")
    options = {k: _parse_value(v) for k, v in cp["experiment"].items()}
    name = options.pop("name", None)
    if name not in EXPERIMENTS:
        raise SpecError(f"{path}: experiment name must be one of {EXPERIMENTS}, got {name!r}")
    replicates = options.pop("replicates", 1)
    if not isinstance(replicates, int) or replicates < 1:
        raise SpecError(f"{path}: replicates must be a positive integer")
    axes = []
    for sec in GRID_SECTIONS:
        if not cp.has_section(sec):
            continue
        for key, raw in cp[sec].items():
            values = [_parse_value(v) for v in raw.split(",") if v.strip()]
            if not values:
                raise SpecError(f"{path}: [{sec}] {key} is empty")
            axes.append(((sec, key), values))
    order = [a for a, _ in axes]
    grid = []
    for combo in itertools.product(*(vals for _, vals in axes)):
        point = {"_order": order}
        for (sec, key), val in zip(order, combo):
            point.setdefault(sec, {})[key] = val
        grid.append(point)
    return ExperimentSpec(name, replicates, grid, options)


# --- building blocks ----------------------------------------------------------

def _bench_key(point) -> tuple:
    return tuple(sorted(point.get("benchmark", {}).items()))


def _make_benchmark(params: dict, seed: int) -> benchgen.BenchmarkInstance:
    params = dict(params)
    family = params.pop("family", None)
    if family == "rc":
        return benchgen.ring_of_cliques(int(params.get("k0", 4)), int(params.get("s", 6)),
                                        bool(params.get("bridges", False)),
                                        bool(params.get("center", False)))
    if family == "lfr":
        return benchgen.lfr_like(
            n=int(params.get("n", 1000)), tau1=float(params.get("tau1", 2.0)),
            tau2=float(params.get("tau2", 3.0)), mu_nominal=float(params.get("mu", 0.3)),
            avg_deg=float(params.get("avg_deg", 10.0)), c_min=int(params.get("c_min", 20)),
            c_max=int(params.get("c_max", 50)), seed=seed)
    if family == "er":
        g = benchgen.erdos_renyi(int(params.get("n", 200)), float(params.get("edge_prob", 0.05)),
                                 seed=seed)
        return benchgen.BenchmarkInstance(g, np.ones(g.n, dtype=np.int64), {"family": "er"}, 0.0)
    if family == "karate":
        return benchgen.karate()
    if family == "file":
        return benchgen.load_benchmark(params["edges"], params["truth"])
    raise SpecError(f"unknown benchmark family {family!r}")


def _detector(point) -> DetectorConfig:
    d = point.get("detector", {})
    return DetectorConfig(
        algorithm=str(d.get("algorithm", "louvain")),
        resolution=float(d.get("resolution", 1.0)),
        walk_length=int(d.get("walk_length", 4)),
        max_sweeps=int(d.get("max_sweeps", 100)),
    )


def _ccd_config(point, seed: int) -> CcdConfig:
    c = point.get("ccd", {})
    rr = None
    if "r_min" in c or "r_max" in c:
        rr = (float(c.get("r_min", 0.5)), float(c.get("r_max", 1.0)))
    return CcdConfig(
        t=int(c.get("t", 100)), p=float(c.get("p", 0.8)), q=float(c.get("q", 0.5)),
        outlier_strategy=str(c.get("strategy", "group")), detector=_detector(point),
        resolution_range=rr, master_seed=seed,
        nmi_variant=str(c.get("nmi_variant", "arithmetic")),
    )


def _seed(*words) -> int:
    return int(np.random.SeedSequence(words[0], spawn_key=tuple(words[1:])).generate_state(1)[0])


def _gamma_summary(gamma) -> dict:
    gamma = np.asarray(gamma, dtype=np.float64)
    return {
        "gamma_mean": float(gamma.mean()),
        "gamma_median": float(np.median(gamma)),
        "gamma_p10": float(np.quantile(gamma, 0.1)),
        "gamma_p90": float(np.quantile(gamma, 0.9)),
        "gamma_frac_pos": float((gamma > 0).mean()),
    }


def _partition_summary(inst, membership) -> dict:
    g = inst.graph
    q = assess(g, membership)
    return {"k": q.k, "mu": q.mu, "modularity": q.modularity,
            "nmi_truth": nmi(membership, inst.truth)}


def _ccd_summary(inst, cp) -> dict:
    if cp is None:
        return {"status": "null"}
    row = _partition_summary(inst, cp.membership)
    row["k"] = cp.k
    row.update(_gamma_summary(cp.gamma))
    return row


# --- per-experiment bodies ---------------------------------------------------

def _run_stability(inst, point, seed, options):
    ensemble = int(options.get("ensemble", 10))
    cps = [ccd(inst.graph, _ccd_config(point, _seed(seed, e))) for e in range(ensemble)]
    if any(cp is None for cp in cps):
        return {"status": "null"}
    row = _ccd_summary(inst, cps[0])
    row["mean_pairwise_nmi"] = float(pairwise_similarity([cp.membership for cp in cps])[0].mean())
    return row


def _run_bias(inst, point, seed, options):
    g = inst.graph
    det = _detector(point).with_seed(_seed(seed, 1))
    if options.get("permute", True):
        g_star, perm = permute(g, _seed(seed, 0))
        membership = perm.pull_back(detect(g_star, det))
    else:
        membership = detect(g, det)
    row = _partition_summary(inst, membership)
    center = benchgen.rc_extra_nodes(inst)["center"]
    if not center:
        raise SpecError("bias experiment needs an RC benchmark with a center node")
    c = center[0]
    mates = (membership == membership[c]) & (inst.truth > 0)
    # the clique holding most of the center's community, 0 if none
    row["center_clique"] = int(np.bincount(inst.truth[mates]).argmax()) if mates.any() else 0
    return row


def _run_ccd_row(inst, point, seed, options):
    cp = ccd(inst.graph, _ccd_config(point, seed))
    row = _ccd_summary(inst, cp)
    if cp is not None:
        row["n_outliers"] = int(cp.outlier_flags.sum())
    return row


def _run_rc_sweep(inst, point, seed, options):
    cfg = _ccd_config(point, seed)
    cp = ccd(inst.graph, cfg)
    row = _ccd_summary(inst, cp)
    if cp is not None:
        row["n_core"] = cp.n_core
        bridges = benchgen.rc_extra_nodes(inst)["bridges"]
        if bridges:
            bg = cp.gamma[bridges]
            row.update(bridge_gamma_mean=float(bg.mean()), bridge_gamma_min=float(bg.min()),
                       bridge_gamma_max=float(bg.max()))
    if options.get("recursive", False):
        rc = recursive_consensus(inst.graph, cfg.detector, t=cfg.t,
                                 p=float(options.get("recursive_p", 0.6)), seed=_seed(seed, 2))
        row["recursive_k"] = int(rc.membership.max())
        row["recursive_converged"] = int(rc.converged)
    return row


def _run_lfr_sweep(inst, point, seed, options):
    cfg = _ccd_config(point, seed)
    row = _ccd_summary(inst, ccd(inst.graph, cfg))
    single = run_trial(inst.graph, cfg, 0)
    row["single_nmi_truth"] = nmi(single.membership, inst.truth)
    row["realized_mu"] = inst.realized_mu
    return row


def _run_karate(inst, point, seed, options):
    cp = ccd(inst.graph, _ccd_config(point, seed))
    row = _ccd_summary(inst, cp)
    if cp is not None:
        i = inst.graph.index_of("10")
        row.update(node10_community=int(cp.membership[i]), node10_gamma=float(cp.gamma[i]),
                   node10_outlier=int(cp.outlier_flags[i]))
    return row


def _run_validity(inst, point, seed, options):
    cfg = _ccd_config(point, seed)
    tr = run_trial(inst.graph, cfg, 0)
    g = inst.graph
    row = {"k": tr.k, "mu": tr.mu, "modularity": modularity(g, tr.membership),
           "valid": int(tr.valid)}
    if options.get("consensus", True):
        row["ccd_null"] = int(ccd(g, cfg) is None)
    return row


RUNNERS = {
    "stability": _run_stability,
    "bias": _run_bias,
    "uncertainty-sweep": _run_ccd_row,
    "rc-sweep": _run_rc_sweep,
    "lfr-sweep": _run_lfr_sweep,
    "karate": _run_karate,
    "validity": _run_validity,
}


# --- driver ------------------------------------------------------------------

def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            raise ValueError("non-finite output")
        return format(float(value), ".12g")
    return str(value)


def run_experiment(spec: ExperimentSpec, master_seed: int, out_dir, threads: int = 1) -> Path:
    """Execute every (grid point, replicate) and write ``<out_dir>/<name>.csv``.

    Returns the CSV path. Failures become ``status=error`` rows.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    runner = RUNNERS[spec.name]
    bench_index = {}
    for point in spec.grid:
        bench_index.setdefault(_bench_key(point), len(bench_index))
    benches = {}

    def bench_for(point):
        key = _bench_key(point)
        if key not in benches:
            seed = _seed(master_seed, 0, bench_index[key])
            benches[key] = _make_benchmark(point.get("benchmark", {"family": "karate"}), seed)
        return benches[key]

    # build benchmarks up front (serially) so failures are attributed per point
    bench_errors = {}
    for point in spec.grid:
        try:
            bench_for(point)
        except Exception as exc:  # noqa: BLE001 - reported as an error row
            bench_errors[_bench_key(point)] = f"{type(exc).__name__}: {exc}"

    jobs = [(gi, rep) for gi in range(len(spec.grid)) for rep in range(spec.replicates)]

    def job(args):
        gi, rep = args
        point = spec.grid[gi]
        start = time.perf_counter()
        key = _bench_key(point)
        try:
            if key in bench_errors:
                raise RuntimeError(bench_errors[key])
            row = runner(benches[key], point, _seed(master_seed, 1, gi, rep), spec.options)
            row.setdefault("status", "ok")
            bad = [k for k, v in row.items()
                   if isinstance(v, (float, np.floating)) and not np.isfinite(v)]
            if bad:
                raise ValueError(f"non-finite output in {', '.join(sorted(bad))}")
        except Exception as exc:  # noqa: BLE001 - reported as an error row
            msg = str(exc).splitlines()[0] if str(exc) else traceback.format_exc(limit=1)
            row = {"status": "error", "error": f"{type(exc).__name__}: {msg}"}
        return gi, rep, row, (time.perf_counter() - start) * 1000.0

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, jobs))
    else:
        results = [job(j) for j in jobs]

    params = spec.param_columns
    header = BASE_COLUMNS + params + OUTPUT_COLUMNS + EXTRA_COLUMNS[spec.name]
    path = out_dir / f"{spec.name}.csv"
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for gi, rep, row, _ in results:
            point = spec.grid[gi]
            values = {"experiment": spec.name, "grid_index": gi, "replicate": rep}
            for col in params:
                sec, key = col.split(".", 1)
                values[col] = point[sec][key]
            values.update(row)
            w.writerow([_format(values.get(col)) for col in header])
    with (out_dir / f"{spec.name}_timing.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["grid_index", "replicate", "wall_ms"])
        for gi, rep, _, ms in results:
            w.writerow([gi, rep, f"{ms:.3f}"])
    return path
