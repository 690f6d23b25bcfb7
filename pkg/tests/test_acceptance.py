"""Acceptance criteria, one test each.

Every test prints a single ``CRITERION <n> PASS|FAIL: ...`` line with the
measured values, then asserts. Run directly for the summary only::

    python3 tests/test_acceptance.py
"""

import sys
import tempfile
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from ccd.benchgen import erdos_renyi, karate, lfr_like, rc_extra_nodes, ring_of_cliques  # noqa
from ccd.cli import main as cli_main  # noqa: E402
from ccd.consensus import CcdConfig, ccd, recursive_consensus  # noqa: E402
from ccd.detectors import DetectorConfig, detect, label_propagation, leiden, louvain  # noqa
from ccd.detectors import walktrap  # noqa: E402
from ccd.experiments import load_spec, run_experiment  # noqa: E402
from ccd.graph import permute  # noqa: E402
from ccd.metrics import mixing_parameter, modularity, nmi, pairwise_similarity  # noqa: E402
from oracles import brute_force_max_modularity, small_graph_corpus, two_triangles  # noqa: E402

LP = DetectorConfig("label_propagation")


def _report(n, ok, detail):
    print(f"CRITERION {n} {'PASS' if ok else 'FAIL'}: {detail}")
    return ok


def criterion_1():
    """Karate: louvain r=0.5 gives k=2; CCD(t=100, p=0.9, q=0.5, highlight) gives two
    multi-node communities with node 10 an outlier of gamma in [0.60, 0.90]; < 10 s."""
    t0 = time.perf_counter()
    inst = karate()
    g = inst.graph
    single_k = int(detect(g, DetectorConfig("louvain", 0.5, seed=0)).max())
    cfg = CcdConfig(t=100, p=0.9, q=0.5, outlier_strategy="highlight",
                    detector=DetectorConfig("louvain", 0.5), master_seed=0)
    cp = ccd(g, cfg)
    elapsed = time.perf_counter() - t0
    i10 = g.index_of("10")
    sizes = np.bincount(cp.membership)
    multi = int((sizes[1:] > 1).sum())
    gamma10 = float(cp.gamma[i10])
    flagged = bool(cp.outlier_flags[i10])
    ok = (single_k == 2 and multi == 2 and flagged and 0.60 <= gamma10 <= 0.90
          and elapsed < 10)
    return _report(1, ok, f"single k={single_k}; ccd multi-node communities={multi}, "
                          f"node 10 outlier={flagged}, gamma(10)={gamma10:.3f} "
                          f"(need [0.60, 0.90]); {elapsed:.2f}s")


def criterion_2():
    """Karate, louvain r=0.8, 1000 seeded trials: k=3 in [0.50, 0.72], k=2 in [0.28, 0.50]."""
    t0 = time.perf_counter()
    g = karate().graph
    ks = np.array([louvain(g, 0.8, seed=s).max() for s in range(1000)])
    elapsed = time.perf_counter() - t0
    f3, f2 = float(np.mean(ks == 3)), float(np.mean(ks == 2))
    ok = 0.50 <= f3 <= 0.72 and 0.28 <= f2 <= 0.50 and elapsed < 60
    return _report(2, ok, f"k=3 fraction {f3:.3f} (need [0.50, 0.72]), k=2 fraction {f2:.3f} "
                          f"(need [0.28, 0.50]), other {1 - f2 - f3:.3f}; {elapsed:.1f}s")


def criterion_3():
    """Erdos-Renyi(200, 0.05): LP gives k=1; louvain mu > 0.5 in >= 90% of 100 trials;
    CCD with louvain returns the null result."""
    g = erdos_renyi(200, 0.05, seed=3)
    lp_k = int(label_propagation(g, seed=0).max())
    lp_rate = np.mean([label_propagation(g, seed=s).max() == 1 for s in range(100)])
    mus = [mixing_parameter(g, louvain(g, seed=s)) for s in range(100)]
    frac = float(np.mean(np.array(mus) > 0.5))
    null = ccd(g, CcdConfig(t=100, detector=DetectorConfig("louvain"), master_seed=0)) is None
    ok = lp_k == 1 and frac >= 0.90 and null
    return _report(3, ok, f"m={g.m}; LP k={lp_k} (k=1 in {lp_rate:.0%} of 100 seeds); "
                          f"louvain mu>0.5 in {frac:.0%}; ccd null={null}")


def criterion_4():
    """RC s=6, k0 in {5,10,20}, CCD-LP(t=200, p=0.8, q=0.5, group): every bridge gamma in
    [0.40, 0.60]; < 2 min."""
    t0 = time.perf_counter()
    parts = []
    ok = True
    for k0 in (5, 10, 20):
        inst = ring_of_cliques(k0, 6, bridges=True)
        cp = ccd(inst.graph, CcdConfig(t=200, p=0.8, q=0.5, outlier_strategy="group",
                                       detector=LP, master_seed=0))
        bg = cp.gamma[rc_extra_nodes(inst)["bridges"]]
        inside = int(np.sum((bg >= 0.40) & (bg <= 0.60)))
        ok &= inside == k0
        parts.append(f"k0={k0}: {inside}/{k0} in band, gamma range "
                     f"[{bg.min():.3f}, {bg.max():.3f}]")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 120
    return _report(4, ok, "; ".join(parts) + f"; {elapsed:.1f}s")


def criterion_5():
    """RC(4,6,bridges,center): incorporate k=4, highlight k=9, group k=5 with label 0 holding
    exactly the 5 extra nodes. LP, t=100, no pruning; p=0.6 for incorporate, 0.8 otherwise."""
    inst = ring_of_cliques(4, 6, bridges=True, center=True)
    extra = rc_extra_nodes(inst)
    extra = set(extra["bridges"] + extra["center"])
    ks = {}
    group_zero = None
    for strategy, p in (("incorporate", 0.6), ("highlight", 0.8), ("group", 0.8)):
        cp = ccd(inst.graph, CcdConfig(t=100, p=p, q=0.0, outlier_strategy=strategy,
                                       detector=LP, master_seed=0))
        ks[strategy] = cp.k
        if strategy == "group":
            group_zero = set(np.flatnonzero(cp.membership == 0).tolist())
    ok = (ks["incorporate"] == 4 and ks["highlight"] == 9 and ks["group"] == 5
          and group_zero == extra)
    return _report(5, ok, f"incorporate k={ks['incorporate']}, highlight k={ks['highlight']}, "
                          f"group k={ks['group']}, label-0 = extra nodes: {group_zero == extra}")


def _center_clique(inst, membership):
    c = rc_extra_nodes(inst)["center"][0]
    mates = (membership == membership[c]) & (inst.truth > 0)
    return int(np.bincount(inst.truth[mates]).argmax()) if mates.any() else 0


def criterion_6():
    """RC(4,5,bridges,center): LP on permuted copies, 1000 runs, center frequencies per clique
    in [0.17, 0.33]; walktrap on the unpermuted graph puts >= 95% in one community."""
    inst = ring_of_cliques(4, 5, bridges=True, center=True)
    g = inst.graph
    lp_counts = np.zeros(5, dtype=int)
    wt_counts = np.zeros(5, dtype=int)
    for run in range(1000):
        ss = np.random.SeedSequence(6, spawn_key=(run,)).spawn(2)
        gp, perm = permute(g, ss[0])
        lp_counts[_center_clique(inst, perm.pull_back(label_propagation(gp, seed=ss[1])))] += 1
        wt_counts[_center_clique(inst, walktrap(g, 4, seed=ss[1]))] += 1
    lp_freq = lp_counts[1:] / 1000
    wt_top = wt_counts[1:].max() / 1000
    ok = bool(np.all((lp_freq >= 0.17) & (lp_freq <= 0.33))) and wt_top >= 0.95
    return _report(6, ok, f"LP center frequencies {np.round(lp_freq, 3).tolist()} "
                          f"(no clique: {lp_counts[0]}); walktrap top community {wt_top:.3f}")


def criterion_7():
    """LFR-like (n=1000, mu=0.3), louvain: mean pairwise NMI of 10 CCD outputs (t=100) is
    >= 0.95 and exceeds that of 10 single trials by >= 0.02; < 10 min."""
    t0 = time.perf_counter()
    inst = lfr_like(1000, 2, 3, 0.3, 10, 20, 50, seed=0)
    g = inst.graph
    lv = DetectorConfig("louvain")
    singles = [detect(g, lv.with_seed(np.random.SeedSequence(0, spawn_key=(i,))))
               for i in range(10)]
    outs = [ccd(g, CcdConfig(t=100, p=0.8, q=0.5, outlier_strategy="group", detector=lv,
                             master_seed=i)) for i in range(10)]
    s_single = float(pairwise_similarity(singles)[0].mean())
    s_ccd = float(pairwise_similarity([o.membership for o in outs])[0].mean())
    elapsed = time.perf_counter() - t0
    gain = s_ccd - s_single
    ok = s_ccd >= 0.95 and gain >= 0.02 and elapsed < 600
    return _report(7, ok, f"realized mu {inst.realized_mu:.3f}; single-trial pairwise NMI "
                          f"{s_single:.4f}, CCD {s_ccd:.4f}, gain {gain:.6f} (need >= 0.02); "
                          f"{elapsed:.1f}s")


def criterion_8():
    """RC s=6, k0 in {5,10,20,30,50}: CCD-LP non-outlier community count equals k0; CCD-louvain
    count >= recursive consensus count."""
    rows = []
    ok = True
    for k0 in (5, 10, 20, 30, 50):
        g = ring_of_cliques(k0, 6).graph
        base = dict(t=100, p=0.8, q=0.5, outlier_strategy="group", master_seed=0)
        lp = ccd(g, CcdConfig(detector=LP, **base))
        lv = ccd(g, CcdConfig(detector=DetectorConfig("louvain"), **base))
        rec = recursive_consensus(g, DetectorConfig("louvain"), t=100, p=0.6, seed=0)
        rec_k = int(rec.membership.max())
        ok &= lp.n_core == k0 and lv.n_core >= rec_k
        rows.append(f"k0={k0}: lp={lp.n_core} lv={lv.n_core} rec={rec_k}")
    return _report(8, ok, "; ".join(rows))


def criterion_9():
    """Oracle suite: louvain/leiden modularity <= brute-force maximum on 50 small connected
    graphs, equality on two triangles; NMI axioms on 1000 random partition pairs."""
    corpus = small_graph_corpus(50)
    assert all(g.n <= 7 for g in corpus)
    violations = 0
    for g in corpus:
        best, _ = brute_force_max_modularity(g)
        for fn in (louvain, leiden):
            for seed in range(3):
                if modularity(g, fn(g, seed=seed)) > best + 1e-12:
                    violations += 1
    tt = two_triangles()
    best_tt, _ = brute_force_max_modularity(tt)
    eq = all(abs(modularity(tt, fn(tt, seed=s)) - best_tt) <= 1e-12
             for fn in (louvain, leiden) for s in range(5))
    rng = np.random.default_rng(9)
    axiom_fail = 0
    for _ in range(1000):
        n = int(rng.integers(2, 60))
        a = rng.integers(0, int(rng.integers(1, 8)), size=n)
        b = rng.integers(0, int(rng.integers(1, 8)), size=n)
        relabelled = (a * 7 + 13) % 1000
        v = nmi(a, b)
        if not (nmi(a, a) == 1.0 and v == nmi(b, a) and abs(nmi(relabelled, b) - v) <= 1e-12
                and 0.0 <= v <= 1.0):
            axiom_fail += 1
    ok = violations == 0 and eq and axiom_fail == 0
    return _report(9, ok, f"{len(corpus)} graphs, bound violations={violations}, "
                          f"two-triangle equality={eq}, NMI axiom failures={axiom_fail}/1000")


def criterion_10():
    """Repeated ccd and experiment runs with identical seeds and different thread counts
    produce byte-identical outputs."""
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        cli_main(["gen", "rc", "--k0", "6", "--s", "5", "--bridges", "--center",
                  "--out", str(tmp / "rc")])
        ccd_out = []
        for threads in ("1", "2", "8"):
            out, mat = tmp / f"c{threads}.csv", tmp / f"d{threads}.csv"
            cli_main(["ccd", str(tmp / "rc.edges.tsv"), "--alg", "louvain", "--t", "80",
                      "--seed", "5", "--threads", threads, "--out", str(out),
                      "--matrix-out", str(mat)])
            ccd_out.append(out.read_bytes() + mat.read_bytes())
        spec_path = tmp / "spec.ini"
        spec_path.write_text("[experiment]\nname = rc-sweep\nreplicates = 2\nrecursive = true\n"
                             "[benchmark]\nfamily = rc\nk0 = 4, 6\ns = 5\nbridges = true\n"
                             "[detector]\nalgorithm = lp, louvain\n[ccd]\nt = 30\n")
        spec = load_spec(spec_path)
        exp_out = [run_experiment(spec, 3, tmp / f"e{th}", threads=th).read_bytes()
                   for th in (1, 4)]
    ok = len(set(ccd_out)) == 1 and len(set(exp_out)) == 1
    return _report(10, ok, f"ccd identical across 1/2/8 threads: {len(set(ccd_out)) == 1}; "
                           f"experiment identical across 1/4 threads: {len(set(exp_out)) == 1}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10]


def test_criterion_01_karate_reproduction():
    assert criterion_1()


def test_criterion_02_louvain_bimodality():
    assert criterion_2()


def test_criterion_03_validity_gate():
    assert criterion_3()


def test_criterion_04_bridge_uncertainty():
    assert criterion_4()


def test_criterion_05_outlier_strategy_counts():
    assert criterion_5()


def test_criterion_06_input_ordering_bias():
    assert criterion_6()


def test_criterion_07_stability():
    assert criterion_7()


def test_criterion_08_rc_sweep():
    assert criterion_8()


def test_criterion_09_oracle_suite():
    assert criterion_9()


def test_criterion_10_determinism():
    assert criterion_10()


if __name__ == "__main__":
    results = [fn() for fn in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria pass")
