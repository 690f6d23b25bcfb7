"""Benchmark networks with planted (ground-truth) partitions.

Families: ring of cliques, an approximate LFR generator, Erdős–Rényi graphs
and the embedded weighted Zachary karate club.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .graph import Graph, connected_components, read_edge_list, write_edge_list
from .metrics import mixing_parameter
from .partition import read_partition, write_partition


class InfeasibleParameters(ValueError):
    """The requested benchmark cannot be built."""


@dataclass(frozen=True)
class BenchmarkInstance:
    graph: Graph
    truth: np.ndarray
    nominal: dict = field(default_factory=dict)
    realized_mu: float = 0.0

    def write(self, edge_path, truth_path) -> None:
        write_edge_list(self.graph, edge_path)
        write_partition(self.truth, self.graph.labels, truth_path)


def _instance(graph, truth, nominal):
    truth = np.asarray(truth, dtype=np.int64)
    return BenchmarkInstance(graph, truth, dict(nominal), mixing_parameter(graph, truth))


def ring_of_cliques(k0: int, s: int, bridges: bool = False, center: bool = False,
                    seed=None) -> BenchmarkInstance:
    """``k0`` cliques of size ``s`` joined in a ring.

    Clique ``i`` holds nodes ``i*s .. i*s+s-1``; its first node is the port
    used by bridges and the center. Without bridges, the first node of clique
    ``i`` links directly to the second node of clique ``i+1`` (so no node gets
    two ring edges). With ``bridges`` a dedicated node sits between the ports
    of consecutive cliques; ``center`` adds one node linked to every port.
    Truth labels cliques ``1..k0``; bridge and center nodes get label 0.

    The construction is deterministic; ``seed`` is accepted for interface
    uniformity.
    """
    if k0 < 3 or s < 3:
        raise InfeasibleParameters("ring of cliques needs k0 >= 3 and s >= 3")
    src, dst = [], []
    for c in range(k0):
        base = c * s
        for a in range(s):
            for b in range(a + 1, s):
                src.append(base + a)
                dst.append(base + b)
    truth = [c + 1 for c in range(k0) for _ in range(s)]
    n = k0 * s
    if bridges:
        for c in range(k0):
            bridge = n + c
            src += [c * s, bridge]
            dst += [bridge, ((c + 1) % k0) * s]
        truth += [0] * k0
        n += k0
    else:
        for c in range(k0):
            src.append(c * s)
            dst.append(((c + 1) % k0) * s + 1)
    if center:
        for c in range(k0):
            src.append(n)
            dst.append(c * s)
        truth.append(0)
        n += 1
    nominal = {"family": "rc", "k0": k0, "s": s, "bridges": bool(bridges), "center": bool(center)}
    return _instance(Graph(n, src, dst), truth, nominal)


def rc_extra_nodes(inst: BenchmarkInstance) -> dict[str, list[int]]:
    """Node ids of the bridge and center nodes of a ring of cliques."""
    k0, s = inst.nominal["k0"], inst.nominal["s"]
    n0 = k0 * s
    bridges = list(range(n0, n0 + k0)) if inst.nominal["bridges"] else []
    center = [inst.graph.n - 1] if inst.nominal["center"] else []
    return {"bridges": bridges, "center": center}


def erdos_renyi(n: int, edge_prob: float, seed=None, largest_component: bool = False) -> Graph:
    """G(n, p) random graph, optionally reduced to its largest component."""
    if not 0 < edge_prob < 1:
        raise ValueError("edge_prob must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(len(iu)) < edge_prob
    g = Graph(n, iu[keep], ju[keep])
    if not largest_component:
        return g
    comp = connected_components(g)
    biggest = np.argmax(np.bincount(comp)[1:]) + 1
    nodes = np.flatnonzero(comp == biggest)
    new_id = np.full(n, -1, dtype=np.int64)
    new_id[nodes] = np.arange(len(nodes))
    sel = (comp[g.src] == biggest)
    return Graph(len(nodes), new_id[g.src[sel]], new_id[g.dst[sel]],
                 labels=[g.labels[i] for i in nodes])


KARATE_LEADERS = {"1": "H", "34": "A"}


def karate() -> BenchmarkInstance:
    """Weighted Zachary karate club (34 nodes, 78 edges).

    Node labels are ``"1".."34"`` except the two faction leaders, which are
    relabelled ``"H"`` (node 1) and ``"A"`` (node 34). The truth vector is the
    observed two-faction split, kept for orientation only.
    """
    data = resources.files("ccd") / "data"
    with resources.as_file(data / "karate.tsv") as path:
        raw = read_edge_list(path)
    # node id = member number - 1
    new_id = np.array([int(lab) - 1 for lab in raw.labels], dtype=np.int64)
    labels = [str(i + 1) for i in range(raw.n)]
    g = Graph(raw.n, new_id[raw.src], new_id[raw.dst], raw.weight,
              [KARATE_LEADERS.get(lab, lab) for lab in labels])
    with resources.as_file(data / "karate_factions.tsv") as path:
        truth = read_partition(path, Graph(g.n, g.src, g.dst, labels=labels))
    return _instance(g, truth, {"family": "karate"})


def load_benchmark(edge_path, truth_path, **nominal) -> BenchmarkInstance:
    """Load an externally generated network and its ``node<TAB>community`` file."""
    g = read_edge_list(edge_path)
    truth = read_partition(truth_path, g)
    return _instance(g, truth, {"family": "external", **nominal})


# --- approximate LFR -------------------------------------------------------

def _power_law_mean(tau: float, lo: float, hi: float) -> float:
    """Mean of the continuous density ``x**-tau`` on ``[lo, hi]``."""
    def integral(power):
        # integral of x**power over [lo, hi]
        if abs(power + 1) < 1e-12:
            return math.log(hi / lo)
        return (hi ** (power + 1) - lo ** (power + 1)) / (power + 1)
    return integral(1 - tau) / integral(-tau)


def _sample_power_law(rng, tau: float, lo: float, hi: float, size: int) -> np.ndarray:
    u = rng.random(size)
    if abs(tau - 1) < 1e-12:
        return lo * (hi / lo) ** u
    a = 1 - tau
    return (lo ** a + u * (hi ** a - lo ** a)) ** (1 / a)


def _degree_sequence(rng, n, tau1, avg_deg, max_deg):
    # pick the lower cutoff so the truncated law has the requested mean
    if avg_deg >= max_deg:
        raise InfeasibleParameters(
            f"avg_deg={avg_deg} is not below the largest feasible degree {max_deg}"
        )
    lo, hi = 1.0, float(max_deg)
    if _power_law_mean(tau1, lo, hi) > avg_deg:
        raise InfeasibleParameters(
            f"avg_deg={avg_deg} is below the mean of the degree law on [1, {max_deg}]"
        )
    a, b = lo, hi
    for _ in range(200):
        mid = 0.5 * (a + b)
        if _power_law_mean(tau1, mid, hi) < avg_deg:
            a = mid
        else:
            b = mid
    x = _sample_power_law(rng, tau1, 0.5 * (a + b), hi, n)
    deg = np.clip(np.rint(x), 1, max_deg).astype(np.int64)
    if deg.sum() % 2:
        deg[np.argmax(deg)] -= 1
    return deg


def _community_sizes(rng, n, tau2, c_min, c_max):
    sizes = []
    total = 0
    while total < n:
        s = int(np.clip(np.rint(_sample_power_law(rng, tau2, c_min, c_max + 0.5, 1)[0]),
                        c_min, c_max))
        sizes.append(s)
        total += s
    excess = total - n
    # shave the overshoot off communities that stay above c_min
    i = 0
    while excess > 0:
        j = i % len(sizes)
        if sizes[j] > c_min:
            sizes[j] -= 1
            excess -= 1
        i += 1
        if i > 10 * n * len(sizes):
            raise InfeasibleParameters(
                f"cannot split n={n} into communities of size [{c_min}, {c_max}]"
            )
    return np.array(sizes, dtype=np.int64)


def _stub_match(rng, stubs, forbid_same=None):
    """Pair shuffled stubs; returns ``(u, v)`` arrays with possible loops/multi-edges."""
    stubs = rng.permutation(stubs)
    if len(stubs) % 2:
        stubs = stubs[:-1]
    return stubs[0::2], stubs[1::2]


def _simplify(rng, u, v, n, comm=None, tries=200):
    """Remove loops, multi-edges and (for external edges) intra-community pairs.

    Each offending edge ``(a, b)`` is repaired by a checked double-edge swap
    with a random good edge ``(c, d)`` of the same pool, giving ``(a, d)`` and
    ``(c, b)``; degrees are preserved. Edges still bad after ``tries`` swap
    attempts are dropped.
    """
    u = u.tolist()
    v = v.tolist()

    def ok(a, b):
        return a != b and (comm is None or comm[a] != comm[b])

    present = set()
    bad = []
    for e, (a, b) in enumerate(zip(u, v)):
        key = (min(a, b), max(a, b))
        if ok(a, b) and key not in present:
            present.add(key)
        else:
            bad.append(e)
    good = sorted(set(range(len(u))) - set(bad))
    dropped = set()
    for e in bad:
        a, b = u[e], v[e]
        fixed = False
        for _ in range(tries):
            if not good:
                break
            f = good[int(rng.integers(len(good)))]
            c, d = u[f], v[f]
            if rng.random() < 0.5:
                c, d = d, c
            k1 = (min(a, d), max(a, d))
            k2 = (min(c, b), max(c, b))
            if not (ok(a, d) and ok(c, b)) or k1 == k2 or k1 in present or k2 in present:
                continue
            present.discard((min(c, d), max(c, d)))
            present.add(k1)
            present.add(k2)
            u[f], v[f] = a, d
            u[e], v[e] = c, b
            good.append(e)
            fixed = True
            break
        if not fixed:
            dropped.add(e)
    keep = np.array([e not in dropped for e in range(len(u))], dtype=bool)
    return np.asarray(u, dtype=np.int64)[keep], np.asarray(v, dtype=np.int64)[keep]


def lfr_like(n: int = 1000, tau1: float = 2.0, tau2: float = 3.0, mu_nominal: float = 0.3,
             avg_deg: float = 10.0, c_min: int = 20, c_max: int = 50, seed=None,
             max_attempts: int = 20, mu_tolerance: float = 0.03) -> BenchmarkInstance:
    """Approximate LFR benchmark (planted partition with power-law degrees and sizes).

    Degrees follow a truncated power law with exponent ``tau1`` whose lower
    cutoff is tuned to the requested mean; the upper cutoff is the largest
    degree whose internal share still fits in a community of size ``c_max``.
    Community sizes follow a power law with exponent ``tau2`` on
    ``[c_min, c_max]``. Internal and external stubs are matched by a
    configuration model and then simplified. The realized mixing parameter
    must land within ``mu_tolerance`` of ``mu_nominal``; otherwise the network
    is regenerated with the next sub-seed, up to ``max_attempts`` times.
    """
    if not 0 < mu_nominal < 1:
        raise InfeasibleParameters("mu_nominal must lie in (0, 1)")
    if not 1 <= c_min <= c_max <= n:
        raise InfeasibleParameters(f"need 1 <= c_min <= c_max <= n, got {c_min}, {c_max}, {n}")
    if math.floor((c_max - 1) / (1 - mu_nominal)) <= avg_deg:
        raise InfeasibleParameters(
            f"avg_deg={avg_deg} needs nodes whose internal degree cannot fit in "
            f"communities of at most {c_max} nodes at mu={mu_nominal}"
        )
    nominal = {"family": "lfr", "n": n, "tau1": tau1, "tau2": tau2, "mu": mu_nominal,
               "avg_deg": avg_deg, "c_min": c_min, "c_max": c_max}
    root = np.random.SeedSequence(seed)
    children = root.spawn(max_attempts)
    reason = ""
    for attempt in range(max_attempts):
        rng = np.random.default_rng(children[attempt])
        try:
            inst = _lfr_attempt(rng, n, tau1, tau2, mu_nominal, avg_deg, c_min, c_max)
        except _Retry as exc:
            reason = str(exc)
            continue
        if abs(inst.realized_mu - mu_nominal) <= mu_tolerance:
            return BenchmarkInstance(inst.graph, inst.truth, {**nominal, "attempts": attempt + 1},
                                     inst.realized_mu)
        reason = f"realized mu {inst.realized_mu:.3f} missed {mu_nominal} +/- {mu_tolerance}"
    raise InfeasibleParameters(f"{reason} (after {max_attempts} attempts)")


class _Retry(Exception):
    """A random draw could not be completed; try the next sub-seed."""


def _lfr_attempt(rng, n, tau1, tau2, mu, avg_deg, c_min, c_max):
    sizes = _community_sizes(rng, n, tau2, c_min, c_max)
    # largest degree whose internal share still fits the largest community
    max_deg = min(n - 1, int(math.floor((sizes.max() - 1) / (1 - mu))))
    if max_deg <= avg_deg:
        raise _Retry(f"largest community ({sizes.max()}) too small for avg_deg={avg_deg}")
    deg = _degree_sequence(rng, n, tau1, avg_deg, max_deg)
    # stochastic rounding keeps the expected external share at mu
    share = (1 - mu) * deg
    internal = np.floor(share + rng.random(n)).astype(np.int64)
    internal = np.minimum(np.minimum(internal, deg), sizes.max() - 1)
    # place the most demanding nodes first, each into a random community with room
    comm = np.full(n, -1, dtype=np.int64)
    room = sizes.copy()
    for i in np.argsort(-internal, kind="stable").tolist():
        ok = np.flatnonzero((room > 0) & (sizes - 1 >= internal[i]))
        if len(ok) == 0:
            raise _Retry(f"no community left that can host internal degree {internal[i]}")
        c = ok[rng.integers(len(ok))]
        comm[i] = c
        room[c] -= 1
    external = deg - internal
    src, dst = [], []
    for c in range(len(sizes)):
        members = np.flatnonzero(comm == c)
        stubs = np.repeat(members, internal[members])
        u, v = _stub_match(rng, stubs)
        u, v = _simplify(rng, u, v, n)
        src.append(u)
        dst.append(v)
    stubs = np.repeat(np.arange(n), external)
    u, v = _stub_match(rng, stubs)
    u, v = _simplify(rng, u, v, n, comm=comm)
    src.append(u)
    dst.append(v)
    src = np.concatenate(src)
    dst = np.concatenate(dst)
    # external rewiring can recreate an internal edge already present
    lo, hi = np.minimum(src, dst), np.maximum(src, dst)
    _, first = np.unique(lo * n + hi, return_index=True)
    first.sort()
    g = Graph(n, src[first], dst[first])
    truth = comm + 1
    return _instance(g, truth, {})
