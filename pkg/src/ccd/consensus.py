"""Consensus community detection with per-node uncertainty.

Pipeline: run the base detector on ``t`` randomly permuted copies of the
graph, keep the valid partitions (``k > 1`` and ``mu <= 0.5``), prune those
least similar to the rest, accumulate pairwise co-occurrence, cut the
co-occurrence matrix at ``p`` into blocks, and resolve singleton blocks with
an outlier strategy.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .detectors import DetectorConfig, detect
from .graph import Graph, permute
from .metrics import is_valid, mixing_parameter, pairwise_similarity
from .partition import check_lengths, relabel

STRATEGIES = ("incorporate", "highlight", "group")
OUTLIER_LABEL = 0
_TIE_TOL = 1e-12


@dataclass(frozen=True)
class CcdConfig:
    t: int = 100
    p: float = 0.8
    q: float = 0.5
    outlier_strategy: str = "group"
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    resolution_range: tuple[float, float] | None = None
    master_seed: int = 0
    nmi_variant: str = "arithmetic"

    def __post_init__(self):
        if self.t < 1:
            raise ValueError("t must be >= 1")
        if not 0 < self.p <= 1:
            raise ValueError("p must lie in (0, 1]")
        if not 0 <= self.q < 1:
            raise ValueError("q must lie in [0, 1)")
        if self.outlier_strategy not in STRATEGIES:
            raise ValueError(f"unknown outlier strategy {self.outlier_strategy!r}")
        if self.resolution_range is not None:
            lo, hi = self.resolution_range
            if not 0 < lo <= hi:
                raise ValueError("resolution_range needs 0 < r_min <= r_max")
            object.__setattr__(self, "resolution_range", (float(lo), float(hi)))


@dataclass(frozen=True)
class CoOccurrenceMatrix:
    """Fraction of aggregated partitions that put each node pair together."""

    d: np.ndarray
    n_used: int

    def triplets(self):
        """Yield ``(i, j, d_ij)`` for ``i < j`` and ``d_ij > 0``."""
        iu, ju = np.nonzero(np.triu(self.d, k=1))
        for i, j in zip(iu.tolist(), ju.tolist()):
            yield i, j, float(self.d[i, j])

    def write_triplets(self, path, labels=None) -> None:
        lines = ["i,j,d_ij"]
        for i, j, v in self.triplets():
            a, b = (labels[i], labels[j]) if labels is not None else (i, j)
            lines.append(f"{a},{b},{_fmt(v)}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class ConsensusPartition:
    """Consensus labels with uncertainty.

    ``membership`` uses ``1..k``; label 0 is reserved for the grouped outlier
    community. ``gamma`` is 0 for nodes that always sat with their block.
    """

    membership: np.ndarray
    gamma: np.ndarray
    outlier_flags: np.ndarray
    trials_used: int = 0
    trials_valid: int = 0

    @property
    def k(self) -> int:
        """Number of communities, counting the outlier group as one."""
        return int(len(np.unique(self.membership)))

    @property
    def n_core(self) -> int:
        """Number of communities made of non-outlier nodes."""
        return int(len(np.unique(self.membership[~self.outlier_flags])))

    def to_csv(self, path, labels) -> None:
        write_consensus_csv(self, labels, path)


CSV_HEADER = "node_label,community,gamma,is_outlier"


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def write_consensus_csv(cp: ConsensusPartition | None, labels, path) -> None:
    """Write ``node_label,community,gamma,is_outlier``; ``None`` writes the header only."""
    lines = [CSV_HEADER]
    if cp is not None:
        for lab, c, gm, out in zip(labels, cp.membership.tolist(), cp.gamma.tolist(),
                                   cp.outlier_flags.tolist()):
            lines.append(f"{lab},{c},{_fmt(gm)},{int(out)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_consensus_csv(path):
    """Read a consensus CSV back; returns ``(labels, ConsensusPartition or None)``."""
    rows = Path(path).read_text(encoding="utf-8").splitlines()
    if not rows or rows[0].strip() != CSV_HEADER:
        raise ValueError(f"{path}: missing header {CSV_HEADER!r}")
    body = [r.split(",") for r in rows[1:] if r.strip()]
    if not body:
        return [], None
    labels = [r[0] for r in body]
    cp = ConsensusPartition(
        membership=np.array([int(r[1]) for r in body], dtype=np.int64),
        gamma=np.array([float(r[2]) for r in body]),
        outlier_flags=np.array([r[3] == "1" for r in body]),
    )
    return labels, cp


# --- trials ---------------------------------------------------------------

def trial_seeds(master_seed: int, index: int) -> tuple[np.random.SeedSequence, ...]:
    """Seeds for (permutation, detector, resolution) of trial ``index``.

    Derived only from ``(master_seed, index)``, so trials can run in any order.
    """
    return tuple(np.random.SeedSequence(master_seed, spawn_key=(index,)).spawn(3))


class Trial(NamedTuple):
    membership: np.ndarray
    k: int
    mu: float
    resolution: float
    valid: bool


def run_trial(g: Graph, cfg: CcdConfig, index: int) -> Trial:
    perm_seed, det_seed, res_seed = trial_seeds(cfg.master_seed, index)
    det = cfg.detector
    if cfg.resolution_range is not None:
        lo, hi = cfg.resolution_range
        r = float(np.random.default_rng(res_seed).uniform(lo, hi))
        det = replace(det, resolution=r)
    g_star, perm = permute(g, perm_seed)
    labels = perm.pull_back(detect(g_star, det.with_seed(det_seed)))
    labels = relabel(labels)
    k = int(labels.max())
    mu = mixing_parameter(g, labels)
    return Trial(labels, k, mu, det.resolution, is_valid(k, mu))


def run_trials(g: Graph, cfg: CcdConfig, threads: int = 1) -> list[Trial]:
    indices = range(cfg.t)
    if threads > 1 and cfg.t > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda i: run_trial(g, cfg, i), indices))
    return [run_trial(g, cfg, i) for i in indices]


def generate_valid_partitions(g: Graph, cfg: CcdConfig, threads: int = 1) -> list[np.ndarray]:
    """Memberships of the valid trials, in trial order (possibly empty)."""
    return [tr.membership for tr in run_trials(g, cfg, threads) if tr.valid]


# --- consensus ------------------------------------------------------------

def prune_by_quantile(partitions, q: float, variant: str = "arithmetic",
                      threads: int = 1) -> list[np.ndarray]:
    """Drop partitions whose mean NMI to the others is below the ``q``-quantile.

    The quantile is nearest-rank over the similarity scores; scores within
    1e-12 of the threshold count as ties and are kept. Lists of one or two
    partitions are returned unchanged.
    """
    partitions = list(partitions)
    if not partitions:
        raise ValueError("nothing to prune")
    if len(partitions) <= 2:
        return partitions
    scores, _ = pairwise_similarity(partitions, variant=variant, threads=threads)
    ordered = np.sort(scores)
    rank = max(1, math.ceil(q * len(scores)))
    threshold = ordered[rank - 1]
    return [p for p, s in zip(partitions, scores) if s >= threshold - _TIE_TOL]


def build_cooccurrence(partitions, n: int) -> CoOccurrenceMatrix:
    """Pairwise same-community frequency over ``partitions``; diagonal is 1."""
    partitions = list(partitions)
    if not partitions:
        raise ValueError("need at least one partition")
    if check_lengths(*partitions) != n:
        raise ValueError(f"partitions have length {len(partitions[0])}, expected {n}")
    counts = np.zeros((n, n), dtype=np.int64)
    for p in partitions:
        p = np.asarray(p)
        counts += p[:, None] == p[None, :]
    d = counts / len(partitions)
    np.fill_diagonal(d, 1.0)
    return CoOccurrenceMatrix(d, len(partitions))


def _blocks(d: np.ndarray, p: float) -> np.ndarray:
    """Components of the graph ``d_ij >= p``, numbered from the lowest free node."""
    n = len(d)
    linked = d >= p
    np.fill_diagonal(linked, False)
    labels = np.zeros(n, dtype=np.int64)
    current = 0
    for start in range(n):
        if labels[start]:
            continue
        current += 1
        labels[start] = current
        stack = [start]
        while stack:
            u = stack.pop()
            nxt = np.flatnonzero(linked[u] & (labels == 0))
            labels[nxt] = current
            stack.extend(nxt.tolist())
    return labels


def extract_blocks(D: CoOccurrenceMatrix, p: float) -> tuple[np.ndarray, np.ndarray]:
    """Cut the co-occurrence matrix at ``p`` into blocks and score uncertainty.

    For a node in a multi-node block, ``gamma = 1 - mean`` of its co-occurrence
    with the other block members. A singleton block gets ``1 - max``
    co-occurrence with any other node, i.e. its distance from the nearest
    community.
    """
    if not 0 < p <= 1:
        raise ValueError("p must lie in (0, 1]")
    d = D.d
    n = len(d)
    membership = _blocks(d, p)
    gamma = np.zeros(n)
    off = d.copy()
    np.fill_diagonal(off, -np.inf)
    for b in range(1, int(membership.max()) + 1 if n else 1):
        nodes = np.flatnonzero(membership == b)
        if len(nodes) == 1:
            j = nodes[0]
            gamma[j] = 1.0 - off[j].max() if n > 1 else 1.0
        else:
            sub = d[np.ix_(nodes, nodes)]
            gamma[nodes] = 1.0 - (sub.sum(axis=1) - 1.0) / (len(nodes) - 1)
    return membership, np.clip(gamma, 0.0, 1.0)


def apply_outlier_strategy(membership, gamma, D: CoOccurrenceMatrix,
                           strategy: str) -> ConsensusPartition:
    """Resolve singleton blocks.

    ``highlight`` keeps each singleton as its own community; ``group`` puts
    all singletons into community 0; ``incorporate`` moves each singleton into
    the multi-node block with the highest mean co-occurrence (ties to the lowest
    label). Incorporation needs at least one multi-node block; without one the
    singletons are kept as in ``highlight``.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown outlier strategy {strategy!r}")
    membership = np.asarray(membership, dtype=np.int64)
    gamma = np.asarray(gamma, dtype=np.float64)
    sizes = np.bincount(membership)
    singleton = sizes[membership] == 1
    flags = singleton.copy()
    if strategy == "highlight" or not singleton.any():
        out = relabel(membership)
    elif strategy == "group":
        out = np.zeros_like(membership)
        if (~singleton).any():
            out[~singleton] = relabel(membership[~singleton])
    else:
        multi = [b for b in range(1, len(sizes)) if sizes[b] > 1]
        out = membership.copy()
        if multi:
            members = [np.flatnonzero(membership == b) for b in multi]
            for j in np.flatnonzero(singleton).tolist():
                means = [D.d[j, idx].mean() for idx in members]
                out[j] = multi[int(np.argmax(means))]
            flags = np.zeros_like(singleton)
        out = relabel(out)
    return ConsensusPartition(out, gamma.copy(), flags)


def ccd(g: Graph, cfg: CcdConfig, threads: int = 1,
        return_matrix: bool = False):
    """Consensus community detection.

    Returns ``None`` when no trial yields a valid partition (the graph shows no
    community structure under this detector). With ``return_matrix`` the
    result is a ``(ConsensusPartition | None, CoOccurrenceMatrix | None)`` pair.
    """
    valid = generate_valid_partitions(g, cfg, threads)
    if not valid:
        return (None, None) if return_matrix else None
    kept = prune_by_quantile(valid, cfg.q, cfg.nmi_variant, threads)
    D = build_cooccurrence(kept, g.n)
    membership, gamma = extract_blocks(D, cfg.p)
    cp = apply_outlier_strategy(membership, gamma, D, cfg.outlier_strategy)
    cp = ConsensusPartition(cp.membership, cp.gamma, cp.outlier_flags,
                            trials_used=D.n_used, trials_valid=len(valid))
    return (cp, D) if return_matrix else cp


# --- recursive consensus baseline ------------------------------------------

class RecursiveResult(NamedTuple):
    membership: np.ndarray
    converged: bool
    depth: int


def _consensus_graph(d: np.ndarray, p: float, labels) -> Graph:
    n = len(d)
    off = d.copy()
    np.fill_diagonal(off, 0.0)
    keep = np.triu(off >= p, k=1)
    # a node left without edges keeps its strongest link
    isolated = ~(keep | keep.T).any(axis=1)
    for i in np.flatnonzero(isolated & (off.max(axis=1) > 0)).tolist():
        j = int(np.argmax(off[i]))
        keep[min(i, j), max(i, j)] = True
    iu, ju = np.nonzero(keep)
    return Graph(n, iu, ju, off[iu, ju], labels)


def recursive_consensus(g: Graph, detector: DetectorConfig, t: int = 100, p: float = 0.6,
                        max_depth: int = 10, seed: int = 0,
                        threads: int = 1) -> RecursiveResult:
    """Recursive consensus clustering baseline (Lancichinetti and Fortunato 2012).

    Runs the detector ``t`` times, thresholds the co-occurrence matrix at ``p``,
    and re-runs the detector on the resulting weighted graph until all ``t``
    partitions agree. Nodes whose links all fall below ``p`` keep their
    strongest one, which re-attaches them to their closest community.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    current = g
    membership = None
    for depth in range(1, max_depth + 1):
        cfg = CcdConfig(t=t, p=p, q=0.0, detector=detector,
                        master_seed=int(np.random.SeedSequence(seed, spawn_key=(depth,))
                                        .generate_state(1)[0]))
        parts = [tr.membership for tr in run_trials(current, cfg, threads)]
        D = build_cooccurrence(parts, g.n)
        membership = parts[0]
        if np.all((D.d == 0.0) | (D.d == 1.0)):
            return RecursiveResult(relabel(membership), True, depth)
        current = _consensus_graph(D.d, p, g.labels)
        if current.m == 0:
            break
    return RecursiveResult(relabel(membership), False, max_depth)
