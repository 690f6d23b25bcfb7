"""Louvain and Leiden modularity optimisation."""

from __future__ import annotations

import numpy as np

from .. import kernels
from ..partition import relabel, split_disconnected

MAX_LEVELS = 64


def _compact(labels: np.ndarray) -> tuple[np.ndarray, int]:
    """Renumber to ``0..k-1`` by first appearance."""
    out = relabel(labels, start=0)
    return out, int(out.max()) + 1 if len(out) else 0


def aggregate(indptr, indices, weights, comm, k):
    """Collapse nodes sharing a label in ``comm`` (``0..k-1``) into one node.

    Intra-community weight lands on the diagonal, so strengths are preserved.
    """
    rows = np.repeat(np.arange(len(indptr) - 1, dtype=np.int64), np.diff(indptr))
    key = comm[rows] * k + comm[indices]
    uniq, inverse = np.unique(key, return_inverse=True)
    agg_w = np.bincount(inverse.reshape(-1), weights=weights)
    agg_rows = uniq // k
    agg_cols = uniq % k
    agg_indptr = np.zeros(k + 1, dtype=np.int64)
    np.cumsum(np.bincount(agg_rows, minlength=k), out=agg_indptr[1:])
    return agg_indptr, agg_cols.astype(np.int64), agg_w.astype(np.float64)


def _csr(g):
    return (
        np.ascontiguousarray(g.indptr, dtype=np.int64),
        np.ascontiguousarray(g.indices, dtype=np.int64),
        np.ascontiguousarray(g.adj_weight, dtype=np.float64),
    )


def louvain(g, resolution: float = 1.0, seed=None, max_sweeps: int = 1000) -> np.ndarray:
    """Louvain modularity optimisation.

    Each level runs best-improvement local moves over nodes in a fresh random
    order, then aggregates communities into nodes; levels repeat until a
    local-move phase changes nothing.

    Returns
    -------
    ndarray
        Membership labels ``1..k``.
    """
    if g.n == 0:
        raise ValueError("graph is empty")
    if g.m == 0:
        return np.arange(1, g.n + 1, dtype=np.int64)
    rng = np.random.default_rng(seed)
    indptr, indices, weights = _csr(g)
    strength = np.ascontiguousarray(g.strength, dtype=np.float64)
    m2 = float(strength.sum())
    membership = np.arange(g.n, dtype=np.int64)
    for _ in range(MAX_LEVELS):
        nn = len(strength)
        comm = np.arange(nn, dtype=np.int64)
        tot = strength.copy()
        order = rng.permutation(nn).astype(np.int64)
        moves = kernels.louvain_move(indptr, indices, weights, strength, comm, tot,
                                     order, float(resolution), m2, int(max_sweeps))
        if moves == 0:
            break
        comm, k = _compact(comm)
        membership = comm[membership]
        if k == nn:
            break
        indptr, indices, weights = aggregate(indptr, indices, weights, comm, k)
        strength = np.bincount(comm, weights=strength, minlength=k)
    return relabel(membership)


def leiden(g, resolution: float = 1.0, seed=None, max_sweeps: int = 1000) -> np.ndarray:
    """Leiden modularity optimisation (local move, refine, aggregate).

    Aggregation uses the refined partition while the unrefined one seeds the
    next level, as in Traag, Waltman and van Eck (2019). Refinement merges are
    greedy (largest non-negative gain) rather than randomised. Communities of
    the returned partition always induce connected subgraphs.
    """
    if g.n == 0:
        raise ValueError("graph is empty")
    if g.m == 0:
        return np.arange(1, g.n + 1, dtype=np.int64)
    rng = np.random.default_rng(seed)
    indptr, indices, weights = _csr(g)
    strength = np.ascontiguousarray(g.strength, dtype=np.float64)
    m2 = float(strength.sum())
    membership = np.arange(g.n, dtype=np.int64)
    comm = np.arange(g.n, dtype=np.int64)
    for _ in range(MAX_LEVELS):
        nn = len(strength)
        tot = np.bincount(comm, weights=strength, minlength=nn)
        order = rng.permutation(nn).astype(np.int64)
        kernels.louvain_move(indptr, indices, weights, strength, comm, tot,
                             order, float(resolution), m2, int(max_sweeps))
        comm, k = _compact(comm)
        if k == nn:
            break
        part_tot = np.bincount(comm, weights=strength, minlength=k)
        refined = np.arange(nn, dtype=np.int64)
        kernels.leiden_refine(indptr, indices, weights, strength, comm, part_tot,
                              rng.permutation(nn).astype(np.int64), float(resolution), m2,
                              refined)
        refined, kr = _compact(refined)
        if kr == nn:
            # refinement found nothing to merge; aggregation would not shrink the graph
            break
        seed_part = np.empty(kr, dtype=np.int64)
        seed_part[refined] = comm
        indptr, indices, weights = aggregate(indptr, indices, weights, refined, kr)
        strength = np.bincount(refined, weights=strength, minlength=kr)
        membership = refined[membership]
        comm = seed_part
    return split_disconnected(g, comm[membership])
