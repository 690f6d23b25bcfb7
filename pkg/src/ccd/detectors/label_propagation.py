"""Asynchronous label propagation (Raghavan, Albert and Kumara 2007)."""

from __future__ import annotations

import numpy as np

from .. import kernels
from ..partition import relabel


def label_propagation(g, seed=None, max_sweeps: int = 100) -> np.ndarray:
    """Weighted asynchronous label propagation with uniform random tie-breaking.

    Every node starts with its own label. Each sweep visits nodes in a fresh
    random order and gives each the label carrying the most incident weight.
    Iteration stops once every node's label is among its neighbourhood maxima,
    or after ``max_sweeps`` sweeps.
    """
    if g.n == 0:
        raise ValueError("graph is empty")
    rng = np.random.default_rng(seed)
    indptr = np.ascontiguousarray(g.indptr, dtype=np.int64)
    indices = np.ascontiguousarray(g.indices, dtype=np.int64)
    weights = np.ascontiguousarray(g.adj_weight, dtype=np.float64)
    labels = np.arange(g.n, dtype=np.int64)
    for _ in range(max_sweeps):
        order = rng.permutation(g.n).astype(np.int64)
        ties = rng.random(g.n)
        kernels.lp_sweep(indptr, indices, weights, labels, order, ties)
        if kernels.lp_is_stable(indptr, indices, weights, labels):
            break
    return relabel(labels)
