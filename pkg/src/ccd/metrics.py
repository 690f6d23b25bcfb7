"""Partition quality: modularity, mixing parameter, NMI and the validity rule."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .partition import PartitionError, check_lengths

NMI_VARIANTS = ("arithmetic", "geometric", "max", "min")


@dataclass(frozen=True)
class PartitionQuality:
    k: int
    mu: float
    modularity: float
    valid: bool


def is_valid(k: int, mu: float) -> bool:
    """A partition is a usable community structure iff ``k > 1`` and ``mu <= 0.5``."""
    return k > 1 and mu <= 0.5


def _check(g, membership):
    membership = np.asarray(membership)
    if len(membership) != g.n:
        raise PartitionError(f"partition has {len(membership)} entries, graph has {g.n} nodes")
    return membership


def mixing_parameter(g, membership) -> float:
    """Fraction of total (weighted) degree that falls on inter-community edges."""
    membership = _check(g, membership)
    total = g.weight.sum()
    if total == 0:
        return 0.0
    external = g.weight[membership[g.src] != membership[g.dst]].sum()
    return float(external / total)


def modularity(g, membership, resolution: float = 1.0) -> float:
    """Weighted modularity with the null-model term scaled by ``resolution``.

    ``Q = 1/(2W) * sum_ij (A_ij - r * s_i * s_j / (2W)) * [c_i == c_j]``
    """
    membership = _check(g, membership)
    if g.m == 0:
        raise ValueError("modularity is undefined on a graph without edges")
    two_w = 2.0 * g.weight.sum()
    internal = 2.0 * g.weight[membership[g.src] == membership[g.dst]].sum()
    _, inverse = np.unique(membership, return_inverse=True)
    tot = np.bincount(inverse.reshape(-1), weights=g.strength)
    return float((internal - resolution * np.dot(tot, tot) / two_w) / two_w)


def assess(g, membership) -> PartitionQuality:
    membership = _check(g, membership)
    k = int(len(np.unique(membership)))
    mu = mixing_parameter(g, membership)
    q = modularity(g, membership) if g.m else 0.0
    return PartitionQuality(k=k, mu=mu, modularity=q, valid=is_valid(k, mu))


def _entropy(counts: np.ndarray, n: int) -> float:
    # sorted counts make the result independent of label order
    c = np.sort(counts[counts > 0]).astype(np.float64)
    h = math.log(n) - float(np.dot(c, np.log(c))) / n
    return max(h, 0.0)


class _Encoded:
    """Partition compacted to ``0..k-1`` with its entropy cached."""

    __slots__ = ("codes", "k", "h")

    def __init__(self, membership):
        _, inverse = np.unique(np.asarray(membership), return_inverse=True)
        self.codes = inverse.reshape(-1).astype(np.int64)
        self.k = int(self.codes.max()) + 1 if len(self.codes) else 0
        self.h = _entropy(np.bincount(self.codes), len(self.codes)) if len(self.codes) else 0.0


def _nmi_encoded(a: _Encoded, b: _Encoded, variant: str) -> float:
    n = len(a.codes)
    if a.h == 0.0 and b.h == 0.0:
        # both single-community
        return 1.0
    joint = np.bincount(a.codes * b.k + b.codes)
    h_joint = _entropy(joint, n)
    mi = max(a.h + b.h - h_joint, 0.0)
    if variant == "arithmetic":
        denom = 0.5 * (a.h + b.h)
    elif variant == "geometric":
        denom = math.sqrt(a.h * b.h)
    elif variant == "max":
        denom = max(a.h, b.h)
    elif variant == "min":
        denom = min(a.h, b.h)
    else:
        raise ValueError(f"unknown NMI variant {variant!r}; choose from {NMI_VARIANTS}")
    if denom == 0.0:
        return 0.0
    return min(max(mi / denom, 0.0), 1.0)


def nmi(c1, c2, variant: str = "arithmetic") -> float:
    """Normalized mutual information between two partitions of the same nodes.

    The default normalizes by the arithmetic mean of the two entropies,
    ``2 I / (H1 + H2)``. Two single-community partitions score 1; if exactly one
    partition has zero entropy the score is 0.
    """
    if variant not in NMI_VARIANTS:
        raise ValueError(f"unknown NMI variant {variant!r}; choose from {NMI_VARIANTS}")
    check_lengths(c1, c2)
    if len(np.asarray(c1)) == 0:
        raise PartitionError("cannot compare empty partitions")
    return _nmi_encoded(_Encoded(c1), _Encoded(c2), variant)


def pairwise_similarity(partitions, variant: str = "arithmetic", threads: int = 1):
    """Mean NMI of each partition against all the others.

    Returns
    -------
    scores : ndarray, shape (t,)
        ``scores[i]`` is the mean of ``matrix[i, j]`` over ``j != i``.
    matrix : ndarray, shape (t, t)
        Symmetric NMI matrix with unit diagonal.
    """
    if len(partitions) < 2:
        raise ValueError("pairwise similarity needs at least two partitions")
    check_lengths(*partitions)
    enc = [_Encoded(p) for p in partitions]
    t = len(enc)
    pairs = [(i, j) for i in range(t) for j in range(i + 1, t)]

    def score(pair):
        i, j = pair
        return _nmi_encoded(enc[i], enc[j], variant)

    if threads > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(score, pairs, chunksize=max(1, len(pairs) // (4 * threads))))
    else:
        values = [score(p) for p in pairs]
    matrix = np.eye(t)
    for (i, j), v in zip(pairs, values):
        matrix[i, j] = matrix[j, i] = v
    # fsum is exactly rounded, so equal rows give equal scores whatever their order
    scores = np.array(
        [math.fsum(matrix[i, :i].tolist() + matrix[i, i + 1:].tolist()) / (t - 1) for i in range(t)]
    )
    return scores, matrix
