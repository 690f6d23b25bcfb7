"""Immutable undirected weighted graph with contiguous node ids.

Nodes are ``0..n-1``; each carries an external string label. Edges are kept
in storage order, and the CSR adjacency built at construction lists each
node's neighbours in that same order, so shuffling the edge list changes the
order in which detectors visit neighbours.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class GraphFormatError(ValueError):
    """Raised for malformed edge rows or edge-list files."""


class Graph:
    """Simple undirected graph with strictly positive edge weights.

    Parameters
    ----------
    n : int
        Number of nodes.
    src, dst : array-like of int
        Edge endpoints, one entry per undirected edge.
    weight : array-like of float, optional
        Edge weights; defaults to 1.0 everywhere.
    labels : sequence of str, optional
        External node labels; defaults to the decimal node id.
    """

    __slots__ = (
        "n", "src", "dst", "weight", "labels",
        "indptr", "indices", "adj_weight", "strength", "_label_index",
    )

    def __init__(self, n, src, dst, weight=None, labels=None):
        src = np.asarray(src, dtype=np.int64).reshape(-1)
        dst = np.asarray(dst, dtype=np.int64).reshape(-1)
        if weight is None:
            weight = np.ones(len(src), dtype=np.float64)
        weight = np.asarray(weight, dtype=np.float64).reshape(-1)
        if not (len(src) == len(dst) == len(weight)):
            raise GraphFormatError("src, dst and weight must have equal length")
        n = int(n)
        if n < 0:
            raise GraphFormatError("negative node count")
        if len(src):
            if src.min() < 0 or dst.min() < 0 or max(src.max(), dst.max()) >= n:
                raise GraphFormatError("edge endpoint out of range")
            if np.any(src == dst):
                raise GraphFormatError("self-loops are not allowed")
            if np.any(~(weight > 0)):
                raise GraphFormatError("edge weights must be strictly positive")
            lo = np.minimum(src, dst)
            hi = np.maximum(src, dst)
            if len(np.unique(lo * n + hi)) != len(src):
                raise GraphFormatError("duplicate undirected edge")
        if labels is None:
            labels = tuple(str(i) for i in range(n))
        else:
            labels = tuple(str(x) for x in labels)
            if len(labels) != n:
                raise GraphFormatError("need exactly one label per node")
            if len(set(labels)) != n:
                raise GraphFormatError("node labels must be unique")

        for arr in (src, dst, weight):
            arr.flags.writeable = False
        self.n = n
        self.src = src
        self.dst = dst
        self.weight = weight
        self.labels = labels
        self._label_index = None
        self._build_adjacency()

    def _build_adjacency(self):
        n, m = self.n, len(self.src)
        # each edge appears twice; interleaving keeps per-node neighbour order
        # equal to edge storage order
        rows = np.empty(2 * m, dtype=np.int64)
        cols = np.empty(2 * m, dtype=np.int64)
        rows[0::2], rows[1::2] = self.src, self.dst
        cols[0::2], cols[1::2] = self.dst, self.src
        w = np.repeat(self.weight, 2)
        order = np.argsort(rows, kind="stable")
        self.indices = cols[order]
        self.adj_weight = w[order]
        counts = np.bincount(rows, minlength=n)
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=self.indptr[1:])
        self.strength = np.bincount(rows, weights=w, minlength=n).astype(np.float64)
        for arr in (self.indices, self.adj_weight, self.indptr, self.strength):
            arr.flags.writeable = False

    @property
    def m(self) -> int:
        return len(self.src)

    @property
    def total_weight(self) -> float:
        return float(self.weight.sum())

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def index_of(self, label: str) -> int:
        """Node id carrying ``label``."""
        if self._label_index is None:
            self._label_index = {lab: i for i, lab in enumerate(self.labels)}
        try:
            return self._label_index[str(label)]
        except KeyError:
            raise KeyError(f"no node labelled {label!r}") from None

    def edges(self):
        """Iterate ``(u, v, w)`` in storage order."""
        for u, v, w in zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist()):
            yield u, v, w

    def relabel(self, labels: Sequence[str]) -> "Graph":
        return Graph(self.n, self.src, self.dst, self.weight, labels)

    def is_unweighted(self) -> bool:
        return bool(np.all(self.weight == 1.0))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and self.labels == other.labels
            and np.array_equal(self.src, other.src)
            and np.array_equal(self.dst, other.dst)
            and np.array_equal(self.weight, other.weight)
        )

    __hash__ = None

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class Permutation:
    """Node relabelling ``old id -> forward[old id]`` drawn from ``seed``."""

    forward: np.ndarray
    seed: object = None

    @property
    def inverse(self) -> np.ndarray:
        inv = np.empty_like(self.forward)
        inv[self.forward] = np.arange(len(self.forward))
        return inv

    def pull_back(self, membership) -> np.ndarray:
        """Map a membership vector over permuted ids back to original ids."""
        membership = np.asarray(membership)
        return membership[self.forward]

    def push_forward(self, membership) -> np.ndarray:
        membership = np.asarray(membership)
        out = np.empty_like(membership)
        out[self.forward] = membership
        return out


def from_edge_list(rows: Iterable[Sequence]) -> Graph:
    """Build a graph from ``(label, label[, weight])`` rows.

    Labels are interned to dense ids in order of first appearance, duplicate
    undirected edges are merged by summing their weights, and a missing weight
    counts as 1.0.
    """
    index: dict[str, int] = {}
    merged: dict[tuple[int, int], float] = {}
    for k, row in enumerate(rows):
        if len(row) not in (2, 3):
            raise GraphFormatError(f"row {k}: expected 2 or 3 fields, got {len(row)}")
        a, b = str(row[0]), str(row[1])
        if a == b:
            raise GraphFormatError(f"row {k}: self-loop on {a!r}")
        w = 1.0 if len(row) == 2 or row[2] is None else float(row[2])
        if not w > 0:
            raise GraphFormatError(f"row {k}: non-positive weight {w!r}")
        u = index.setdefault(a, len(index))
        v = index.setdefault(b, len(index))
        key = (u, v) if u < v else (v, u)
        merged[key] = merged.get(key, 0.0) + w
    if not index:
        raise GraphFormatError("edge list is empty")
    src = [u for u, _ in merged]
    dst = [v for _, v in merged]
    return Graph(len(index), src, dst, list(merged.values()), list(index))


def read_edge_list(path) -> Graph:
    """Read a ``source<TAB>target[<TAB>weight]`` file; ``#`` starts a comment."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split("\t") if "\t" in line else line.split()
            if len(fields) not in (2, 3):
                raise GraphFormatError(f"{path}:{lineno}: expected 2 or 3 fields")
            if len(fields) == 3:
                try:
                    fields[2] = float(fields[2])
                except ValueError:
                    raise GraphFormatError(f"{path}:{lineno}: bad weight {fields[2]!r}") from None
            rows.append(fields)
    try:
        return from_edge_list(rows)
    except GraphFormatError as exc:
        raise GraphFormatError(f"{path}: {exc}") from None


def write_edge_list(g: Graph, path, weights: bool | None = None) -> None:
    """Write ``g`` in edge-list format; weights are omitted on unit-weight graphs."""
    if weights is None:
        weights = not g.is_unweighted()
    lines = []
    for u, v, w in g.edges():
        if weights:
            lines.append(f"{g.labels[u]}\t{g.labels[v]}\t{w!r}")
        else:
            lines.append(f"{g.labels[u]}\t{g.labels[v]}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def permute(g: Graph, seed=None) -> tuple[Graph, Permutation]:
    """Relabel nodes by a uniform random bijection and shuffle edge order.

    The returned graph keeps the original external labels attached to their
    nodes, so ``permuted.labels[perm.forward[i]] == g.labels[i]``.
    """
    rng = np.random.default_rng(seed)
    forward = rng.permutation(g.n).astype(np.int64)
    edge_order = rng.permutation(g.m)
    src = forward[g.src[edge_order]]
    dst = forward[g.dst[edge_order]]
    # endpoint orientation is also part of storage order
    flip = rng.random(g.m) < 0.5
    src, dst = np.where(flip, dst, src), np.where(flip, src, dst)
    labels = [None] * g.n
    for old, new in enumerate(forward.tolist()):
        labels[new] = g.labels[old]
    out = Graph(g.n, src, dst, g.weight[edge_order], labels)
    return out, Permutation(forward, seed)


def degree(g: Graph, i: int) -> tuple[int, float]:
    """Unweighted degree and strength of node ``i``."""
    if not 0 <= i < g.n:
        raise IndexError(f"node id {i} out of range for n={g.n}")
    return int(g.indptr[i + 1] - g.indptr[i]), float(g.strength[i])


def connected_components(g: Graph) -> np.ndarray:
    """Component membership labelled ``1..k`` in order of lowest node id."""
    labels = np.zeros(g.n, dtype=np.int64)
    indptr, indices = g.indptr, g.indices
    current = 0
    for start in range(g.n):
        if labels[start]:
            continue
        current += 1
        labels[start] = current
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in indices[indptr[u]:indptr[u + 1]].tolist():
                if not labels[v]:
                    labels[v] = current
                    queue.append(v)
    return labels


def k_coreness(g: Graph) -> np.ndarray:
    """Unweighted core number of every node by iterative peeling.

    Bucket-based peeling (Batagelj and Zaversnik), O(n + m).
    """
    n = g.n
    deg = np.diff(g.indptr).astype(np.int64)
    if n == 0:
        return deg
    max_deg = int(deg.max())
    # vert sorted by degree, pos[v] its index, bin_start[d] first slot of degree d
    bin_count = np.bincount(deg, minlength=max_deg + 1)
    bin_start = np.zeros(max_deg + 1, dtype=np.int64)
    np.cumsum(bin_count[:-1], out=bin_start[1:])
    vert = np.argsort(deg, kind="stable")
    pos = np.empty(n, dtype=np.int64)
    pos[vert] = np.arange(n)
    deg = deg.tolist()
    vert = vert.tolist()
    pos = pos.tolist()
    bin_start = bin_start.tolist()
    indptr, indices = g.indptr, g.indices
    for i in range(n):
        v = vert[i]
        for u in indices[indptr[v]:indptr[v + 1]].tolist():
            if deg[u] > deg[v]:
                du = deg[u]
                pu = pos[u]
                pw = bin_start[du]
                w = vert[pw]
                if u != w:
                    vert[pu], vert[pw] = w, u
                    pos[u], pos[w] = pw, pu
                bin_start[du] += 1
                deg[u] -= 1
    return np.asarray(deg, dtype=np.int64)
