"""Walktrap: agglomerative clustering on random-walk distances (Pons and Latapy 2005).

Dense transition powers are used, which keeps the implementation exact but
limits it to a few thousand nodes.
"""

from __future__ import annotations

import heapq

import numpy as np

from ..partition import relabel


def _walk_profiles(g, steps: int) -> np.ndarray:
    """Rows of ``P**steps`` scaled by ``1/sqrt(d_k)`` so distances are Euclidean."""
    n = g.n
    adj = np.zeros((n, n))
    np.add.at(adj, (g.src, g.dst), g.weight)
    np.add.at(adj, (g.dst, g.src), g.weight)
    deg = np.diff(g.indptr)
    # every vertex gets a loop of its mean incident weight (1 on isolated nodes)
    loop = np.where(deg > 0, g.strength / np.maximum(deg, 1), 1.0)
    adj[np.arange(n), np.arange(n)] += loop
    d = adj.sum(axis=1)
    trans = adj / d[:, None]
    walk = np.linalg.matrix_power(trans, steps)
    return walk / np.sqrt(d)[None, :]


def walktrap(g, steps: int = 4, seed=None) -> np.ndarray:
    """Walktrap communities, cut where modularity (r = 1) peaks.

    Adjacent communities are merged in order of smallest increase of the mean
    squared node-to-community distance. Ties go to the lowest community ids,
    so the result is deterministic for a given graph; ``seed`` is accepted for
    interface uniformity only.
    """
    if steps < 1:
        raise ValueError("walk length must be >= 1")
    n = g.n
    if n == 0:
        raise ValueError("graph is empty")
    if g.m == 0:
        return np.arange(1, n + 1, dtype=np.int64)

    profile = {i: row for i, row in enumerate(_walk_profiles(g, steps))}
    size = {i: 1 for i in range(n)}
    two_w = 2.0 * g.total_weight
    tot = {i: float(s) for i, s in enumerate(g.strength)}
    internal = {i: 0.0 for i in range(n)}
    links: dict[int, dict[int, float]] = {i: {} for i in range(n)}
    for u, v, w in g.edges():
        links[u][v] = links[u].get(v, 0.0) + w
        links[v][u] = links[v].get(u, 0.0) + w

    def delta_sigma(a, b):
        diff = profile[a] - profile[b]
        return (size[a] * size[b] / (size[a] + size[b])) * float(np.dot(diff, diff)) / n

    heap = []
    for a in range(n):
        for b in links[a]:
            if a < b:
                heap.append((delta_sigma(a, b), a, b))
    heapq.heapify(heap)

    q = -sum((t / two_w) ** 2 for t in tot.values())
    best_q, best_step = q, 0
    merges = []
    next_id = n
    while heap:
        _, a, b = heapq.heappop(heap)
        if a not in profile or b not in profile:
            continue
        c = next_id
        next_id += 1
        w_ab = links[a].get(b, 0.0)
        q -= internal[a] / two_w + internal[b] / two_w
        q += (tot[a] / two_w) ** 2 + (tot[b] / two_w) ** 2
        internal[c] = internal[a] + internal[b] + 2.0 * w_ab
        tot[c] = tot[a] + tot[b]
        q += internal[c] / two_w - (tot[c] / two_w) ** 2
        size[c] = size[a] + size[b]
        profile[c] = (size[a] * profile[a] + size[b] * profile[b]) / size[c]
        merged: dict[int, float] = {}
        for x in (a, b):
            for y, w in links[x].items():
                if y not in (a, b):
                    merged[y] = merged.get(y, 0.0) + w
                    del links[y][x]
        links[c] = merged
        for y, w in merged.items():
            links[y][c] = w
        for x in (a, b):
            del profile[x], size[x], tot[x], internal[x], links[x]
        for y in merged:
            heapq.heappush(heap, (delta_sigma(c, y), y, c))
        merges.append((a, b, c))
        if q > best_q:
            best_q, best_step = q, len(merges)

    parent = list(range(n + len(merges)))
    for a, b, c in merges[:best_step]:
        parent[a] = c
        parent[b] = c

    def root(x):
        while parent[x] != x:
            x = parent[x]
        return x

    return relabel(np.array([root(i) for i in range(n)], dtype=np.int64))
