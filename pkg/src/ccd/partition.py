"""Membership vectors: relabelling, validation and the ``node<TAB>community`` file."""

from __future__ import annotations

from pathlib import Path

import numpy as np


class PartitionError(ValueError):
    pass


def relabel(membership, start: int = 1) -> np.ndarray:
    """Renumber labels contiguously from ``start`` in order of first appearance."""
    membership = np.asarray(membership)
    if membership.size == 0:
        return membership.astype(np.int64)
    uniq, first, inverse = np.unique(membership, return_index=True, return_inverse=True)
    rank = np.empty(len(uniq), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(uniq))
    return rank[inverse.reshape(-1)] + start


def n_communities(membership) -> int:
    return int(len(np.unique(np.asarray(membership))))


def community_sizes(membership) -> np.ndarray:
    _, counts = np.unique(np.asarray(membership), return_counts=True)
    return counts


def is_valid_partition(membership, n: int | None = None) -> bool:
    """True when labels cover ``1..k`` without gaps (and length is ``n`` if given)."""
    membership = np.asarray(membership)
    if n is not None and len(membership) != n:
        return False
    if membership.size == 0:
        return n == 0
    uniq = np.unique(membership)
    return bool(uniq[0] == 1 and uniq[-1] == len(uniq))


def check_lengths(*memberships) -> int:
    lengths = {len(np.asarray(m)) for m in memberships}
    if len(lengths) != 1:
        raise PartitionError(f"partition length mismatch: {sorted(lengths)}")
    return lengths.pop()


def split_disconnected(g, membership) -> np.ndarray:
    """Split every community into its connected components, labels ``1..k``."""
    membership = np.asarray(membership)
    seen = np.zeros(g.n, dtype=bool)
    out = np.zeros(g.n, dtype=np.int64)
    indptr, indices = g.indptr, g.indices
    label = 0
    for start in range(g.n):
        if seen[start]:
            continue
        label += 1
        c = membership[start]
        seen[start] = True
        out[start] = label
        stack = [start]
        while stack:
            u = stack.pop()
            for v in indices[indptr[u]:indptr[u + 1]].tolist():
                if not seen[v] and membership[v] == c:
                    seen[v] = True
                    out[v] = label
                    stack.append(v)
    return out


def read_partition(path, g=None) -> np.ndarray:
    """Read ``node<TAB>community`` lines.

    With a graph, rows are matched to node labels and every node must appear
    exactly once; without one, labels are taken in file order.
    """
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split("\t") if "\t" in line else line.split()
            if len(fields) != 2:
                raise PartitionError(f"{path}:{lineno}: expected 'node<TAB>community'")
            try:
                rows.append((fields[0], int(fields[1]), lineno))
            except ValueError:
                raise PartitionError(f"{path}:{lineno}: community must be an integer") from None
    if g is None:
        return np.array([c for _, c, _ in rows], dtype=np.int64)
    out = np.full(g.n, -1, dtype=np.int64)
    for node, c, lineno in rows:
        try:
            i = g.index_of(node)
        except KeyError:
            raise PartitionError(f"{path}:{lineno}: unknown node {node!r}") from None
        if out[i] != -1:
            raise PartitionError(f"{path}:{lineno}: node {node!r} listed twice")
        out[i] = c
    missing = np.flatnonzero(out == -1)
    if len(missing):
        raise PartitionError(
            f"{path}: {len(missing)} node(s) missing, first {g.labels[missing[0]]!r}"
        )
    return out


def write_partition(membership, labels, path) -> None:
    membership = np.asarray(membership)
    if len(membership) != len(labels):
        raise PartitionError("partition length does not match label count")
    text = "".join(f"{lab}\t{int(c)}\n" for lab, c in zip(labels, membership.tolist()))
    Path(path).write_text(text, encoding="utf-8")
