# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Must stay arithmetically identical to _kernels_py."""

import numpy as np
cimport numpy as cnp

ctypedef cnp.int64_t i64

cnp.import_array()


def louvain_move(const i64[::1] indptr, const i64[::1] indices,
                 const double[::1] weights, const double[::1] strength,
                 i64[::1] comm, double[::1] comm_tot, const i64[::1] order,
                 double resolution, double m2, int max_sweeps):
    cdef Py_ssize_t n = strength.shape[0]
    cdef i64[::1] pos = np.full(n, -1, dtype=np.int64)
    cdef i64[::1] seen = np.empty(n, dtype=np.int64)
    cdef double[::1] link = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t sweep, a, idx, nseen
    cdef i64 i, j, e, ci, cj, cc, best_c
    cdef long moves = 0, sweep_moves
    cdef double ki, best_gain, gain, own
    with nogil:
        for sweep in range(max_sweeps):
            sweep_moves = 0
            for idx in range(order.shape[0]):
                i = order[idx]
                ci = comm[i]
                ki = strength[i]
                nseen = 0
                for e in range(indptr[i], indptr[i + 1]):
                    j = indices[e]
                    if j == i:
                        continue
                    cj = comm[j]
                    if pos[cj] == -1:
                        pos[cj] = nseen
                        seen[nseen] = cj
                        link[nseen] = weights[e]
                        nseen += 1
                    else:
                        link[pos[cj]] += weights[e]
                comm_tot[ci] -= ki
                own = 0.0
                if pos[ci] != -1:
                    own = link[pos[ci]]
                best_c = ci
                best_gain = own - resolution * ki * comm_tot[ci] / m2
                for a in range(nseen):
                    cc = seen[a]
                    if cc == ci:
                        continue
                    gain = link[a] - resolution * ki * comm_tot[cc] / m2
                    if gain > best_gain:
                        best_gain = gain
                        best_c = cc
                comm_tot[best_c] += ki
                if best_c != ci:
                    comm[i] = best_c
                    sweep_moves += 1
                for a in range(nseen):
                    pos[seen[a]] = -1
            moves += sweep_moves
            if sweep_moves == 0:
                break
    return moves


def leiden_refine(const i64[::1] indptr, const i64[::1] indices,
                  const double[::1] weights, const double[::1] strength,
                  const i64[::1] part, const double[::1] part_tot,
                  const i64[::1] order, double resolution, double m2,
                  i64[::1] refined):
    cdef Py_ssize_t n = strength.shape[0]
    cdef double gamma = resolution / m2
    cdef double[::1] r_tot = np.array(strength, dtype=np.float64)
    cdef i64[::1] r_size = np.ones(n, dtype=np.int64)
    cdef double[::1] r_ext = np.zeros(n, dtype=np.float64)
    cdef i64[::1] pos = np.full(n, -1, dtype=np.int64)
    cdef i64[::1] seen = np.empty(n, dtype=np.int64)
    cdef double[::1] link = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t idx, a, nseen
    cdef i64 i, j, e, v, rv, rj, cc, best_c
    cdef long merges = 0
    cdef double s, kv, stot, gain, best_gain, best_w
    with nogil:
        for i in range(n):
            refined[i] = i
            s = 0.0
            for e in range(indptr[i], indptr[i + 1]):
                j = indices[e]
                if j != i and part[j] == part[i]:
                    s += weights[e]
            r_ext[i] = s
        for idx in range(order.shape[0]):
            v = order[idx]
            rv = refined[v]
            if r_size[rv] > 1:
                continue
            kv = strength[v]
            stot = part_tot[part[v]]
            if r_ext[rv] < gamma * kv * (stot - kv):
                continue
            nseen = 0
            for e in range(indptr[v], indptr[v + 1]):
                j = indices[e]
                if j == v or part[j] != part[v]:
                    continue
                rj = refined[j]
                if pos[rj] == -1:
                    pos[rj] = nseen
                    seen[nseen] = rj
                    link[nseen] = weights[e]
                    nseen += 1
                else:
                    link[pos[rj]] += weights[e]
            best_c = -1
            best_gain = 0.0
            best_w = 0.0
            for a in range(nseen):
                cc = seen[a]
                pos[cc] = -1
                if cc == rv:
                    continue
                if r_ext[cc] < gamma * r_tot[cc] * (stot - r_tot[cc]):
                    continue
                gain = link[a] - gamma * kv * r_tot[cc]
                if gain >= best_gain and (best_c == -1 or gain > best_gain):
                    best_gain = gain
                    best_c = cc
                    best_w = link[a]
            if best_c != -1:
                r_ext[best_c] = r_ext[best_c] + r_ext[rv] - 2.0 * best_w
                r_tot[best_c] += kv
                r_size[best_c] += 1
                r_size[rv] -= 1
                refined[v] = best_c
                merges += 1
    return merges


def lp_sweep(const i64[::1] indptr, const i64[::1] indices,
             const double[::1] weights, i64[::1] labels,
             const i64[::1] order, const double[::1] ties):
    cdef Py_ssize_t n = labels.shape[0]
    cdef i64[::1] pos = np.full(n, -1, dtype=np.int64)
    cdef i64[::1] seen = np.empty(n, dtype=np.int64)
    cdef double[::1] link = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t idx, a, nseen, ntied, pick
    cdef i64 i, j, e, lj, new
    cdef long changed = 0
    cdef double best
    with nogil:
        for idx in range(order.shape[0]):
            i = order[idx]
            nseen = 0
            for e in range(indptr[i], indptr[i + 1]):
                j = indices[e]
                if j == i:
                    continue
                lj = labels[j]
                if pos[lj] == -1:
                    pos[lj] = nseen
                    seen[nseen] = lj
                    link[nseen] = weights[e]
                    nseen += 1
                else:
                    link[pos[lj]] += weights[e]
            if nseen == 0:
                continue
            best = link[0]
            for a in range(1, nseen):
                if link[a] > best:
                    best = link[a]
            ntied = 0
            for a in range(nseen):
                if link[a] == best:
                    ntied += 1
            pick = <Py_ssize_t>(ties[idx] * ntied)
            if pick >= ntied:
                pick = ntied - 1
            new = -1
            for a in range(nseen):
                pos[seen[a]] = -1
                if link[a] == best and new == -1:
                    if pick == 0:
                        new = seen[a]
                    else:
                        pick -= 1
            if new != labels[i]:
                labels[i] = new
                changed += 1
    return changed


def lp_is_stable(const i64[::1] indptr, const i64[::1] indices,
                 const double[::1] weights, const i64[::1] labels):
    cdef Py_ssize_t n = labels.shape[0]
    cdef i64[::1] pos = np.full(n, -1, dtype=np.int64)
    cdef i64[::1] seen = np.empty(n, dtype=np.int64)
    cdef double[::1] link = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t a, nseen
    cdef i64 i, j, e, lj
    cdef double best, own
    cdef bint stable = True
    with nogil:
        for i in range(n):
            nseen = 0
            for e in range(indptr[i], indptr[i + 1]):
                j = indices[e]
                if j == i:
                    continue
                lj = labels[j]
                if pos[lj] == -1:
                    pos[lj] = nseen
                    seen[nseen] = lj
                    link[nseen] = weights[e]
                    nseen += 1
                else:
                    link[pos[lj]] += weights[e]
            if nseen == 0:
                continue
            best = link[0]
            own = 0.0
            for a in range(nseen):
                if link[a] > best:
                    best = link[a]
                if seen[a] == labels[i]:
                    own = link[a]
                pos[seen[a]] = -1
            if own < best:
                stable = False
                break
    return stable
