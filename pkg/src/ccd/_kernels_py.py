"""Pure-Python inner loops; the reference the Cython module must reproduce bit for bit.

All kernels take a CSR adjacency (``indptr``, ``indices``, ``weights``) that
may contain self-loops; self-loops never count towards a node's links to a
community. Arithmetic is written in the same order as ``_kernels.pyx``.
"""


def louvain_move(indptr, indices, weights, strength, comm, comm_tot, order,
                 resolution, m2, max_sweeps):
    """Best-improvement local moving; updates ``comm``/``comm_tot`` in place.

    Returns the total number of node moves.
    """
    indptr = indptr.tolist()
    indices = indices.tolist()
    weights = weights.tolist()
    strength = strength.tolist()
    order = order.tolist()
    c = comm.tolist()
    tot = comm_tot.tolist()
    moves = 0
    for _ in range(max_sweeps):
        sweep_moves = 0
        for i in order:
            ci = c[i]
            ki = strength[i]
            links = {}
            for e in range(indptr[i], indptr[i + 1]):
                j = indices[e]
                if j == i:
                    continue
                cj = c[j]
                if cj in links:
                    links[cj] += weights[e]
                else:
                    links[cj] = weights[e]
            tot[ci] -= ki
            best_c = ci
            best_gain = links.get(ci, 0.0) - resolution * ki * tot[ci] / m2
            for cc, w in links.items():
                if cc == ci:
                    continue
                gain = w - resolution * ki * tot[cc] / m2
                if gain > best_gain:
                    best_gain = gain
                    best_c = cc
            tot[best_c] += ki
            if best_c != ci:
                c[i] = best_c
                sweep_moves += 1
        moves += sweep_moves
        if sweep_moves == 0:
            break
    comm[:] = c
    comm_tot[:] = tot
    return moves


def leiden_refine(indptr, indices, weights, strength, part, part_tot, order,
                  resolution, m2, refined):
    """Merge singletons into well-connected sub-communities of ``part``.

    ``refined`` must arrive as ``arange(n)`` and is updated in place. A node
    only joins a refined community it has an edge to, so refined communities
    stay connected. Returns the number of merges.
    """
    indptr = indptr.tolist()
    indices = indices.tolist()
    weights = weights.tolist()
    strength = strength.tolist()
    part = part.tolist()
    part_tot = part_tot.tolist()
    order = order.tolist()
    n = len(strength)
    gamma = resolution / m2
    r = list(range(n))
    r_tot = list(strength)
    r_size = [1] * n
    r_ext = [0.0] * n
    for i in range(n):
        s = 0.0
        for e in range(indptr[i], indptr[i + 1]):
            j = indices[e]
            if j != i and part[j] == part[i]:
                s += weights[e]
        r_ext[i] = s
    merges = 0
    for v in order:
        rv = r[v]
        if r_size[rv] > 1:
            continue
        kv = strength[v]
        stot = part_tot[part[v]]
        if r_ext[rv] < gamma * kv * (stot - kv):
            continue
        links = {}
        for e in range(indptr[v], indptr[v + 1]):
            j = indices[e]
            if j == v or part[j] != part[v]:
                continue
            rj = r[j]
            if rj in links:
                links[rj] += weights[e]
            else:
                links[rj] = weights[e]
        best_c = -1
        best_gain = 0.0
        best_w = 0.0
        for cc, w in links.items():
            if cc == rv:
                continue
            if r_ext[cc] < gamma * r_tot[cc] * (stot - r_tot[cc]):
                continue
            gain = w - gamma * kv * r_tot[cc]
            if gain >= best_gain and (best_c == -1 or gain > best_gain):
                best_gain = gain
                best_c = cc
                best_w = w
        if best_c != -1:
            r_ext[best_c] = r_ext[best_c] + r_ext[rv] - 2.0 * best_w
            r_tot[best_c] += kv
            r_size[best_c] += 1
            r_size[rv] -= 1
            r[v] = best_c
            merges += 1
    refined[:] = r
    return merges


def lp_sweep(indptr, indices, weights, labels, order, ties):
    """One asynchronous label-propagation sweep in ``order``.

    Each node takes the label with the largest incident weight; among tied
    labels the one at position ``int(ties[pos] * n_tied)`` (first-seen order)
    wins. Returns the number of label changes.
    """
    indptr = indptr.tolist()
    indices = indices.tolist()
    weights = weights.tolist()
    lab = labels.tolist()
    changed = 0
    for pos, i in enumerate(order.tolist()):
        links = {}
        for e in range(indptr[i], indptr[i + 1]):
            j = indices[e]
            if j == i:
                continue
            lj = lab[j]
            if lj in links:
                links[lj] += weights[e]
            else:
                links[lj] = weights[e]
        if not links:
            continue
        best = max(links.values())
        tied = [l for l, w in links.items() if w == best]
        pick = int(ties[pos] * len(tied))
        if pick >= len(tied):
            pick = len(tied) - 1
        new = tied[pick]
        if new != lab[i]:
            lab[i] = new
            changed += 1
    labels[:] = lab
    return changed


def lp_is_stable(indptr, indices, weights, labels):
    """True when every node's label attains the maximum neighbour weight."""
    indptr = indptr.tolist()
    indices = indices.tolist()
    weights = weights.tolist()
    lab = labels.tolist()
    for i in range(len(lab)):
        links = {}
        for e in range(indptr[i], indptr[i + 1]):
            j = indices[e]
            if j == i:
                continue
            lj = lab[j]
            if lj in links:
                links[lj] += weights[e]
            else:
                links[lj] = weights[e]
        if links and links.get(lab[i], 0.0) < max(links.values()):
            return False
    return True
