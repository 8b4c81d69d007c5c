"""Pure-Python kernels: attachment sampling and CSR traversal.

Fallback for :mod:`padiam._ckernels`.  Both backends consume the PCG64
double stream in the same order and do the same IEEE-754 arithmetic, so
given the same generator state they produce bit-identical results.

Graph arrays are label-indexed: vertex labels are 1..n and slot 0 of
every per-vertex array is unused.
"""

from __future__ import annotations

import numpy as np

_EMPTY = np.empty(0, dtype=np.int32)


# ---------------------------------------------------------------------------
# attachment sampling


def _highest_bit(n):
    bit = 1
    while bit * 2 <= n:
        bit *= 2
    return bit


def _fenwick_add(tree, size, v, w):
    while v <= size:
        tree[v] += w
        v += v & (-v)


def sample_targets(n, m, delta, generator):
    """Draw the attachment targets of one graph, in slot order.

    Returns an int32 array of length m*(n-2); entry m*(t-3)+(i-1) is the
    target of the i-th edge of vertex t.  Consumes exactly 2*m*(n-2)
    uniform doubles when delta >= 0 and m*(n-2) when delta < 0.
    """
    total = m * (n - 2)
    out = np.empty(total, dtype=np.int32)
    if total == 0:
        return out
    if delta >= 0.0:
        us = generator.random(2 * total)
        _sample_mixture(n, m, delta, us, out)
    else:
        us = generator.random(total)
        _sample_fenwick(n, m, delta, us, out)
    return out


def _sample_mixture(n, m, delta, us, out):
    # endpoints[0:size] holds one entry per edge endpoint among vertices
    # that are valid targets; the current vertex's own endpoints are
    # appended only after its step completes.
    endpoints = np.empty(2 * m * (n - 1), dtype=np.int32)
    for i in range(m):
        endpoints[2 * i] = 1
        endpoints[2 * i + 1] = 2
    size = 2 * m
    k = 0
    for t in range(3, n + 1):
        tm1 = t - 1
        shift = tm1 * delta
        for _ in range(m):
            total_weight = size + shift
            u1 = us[2 * k]
            u2 = us[2 * k + 1]
            if u1 * total_weight < size:
                idx = int(u2 * size)
                if idx >= size:
                    idx = size - 1
                tgt = int(endpoints[idx])
            else:
                idx = int(u2 * tm1)
                if idx >= tm1:
                    idx = tm1 - 1
                tgt = idx + 1
            out[k] = tgt
            k += 1
            endpoints[size] = tgt
            size += 1
        for _ in range(m):
            endpoints[size] = t
            size += 1


def _sample_fenwick(n, m, delta, us, out):
    # Weights D_v + delta kept in a Fenwick tree; inverse-CDF sampling.
    # The normalizer is recomputed in closed form each edge, never summed.
    tree = [0.0] * (n + 1)
    top_bit = _highest_bit(n)
    w0 = m + delta
    _fenwick_add(tree, n, 1, w0)
    _fenwick_add(tree, n, 2, w0)
    size = 2 * m
    k = 0
    for t in range(3, n + 1):
        tm1 = t - 1
        shift = tm1 * delta
        for _ in range(m):
            x = us[k] * (size + shift)
            pos = 0
            bit = top_bit
            while bit:
                nxt = pos + bit
                if nxt <= n and tree[nxt] < x:
                    x -= tree[nxt]
                    pos = nxt
                bit >>= 1
            tgt = pos + 1
            if tgt > tm1:
                tgt = tm1
            out[k] = tgt
            k += 1
            size += 1
            _fenwick_add(tree, n, tgt, 1.0)
        _fenwick_add(tree, n, t, w0)


def sample_targets_batch(n, m, delta, count, generator):
    """Stack of ``count`` independent target arrays from one generator."""
    total = m * (n - 2)
    out = np.empty((count, total), dtype=np.int32)
    for row in range(count):
        out[row] = sample_targets(n, m, delta, generator)
    return out


# ---------------------------------------------------------------------------
# CSR traversal


def _gather(offsets, neighbors, frontier):
    starts = offsets[frontier]
    counts = offsets[frontier + 1] - starts
    total = int(counts.sum())
    if total == 0:
        return _EMPTY
    ends = np.cumsum(counts)
    idx = np.arange(total, dtype=np.int64) + np.repeat(starts - (ends - counts), counts)
    return neighbors[idx]


def bfs_fill(offsets, neighbors, source, max_radius, dist):
    """Fill ``dist`` (all -1 on entry) with hop counts from ``source``.

    Expansion stops at ``max_radius``; returns the largest level reached.
    """
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    level = 0
    while frontier.size and level < max_radius:
        neigh = _gather(offsets, neighbors, frontier)
        if neigh.size == 0:
            break
        fresh = neigh[dist[neigh] < 0]
        if fresh.size == 0:
            break
        fresh = np.unique(fresh)
        level += 1
        dist[fresh] = level
        frontier = fresh.astype(np.int64)
    return level


def truncated_ball_size(offsets, neighbors, source, max_radius, threshold,
                        label_cap, dist, queue):
    """min(|ball(source, max_radius)|, threshold), labels > label_cap excluded.

    ``dist`` is scratch (all -1 on entry, restored on exit); ``queue`` is
    accepted for interface parity with the compiled kernel.
    """
    n = offsets.shape[0] - 2
    count = 1
    if count >= threshold:
        return threshold
    dist[source] = 0
    touched = [np.array([source], dtype=np.int64)]
    frontier = touched[0]
    level = 0
    try:
        while frontier.size and level < max_radius and count < threshold:
            neigh = _gather(offsets, neighbors, frontier)
            if label_cap < n:
                neigh = neigh[neigh <= label_cap]
            if neigh.size == 0:
                break
            fresh = neigh[dist[neigh] < 0]
            if fresh.size == 0:
                break
            fresh = np.unique(fresh)
            level += 1
            dist[fresh] = level
            touched.append(fresh)
            count += fresh.size
            frontier = fresh.astype(np.int64)
    finally:
        for arr in touched:
            dist[arr] = -1
    return min(count, threshold)


def pair_distance(offsets, neighbors, u, v, du, dv, qu, qv):
    """Exact hop distance between u and v via bidirectional level BFS.

    ``du``/``dv`` are scratch distance arrays (all -1 on entry, restored
    on exit); ``qu``/``qv`` are accepted for interface parity.
    """
    if u == v:
        return 0
    du[u] = 0
    dv[v] = 0
    touched_u = [np.array([u], dtype=np.int64)]
    touched_v = [np.array([v], dtype=np.int64)]
    front_u = touched_u[0]
    front_v = touched_v[0]
    ru = rv = 0
    best = np.iinfo(np.int32).max
    try:
        while best > ru + rv:
            if front_u.size == 0 or front_v.size == 0:
                break
            if front_u.size <= front_v.size:
                ru += 1
                front_u = _expand_side(offsets, neighbors, front_u, du, ru)
                if front_u.size:
                    touched_u.append(front_u)
                    other = dv[front_u]
                    hit = other >= 0
                    if hit.any():
                        best = min(best, ru + int(other[hit].min()))
            else:
                rv += 1
                front_v = _expand_side(offsets, neighbors, front_v, dv, rv)
                if front_v.size:
                    touched_v.append(front_v)
                    other = du[front_v]
                    hit = other >= 0
                    if hit.any():
                        best = min(best, rv + int(other[hit].min()))
    finally:
        for arr in touched_u:
            du[arr] = -1
        for arr in touched_v:
            dv[arr] = -1
    return int(best)


def _expand_side(offsets, neighbors, frontier, dmine, level):
    neigh = _gather(offsets, neighbors, frontier)
    if neigh.size == 0:
        return _EMPTY.astype(np.int64)
    fresh = neigh[dmine[neigh] < 0]
    if fresh.size == 0:
        return _EMPTY.astype(np.int64)
    fresh = np.unique(fresh).astype(np.int64)
    dmine[fresh] = level
    return fresh


def prefix_multi_source_fill(offsets, neighbors, cutoff, dist):
    """Distances from the vertex set {1..cutoff}; returns the maximum."""
    frontier = np.arange(1, cutoff + 1, dtype=np.int64)
    dist[frontier] = 0
    level = 0
    while frontier.size:
        neigh = _gather(offsets, neighbors, frontier)
        if neigh.size == 0:
            break
        fresh = neigh[dist[neigh] < 0]
        if fresh.size == 0:
            break
        fresh = np.unique(fresh)
        level += 1
        dist[fresh] = level
        frontier = fresh.astype(np.int64)
    return level


def distance_to_prefix(offsets, neighbors, source, cutoff):
    """Hop distance from ``source`` to the nearest label <= cutoff."""
    if source <= cutoff:
        return 0
    n = offsets.shape[0] - 2
    dist = np.full(n + 1, -1, dtype=np.int32)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    level = 0
    while frontier.size:
        neigh = _gather(offsets, neighbors, frontier)
        fresh = neigh[dist[neigh] < 0]
        if fresh.size == 0:
            break
        fresh = np.unique(fresh)
        level += 1
        if fresh[0] <= cutoff:
            return level
        dist[fresh] = level
        frontier = fresh.astype(np.int64)
    return -1
