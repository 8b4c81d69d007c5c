# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: attachment sampling and CSR traversal.

Mirrors :mod:`padiam._pykernels` operation for operation; both consume
the PCG64 double stream in the same order, so results are bit-identical
across backends.
"""

import numpy as np

from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from numpy.random cimport bitgen_t


cdef bitgen_t *_bitgen(object generator) except NULL:
    capsule = generator.bit_generator.capsule
    if not PyCapsule_IsValid(capsule, "BitGenerator"):
        raise ValueError("generator does not expose a BitGenerator capsule")
    return <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")


# ---------------------------------------------------------------------------
# attachment sampling


cdef void _sample_mixture(Py_ssize_t n, Py_ssize_t m, double delta,
                          bitgen_t *rng, int[::1] endpoints, int[::1] out) noexcept nogil:
    cdef Py_ssize_t t, j, k, idx, size, tm1
    cdef double shift, total_weight, u1, u2
    cdef int tgt
    for j in range(m):
        endpoints[2 * j] = 1
        endpoints[2 * j + 1] = 2
    size = 2 * m
    k = 0
    for t in range(3, n + 1):
        tm1 = t - 1
        shift = tm1 * delta
        for j in range(m):
            total_weight = size + shift
            u1 = rng.next_double(rng.state)
            u2 = rng.next_double(rng.state)
            if u1 * total_weight < size:
                idx = <Py_ssize_t>(u2 * size)
                if idx >= size:
                    idx = size - 1
                tgt = endpoints[idx]
            else:
                idx = <Py_ssize_t>(u2 * tm1)
                if idx >= tm1:
                    idx = tm1 - 1
                tgt = <int>(idx + 1)
            out[k] = tgt
            k += 1
            endpoints[size] = tgt
            size += 1
        for j in range(m):
            endpoints[size] = <int>t
            size += 1


cdef void _fenwick_add(double[::1] tree, Py_ssize_t size, Py_ssize_t v, double w) noexcept nogil:
    while v <= size:
        tree[v] += w
        v += v & (-v)


cdef void _sample_fenwick(Py_ssize_t n, Py_ssize_t m, double delta,
                          bitgen_t *rng, double[::1] tree, int[::1] out) noexcept nogil:
    cdef Py_ssize_t t, j, k, size, tm1, pos, bit, nxt, top_bit
    cdef double shift, x, w0
    cdef int tgt
    top_bit = 1
    while top_bit * 2 <= n:
        top_bit *= 2
    w0 = m + delta
    _fenwick_add(tree, n, 1, w0)
    _fenwick_add(tree, n, 2, w0)
    size = 2 * m
    k = 0
    for t in range(3, n + 1):
        tm1 = t - 1
        shift = tm1 * delta
        for j in range(m):
            x = rng.next_double(rng.state) * (size + shift)
            pos = 0
            bit = top_bit
            while bit:
                nxt = pos + bit
                if nxt <= n and tree[nxt] < x:
                    x -= tree[nxt]
                    pos = nxt
                bit >>= 1
            tgt = <int>(pos + 1)
            if tgt > tm1:
                tgt = <int>tm1
            out[k] = tgt
            k += 1
            size += 1
            _fenwick_add(tree, n, tgt, 1.0)
        _fenwick_add(tree, n, t, w0)


def sample_targets(Py_ssize_t n, Py_ssize_t m, double delta, object generator):
    """Attachment targets of one graph, in slot order (see _pykernels)."""
    cdef Py_ssize_t total = m * (n - 2)
    out = np.empty(total, dtype=np.int32)
    if total == 0:
        return out
    cdef int[::1] ov = out
    cdef bitgen_t *rng = _bitgen(generator)
    cdef int[::1] endpoints
    cdef double[::1] tree
    if delta >= 0.0:
        ep = np.empty(2 * m * (n - 1), dtype=np.int32)
        endpoints = ep
        with nogil:
            _sample_mixture(n, m, delta, rng, endpoints, ov)
    else:
        tr = np.zeros(n + 1, dtype=np.float64)
        tree = tr
        with nogil:
            _sample_fenwick(n, m, delta, rng, tree, ov)
    return out


def sample_targets_batch(Py_ssize_t n, Py_ssize_t m, double delta,
                         Py_ssize_t count, object generator):
    """Stack of ``count`` independent target arrays from one generator."""
    cdef Py_ssize_t total = m * (n - 2)
    out = np.empty((count, total), dtype=np.int32)
    if total == 0 or count == 0:
        return out
    cdef int[:, ::1] ov = out
    cdef bitgen_t *rng = _bitgen(generator)
    cdef Py_ssize_t row
    cdef int[::1] endpoints
    cdef double[::1] tree
    if delta >= 0.0:
        ep = np.empty(2 * m * (n - 1), dtype=np.int32)
        endpoints = ep
        with nogil:
            for row in range(count):
                _sample_mixture(n, m, delta, rng, endpoints, ov[row])
    else:
        tr = np.zeros(n + 1, dtype=np.float64)
        tree = tr
        with nogil:
            for row in range(count):
                tree[:] = 0.0
                _sample_fenwick(n, m, delta, rng, tree, ov[row])
    return out


# ---------------------------------------------------------------------------
# CSR traversal


def bfs_fill(const long long[::1] offsets, const int[::1] neighbors, Py_ssize_t source,
             Py_ssize_t max_radius, int[::1] dist):
    """Fill ``dist`` (all -1 on entry) with hop counts from ``source``."""
    cdef Py_ssize_t n = offsets.shape[0] - 2
    q = np.empty(n + 1, dtype=np.int32)
    cdef int[::1] queue = q
    cdef Py_ssize_t head = 0, tail = 0, k
    cdef int v, w, dv, ecc = 0
    dist[source] = 0
    queue[tail] = <int>source
    tail += 1
    with nogil:
        while head < tail:
            v = queue[head]
            head += 1
            dv = dist[v]
            if dv >= max_radius:
                break
            for k in range(offsets[v], offsets[v + 1]):
                w = neighbors[k]
                if dist[w] < 0:
                    dist[w] = dv + 1
                    if dv + 1 > ecc:
                        ecc = dv + 1
                    queue[tail] = w
                    tail += 1
    return ecc


def truncated_ball_size(const long long[::1] offsets, const int[::1] neighbors,
                        Py_ssize_t source, Py_ssize_t max_radius,
                        Py_ssize_t threshold, Py_ssize_t label_cap,
                        int[::1] dist, int[::1] queue):
    """min(ball size, threshold); scratch ``dist`` restored on exit."""
    cdef Py_ssize_t head = 0, tail = 0, k, count = 1
    cdef int v, w, dv
    cdef bint stop = False
    if count >= threshold:
        return threshold
    dist[source] = 0
    queue[tail] = <int>source
    tail += 1
    with nogil:
        while head < tail and not stop:
            v = queue[head]
            head += 1
            dv = dist[v]
            if dv >= max_radius:
                break
            for k in range(offsets[v], offsets[v + 1]):
                w = neighbors[k]
                if w <= label_cap and dist[w] < 0:
                    dist[w] = dv + 1
                    queue[tail] = w
                    tail += 1
                    count += 1
                    if count >= threshold:
                        stop = True
                        break
        for k in range(tail):
            dist[queue[k]] = -1
    return count


def pair_distance(const long long[::1] offsets, const int[::1] neighbors,
                  Py_ssize_t u, Py_ssize_t v,
                  int[::1] du, int[::1] dv, int[::1] qu, int[::1] qv):
    """Exact hop distance via bidirectional BFS; scratch restored on exit."""
    cdef Py_ssize_t k, e
    cdef Py_ssize_t ua = 0, ub = 1, va = 0, vb = 1  # frontier slices [a, b)
    cdef Py_ssize_t utail = 1, vtail = 1
    cdef Py_ssize_t ru = 0, rv = 0
    cdef long long best = 1 << 30
    cdef int x, w, other
    if u == v:
        return 0
    du[u] = 0
    dv[v] = 0
    qu[0] = <int>u
    qv[0] = <int>v
    with nogil:
        while best > ru + rv:
            if ub - ua == 0 or vb - va == 0:
                break
            if ub - ua <= vb - va:
                ru += 1
                for k in range(ua, ub):
                    x = qu[k]
                    for e in range(offsets[x], offsets[x + 1]):
                        w = neighbors[e]
                        if du[w] < 0:
                            du[w] = <int>ru
                            qu[utail] = w
                            utail += 1
                            other = dv[w]
                            if other >= 0 and ru + other < best:
                                best = ru + other
                ua = ub
                ub = utail
            else:
                rv += 1
                for k in range(va, vb):
                    x = qv[k]
                    for e in range(offsets[x], offsets[x + 1]):
                        w = neighbors[e]
                        if dv[w] < 0:
                            dv[w] = <int>rv
                            qv[vtail] = w
                            vtail += 1
                            other = du[w]
                            if other >= 0 and rv + other < best:
                                best = rv + other
                va = vb
                vb = vtail
        for k in range(utail):
            du[qu[k]] = -1
        for k in range(vtail):
            dv[qv[k]] = -1
    return best


def prefix_multi_source_fill(const long long[::1] offsets, const int[::1] neighbors,
                             Py_ssize_t cutoff, int[::1] dist):
    """Distances from the set {1..cutoff}; returns the maximum."""
    cdef Py_ssize_t n = offsets.shape[0] - 2
    q = np.empty(n + 1, dtype=np.int32)
    cdef int[::1] queue = q
    cdef Py_ssize_t head = 0, tail = 0, k
    cdef int v, w, dv, ecc = 0
    for k in range(1, cutoff + 1):
        dist[k] = 0
        queue[tail] = <int>k
        tail += 1
    with nogil:
        while head < tail:
            v = queue[head]
            head += 1
            dv = dist[v]
            for k in range(offsets[v], offsets[v + 1]):
                w = neighbors[k]
                if dist[w] < 0:
                    dist[w] = dv + 1
                    if dv + 1 > ecc:
                        ecc = dv + 1
                    queue[tail] = w
                    tail += 1
    return ecc


def distance_to_prefix(const long long[::1] offsets, const int[::1] neighbors,
                       Py_ssize_t source, Py_ssize_t cutoff):
    """Hop distance from ``source`` to the nearest label <= cutoff."""
    cdef Py_ssize_t n = offsets.shape[0] - 2
    if source <= cutoff:
        return 0
    d = np.full(n + 1, -1, dtype=np.int32)
    q = np.empty(n + 1, dtype=np.int32)
    cdef int[::1] dist = d
    cdef int[::1] queue = q
    cdef Py_ssize_t head = 0, tail = 0, k
    cdef int v, w, dv
    cdef long long found = -1
    dist[source] = 0
    queue[tail] = <int>source
    tail += 1
    with nogil:
        while head < tail:
            v = queue[head]
            head += 1
            if v <= cutoff:
                found = dist[v]
                break
            dv = dist[v]
            for k in range(offsets[v], offsets[v + 1]):
                w = neighbors[k]
                if dist[w] < 0:
                    dist[w] = dv + 1
                    queue[tail] = w
                    tail += 1
    return found
