"""Distances on preferential attachment graphs.

All distances are unweighted hop counts on the undirected view; parallel
edges count as a single connection.  Distance arrays are int32 and
label-indexed (entry 0 unused, set to -1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import stats as _sps

from . import backend
from .asymptotics import log_nu, regime_of
from .core import PAGraph, Params, SeedLike, as_generator

__all__ = [
    "bfs",
    "eccentricity",
    "all_eccentricities",
    "diameter_brute",
    "diameter_exact",
    "diameter_exact_stats",
    "pair_distance",
    "DistanceSample",
    "typical_distance",
    "GrowthProfile",
    "neighborhood_profile",
    "min_neighborhood_size",
    "distance_to_old_set",
    "old_set_distances",
    "DistanceReport",
    "distance_report",
]


def bfs(g: PAGraph, source: int, radius: int | None = None) -> np.ndarray:
    """Hop distances from ``source`` to every vertex.

    Returns an int32 array of length n+1; entry v is the distance to
    vertex v (entry 0 is -1 and unused).  With ``radius`` set, vertices
    further than that keep -1.
    """
    source = g.check_vertex(source)
    if radius is None:
        radius = g.n
    elif radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    dist = np.full(g.n + 1, -1, dtype=np.int32)
    backend.bfs_fill(g.offsets, g.neighbors, source, int(radius), dist)
    return dist


def eccentricity(g: PAGraph, source: int) -> int:
    source = g.check_vertex(source)
    dist = np.full(g.n + 1, -1, dtype=np.int32)
    return int(backend.bfs_fill(g.offsets, g.neighbors, source, g.n, dist))


def all_eccentricities(g: PAGraph) -> np.ndarray:
    """Eccentricity of every vertex by one BFS per vertex (quadratic oracle)."""
    ecc = np.zeros(g.n + 1, dtype=np.int32)
    ecc[0] = -1
    dist = np.empty(g.n + 1, dtype=np.int32)
    for v in range(1, g.n + 1):
        dist.fill(-1)
        ecc[v] = backend.bfs_fill(g.offsets, g.neighbors, v, g.n, dist)
    return ecc


def diameter_brute(g: PAGraph) -> int:
    """All-sources-BFS maximum distance; the slow reference for diameter_exact."""
    return int(all_eccentricities(g)[1:].max())


def diameter_exact(g: PAGraph) -> int:
    """Exact diameter via iterative eccentricity-bound pruning."""
    return diameter_exact_stats(g)[0]


def diameter_exact_stats(g: PAGraph) -> tuple[int, int]:
    """Exact diameter plus the number of BFS runs spent.

    After each BFS from s with eccentricity e, every vertex v gains the
    bounds ecc(v) >= max(d(s,v), e - d(s,v)) and ecc(v) <= d(s,v) + e.
    The loop stops once no vertex's upper bound exceeds the best lower
    bound, which certifies exactness; pruning only skips vertices whose
    bounds already preclude a larger eccentricity.  Sources are seeded
    by a double sweep and then alternate between the largest remaining
    upper bound and the smallest remaining lower bound.
    """
    n = g.n
    if n == 2:
        return 1, 0
    lo = np.zeros(n + 1, dtype=np.int64)
    hi = np.full(n + 1, np.iinfo(np.int64).max, dtype=np.int64)
    lo[0] = -1
    hi[0] = -1
    dist = np.empty(n + 1, dtype=np.int32)
    nbfs = 0
    swept = set()

    def sweep(s: int) -> np.ndarray:
        nonlocal nbfs
        dist.fill(-1)
        ecc = backend.bfs_fill(g.offsets, g.neighbors, s, n, dist)
        d = dist[1:].astype(np.int64)
        np.maximum(lo[1:], np.maximum(d, ecc - d), out=lo[1:])
        np.minimum(hi[1:], d + ecc, out=hi[1:])
        nbfs += 1
        swept.add(s)
        return d

    s0 = int(np.argmax(g.degrees))
    d0 = sweep(s0)
    a = int(np.argmax(d0)) + 1
    if a not in swept:
        da = sweep(a)
        b = int(np.argmax(da)) + 1
        if b not in swept:
            sweep(b)
    pick_upper = True
    while True:
        diam_lb = int(lo[1:].max())
        active = np.flatnonzero(hi[1:] > diam_lb) + 1
        if active.size == 0:
            return diam_lb, nbfs
        if pick_upper:
            s = int(active[np.argmax(hi[active])])
        else:
            s = int(active[np.argmin(lo[active])])
        pick_upper = not pick_upper
        sweep(s)


def pair_distance(g: PAGraph, u: int, v: int) -> int:
    """Exact hop distance between u and v (bidirectional BFS)."""
    u = g.check_vertex(u)
    v = g.check_vertex(v)
    ws = _PairWorkspace(g.n)
    return ws.distance(g, u, v)


class _PairWorkspace:
    """Reusable scratch for repeated pair-distance queries on one graph."""

    def __init__(self, n: int):
        self.du = np.full(n + 1, -1, dtype=np.int32)
        self.dv = np.full(n + 1, -1, dtype=np.int32)
        self.qu = np.empty(n + 1, dtype=np.int32)
        self.qv = np.empty(n + 1, dtype=np.int32)

    def distance(self, g: PAGraph, u: int, v: int) -> int:
        return int(backend.pair_distance(
            g.offsets, g.neighbors, u, v, self.du, self.dv, self.qu, self.qv
        ))


@dataclass(frozen=True)
class DistanceSample:
    """Distances of uniformly sampled ordered vertex pairs."""

    distances: np.ndarray = field(repr=False)
    num_pairs: int
    mean: float
    median: float
    p90: float
    median_ci: tuple[float, float]


def typical_distance(g: PAGraph, num_pairs: int, seed: SeedLike) -> DistanceSample:
    """Sample distances of independent uniform ordered pairs (u, v).

    Pairs are drawn with replacement; u = v is kept and contributes
    distance 0.  ``median_ci`` is a 95% order-statistic confidence
    interval for the median.
    """
    if num_pairs < 1:
        raise ValueError(f"num_pairs must be >= 1, got {num_pairs}")
    num_pairs = int(num_pairs)
    rng = as_generator(seed)
    pairs = rng.integers(1, g.n + 1, size=(num_pairs, 2))
    ws = _PairWorkspace(g.n)
    out = np.empty(num_pairs, dtype=np.int32)
    for k in range(num_pairs):
        out[k] = ws.distance(g, int(pairs[k, 0]), int(pairs[k, 1]))
    ordered = np.sort(out)
    k_lo, k_hi = _sps.binom.interval(0.95, num_pairs, 0.5)
    ci = (
        float(ordered[max(int(k_lo) - 1, 0)]),
        float(ordered[min(int(k_hi), num_pairs - 1)]),
    )
    return DistanceSample(
        distances=out,
        num_pairs=num_pairs,
        mean=float(out.mean()),
        median=float(np.median(out)),
        p90=float(np.percentile(out, 90)),
        median_ci=ci,
    )


@dataclass(frozen=True)
class GrowthProfile:
    """Neighborhood growth of one vertex up to a radius.

    ``shell_sizes[r]`` counts vertices at exact distance r in the
    undirected graph; ``cumulative[r]`` is the ball size.
    ``ascendant_sizes[r]`` is the size of the ball restricted to paths
    that step only to strictly older vertices.
    """

    vertex: int
    shell_sizes: list[int]
    cumulative: list[int]
    ascendant_sizes: list[int]

    @property
    def ascendant_shells(self) -> list[int]:
        prev = 0
        out = []
        for size in self.ascendant_sizes:
            out.append(size - prev)
            prev = size
        return out


def neighborhood_profile(g: PAGraph, v: int, radius: int) -> GrowthProfile:
    """Shell sizes of the full and of the ascendant BFS up to ``radius``."""
    v = g.check_vertex(v)
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    full = bfs(g, v, radius=radius)
    shells = np.bincount(full[full >= 0], minlength=radius + 1)[: radius + 1]
    asc_dist = np.full(g.n + 1, -1, dtype=np.int32)
    backend.bfs_fill(g.out_offsets, g.out_neighbors, v, int(radius), asc_dist)
    asc_shells = np.bincount(asc_dist[asc_dist >= 0], minlength=radius + 1)[: radius + 1]
    return GrowthProfile(
        vertex=v,
        shell_sizes=[int(x) for x in shells],
        cumulative=[int(x) for x in np.cumsum(shells)],
        ascendant_sizes=[int(x) for x in np.cumsum(asc_shells)],
    )


def min_neighborhood_size(g: PAGraph, radius: int, threshold: int) -> tuple[int, int]:
    """Smallest ball size at ``radius`` over all vertices, capped at threshold.

    Per-vertex BFS stops early once the running count reaches
    ``threshold`` (that vertex then reports exactly threshold).  Returns
    (min reported size, first vertex attaining it).
    """
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    if threshold < 1:
        raise ValueError(f"threshold must be >= 1, got {threshold}")
    dist = np.full(g.n + 1, -1, dtype=np.int32)
    queue = np.empty(g.n + 1, dtype=np.int32)
    best = np.iinfo(np.int64).max
    best_v = 0
    for v in range(1, g.n + 1):
        size = backend.truncated_ball_size(
            g.offsets, g.neighbors, v, int(radius), int(threshold), g.n,
            dist, queue,
        )
        if size < best:
            best = size
            best_v = v
            if best <= 1:
                break
    return int(best), int(best_v)


def distance_to_old_set(g: PAGraph, v: int, cutoff_label: int) -> int:
    """Hop distance from v to the nearest vertex with label <= cutoff_label."""
    v = g.check_vertex(v)
    cutoff = int(cutoff_label)
    if not 1 <= cutoff <= g.n:
        raise ValueError(f"cutoff_label {cutoff} out of range [1, {g.n}]")
    d = int(backend.distance_to_prefix(g.offsets, g.neighbors, v, cutoff))
    assert d >= 0, "graph is connected; the old set is always reachable"
    return d


def old_set_distances(g: PAGraph, cutoff_label: int) -> np.ndarray:
    """Distances of every vertex to the set {1..cutoff_label} (one pass)."""
    cutoff = int(cutoff_label)
    if not 1 <= cutoff <= g.n:
        raise ValueError(f"cutoff_label {cutoff} out of range [1, {g.n}]")
    dist = np.full(g.n + 1, -1, dtype=np.int32)
    backend.prefix_multi_source_fill(g.offsets, g.neighbors, cutoff, dist)
    return dist


@dataclass(frozen=True)
class DistanceReport:
    """Distance summary of one graph: diameter plus typical-distance stats."""

    n: int
    params: Params
    seed: int | None
    diameter: Optional[int]
    typical_samples: int
    typical_mean: float
    typical_median: float
    typical_p90: float
    median_ci: tuple[float, float]
    ratio_to_log_nu: Optional[dict]


def distance_report(g: PAGraph, num_pairs: int, seed: SeedLike,
                    compute_diameter: bool = True) -> DistanceReport:
    """Measure typical distances (and optionally the exact diameter) of g.

    Ratios against log_nu(n) are attached only in the m >= 2, delta > 0
    regime where that scale is defined.
    """
    sample = typical_distance(g, num_pairs, seed)
    diam = diameter_exact(g) if compute_diameter else None
    ratios = None
    if regime_of(g.params) == "positive_delta":
        denom = log_nu(g.n, g.params)
        ratios = {
            "mean": sample.mean / denom,
            "median": sample.median / denom,
            "p90": sample.p90 / denom,
        }
        if diam is not None:
            ratios["diameter"] = diam / denom
    return DistanceReport(
        n=g.n,
        params=g.params,
        seed=g.seed,
        diameter=diam,
        typical_samples=sample.num_pairs,
        typical_mean=sample.mean,
        typical_median=sample.median,
        typical_p90=sample.p90,
        median_ci=sample.median_ci,
        ratio_to_log_nu=ratios,
    )
