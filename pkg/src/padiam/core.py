"""Affine preferential attachment graphs.

The growth process: the initial graph on vertices 1 and 2 carries m
parallel edges (slots 1..m).  Each later vertex t = 3..n attaches m
labeled edges, one slot at a time, to vertices among 1..t-1.  The target
of slot i is vertex k with probability proportional to its current
degree plus the offset delta, where "current" includes the slots of step
t already placed.  Admissible parameters are m >= 1 and delta > -m.

Vertex labels are 1-based throughout.  Per-vertex arrays have length
n + 1 with index 0 unused so that labels index directly.

Randomness comes from numpy's PCG64.  A ``seed`` may be an int, a
``numpy.random.SeedSequence``, or a ready ``numpy.random.Generator``;
identical seeds yield bit-identical graphs on every backend.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, NamedTuple, Union

import numpy as np

from . import backend

__all__ = [
    "RngSeed",
    "Params",
    "EdgeTriple",
    "PAGraph",
    "validate_params",
    "generate",
    "graph_from_targets",
    "degree",
    "as_generator",
]

# A 64-bit integer seed.  Streams for distinct experiment cells are derived
# by seeding numpy's SeedSequence with tuples (seed, n, cell, purpose).
RngSeed = int

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator]


def as_generator(seed: SeedLike) -> np.random.Generator:
    """Coerce an int, SeedSequence, or Generator into a PCG64 Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    if isinstance(seed, (int, np.integer)) and not isinstance(seed, bool):
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))
    raise TypeError(f"seed must be an int, SeedSequence or Generator, got {type(seed)!r}")


@dataclass(frozen=True)
class Params:
    """Model parameters: edges per new vertex and the degree offset.

    Parameters
    ----------
    m : int
        Number of edges each new vertex attaches, at least 1.
    delta : float
        Affine degree offset; must satisfy ``delta > -m``.
    """

    m: int
    delta: float

    def __post_init__(self):
        if isinstance(self.m, bool) or not isinstance(self.m, (int, np.integer)):
            raise TypeError(f"m must be an integer, got {type(self.m).__name__}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "delta", float(self.delta))
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if not self.delta > -self.m:
            raise ValueError(
                f"delta must be > -m = {-self.m}, got {self.delta}"
            )


def validate_params(m: int, delta: float) -> Params:
    """Validate (m, delta) and return a Params instance.

    Raises ``ValueError`` for m < 1 or delta <= -m and ``TypeError`` for a
    non-integer m.
    """
    return Params(m, delta)


class EdgeTriple(NamedTuple):
    """One attachment edge: slot ``slot`` of vertex ``newer`` landed on ``target``."""

    newer: int
    slot: int
    target: int


@dataclass(frozen=True)
class PAGraph:
    """Immutable preferential attachment graph.

    ``targets`` stores the sampled attachment targets in slot order:
    entry ``m*(t-3) + (i-1)`` is the target of edge (t, i) for t >= 3.
    The m initial parallel edges between vertices 2 and 1 are implicit.

    ``offsets``/``neighbors`` form a CSR view of the undirected multigraph
    (each edge appears in both endpoint lists, multi-edges preserved).
    ``degrees[v]`` is the multiplicity-counted degree of v.
    """

    n: int
    params: Params
    seed: int | None
    targets: np.ndarray = field(repr=False)
    offsets: np.ndarray = field(repr=False)
    neighbors: np.ndarray = field(repr=False)
    degrees: np.ndarray = field(repr=False)

    @property
    def m(self) -> int:
        return self.params.m

    @property
    def delta(self) -> float:
        return self.params.delta

    @property
    def num_edges(self) -> int:
        return self.params.m * (self.n - 1)

    @cached_property
    def edges(self) -> np.ndarray:
        """All edge triples (newer, slot, target) in generation order, as an array."""
        m, n = self.params.m, self.n
        out = np.empty((self.num_edges, 3), dtype=np.int64)
        slots = np.arange(1, m + 1, dtype=np.int64)
        out[:m, 0] = 2
        out[:m, 1] = slots
        out[:m, 2] = 1
        if n > 2:
            out[m:, 0] = np.repeat(np.arange(3, n + 1, dtype=np.int64), m)
            out[m:, 1] = np.tile(slots, n - 2)
            out[m:, 2] = self.targets
        return out

    def edge_triples(self) -> Iterator[EdgeTriple]:
        for newer, slot, target in self.edges:
            yield EdgeTriple(int(newer), int(slot), int(target))

    @cached_property
    def _ascendant_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR over attachment edges only, vertex -> its strictly older targets."""
        e = self.edges
        return _build_csr(self.n, e[:, 0], e[:, 2])

    @property
    def out_offsets(self) -> np.ndarray:
        return self._ascendant_csr[0]

    @property
    def out_neighbors(self) -> np.ndarray:
        return self._ascendant_csr[1]

    def degree(self, v: int) -> int:
        return degree(self, v)

    def check_vertex(self, v: int) -> int:
        v = int(v)
        if not 1 <= v <= self.n:
            raise ValueError(f"vertex label {v} out of range [1, {self.n}]")
        return v


def _build_csr(n: int, src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    deg = np.bincount(src, minlength=n + 1).astype(np.int64)
    offsets = np.zeros(n + 2, dtype=np.int64)
    np.cumsum(deg, out=offsets[1:])
    order = np.argsort(src, kind="stable")
    neighbors = dst[order].astype(np.int32)
    offsets.setflags(write=False)
    neighbors.setflags(write=False)
    return offsets, neighbors


def graph_from_targets(
    n: int,
    params: Params,
    targets: np.ndarray,
    seed: int | None = None,
    validate: bool = True,
) -> PAGraph:
    """Freeze a target sequence into a traversal-ready PAGraph.

    ``targets`` must have length m*(n-2) with entry m*(t-3)+(i-1) in
    [1, t-1].  Used by :func:`generate` and by the graph file readers.
    """
    m = params.m
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    targets = np.ascontiguousarray(targets, dtype=np.int32)
    if targets.shape != (m * (n - 2),):
        raise ValueError(
            f"expected {m * (n - 2)} targets for n={n}, m={m}, got shape {targets.shape}"
        )
    if validate and n > 2:
        newer = np.repeat(np.arange(3, n + 1, dtype=np.int32), m)
        bad = (targets < 1) | (targets >= newer)
        if bad.any():
            k = int(np.flatnonzero(bad)[0])
            raise ValueError(
                f"target {targets[k]} of edge ({newer[k]}, {k % m + 1}) "
                "is not an older vertex"
            )
    e_new = np.concatenate([np.full(m, 2, dtype=np.int32),
                            np.repeat(np.arange(3, n + 1, dtype=np.int32), m)])
    e_tgt = np.concatenate([np.full(m, 1, dtype=np.int32), targets])
    src = np.concatenate([e_new, e_tgt])
    dst = np.concatenate([e_tgt, e_new])
    offsets, neighbors = _build_csr(n, src, dst)
    degrees = offsets[2:] - offsets[1:-1]
    degrees = np.concatenate([[0], degrees])
    degrees.setflags(write=False)
    targets.setflags(write=False)
    return PAGraph(
        n=int(n),
        params=params,
        seed=seed,
        targets=targets,
        offsets=offsets,
        neighbors=neighbors,
        degrees=degrees,
    )


def generate(n: int, params: Params, seed: SeedLike) -> PAGraph:
    """Generate a preferential attachment graph on n vertices.

    The attachment law is sampled edge by edge.  For delta >= 0 the
    attachment distribution is split into a degree-proportional part
    (a uniform draw from an append-only edge-endpoint array) and a
    uniform-vertex part, chosen with the exact mixture weight; for
    delta < 0 that split is invalid and a Fenwick tree over the weights
    ``degree + delta`` drives inverse-CDF sampling.  Both run in the
    order slot (t,1)..(t,m) for t = 3..n, with within-step degree
    updates, and both exclude the arriving vertex from its own step.

    Parameters
    ----------
    n : int
        Number of vertices, at least 2.
    params : Params
        Model parameters.
    seed : int | SeedSequence | Generator
        Randomness source.  Same (n, params, seed) always yields the
        same graph.

    Returns
    -------
    PAGraph
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    rng = as_generator(seed)
    targets = backend.sample_targets(int(n), params.m, params.delta, rng)
    kept_seed = int(seed) if isinstance(seed, (int, np.integer)) else None
    return graph_from_targets(n, params, targets, seed=kept_seed, validate=False)


def degree(g: PAGraph, v: int) -> int:
    """Multiplicity-counted degree of vertex v in the finished graph."""
    v = g.check_vertex(v)
    return int(g.degrees[v])
