"""Graph files.

Text format (line oriented)::

    pa <n> <m> <delta> <seed>
    <newer> <slot> <target>
    ...

One line per attachment edge in generation order, beginning with the m
initial parallel edges ``2 i 1``.  ``delta`` is written with shortest
round-trip float formatting, so write -> read is lossless.

The binary variant stores the same fields in the same order, all
little-endian: header ``<u64 n> <u64 m> <f64 delta> <u64 seed>``
followed by one ``<u32 newer> <u32 slot> <u32 target>`` record per edge.
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np

from .core import PAGraph, Params, graph_from_targets

__all__ = [
    "write_graph_text",
    "read_graph_text",
    "write_graph_binary",
    "read_graph_binary",
    "write_graph",
    "read_graph",
]

_HEADER_DTYPE = np.dtype([
    ("n", "<u8"),
    ("m", "<u8"),
    ("delta", "<f8"),
    ("seed", "<u8"),
])
_TRIPLE_DTYPE = np.dtype("<u4")


def _resolve_seed(g: PAGraph, seed: int | None) -> int:
    if seed is None:
        seed = g.seed
    if seed is None:
        raise ValueError(
            "graph has no recorded seed; pass seed= explicitly to serialize it"
        )
    return int(seed)


def write_graph_text(g: PAGraph, path, seed: int | None = None) -> None:
    seed = _resolve_seed(g, seed)
    buf = io.StringIO()
    buf.write(f"pa {g.n} {g.params.m} {g.params.delta!r} {seed}\n")
    for newer, slot, target in g.edges:
        buf.write(f"{newer} {slot} {target}\n")
    Path(path).write_text(buf.getvalue(), encoding="ascii")


def read_graph_text(path) -> PAGraph:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 5 or header[0] != "pa":
            raise ValueError(f"{path}: not a text graph file (bad header)")
        n, m = int(header[1]), int(header[2])
        delta = float(header[3])
        seed = int(header[4])
        triples = np.loadtxt(fh, dtype=np.int64, ndmin=2)
    return _assemble(path, n, m, delta, seed, triples)


def write_graph_binary(g: PAGraph, path, seed: int | None = None) -> None:
    seed = _resolve_seed(g, seed)
    header = np.zeros(1, dtype=_HEADER_DTYPE)
    header["n"] = g.n
    header["m"] = g.params.m
    header["delta"] = g.params.delta
    header["seed"] = seed
    with open(path, "wb") as fh:
        fh.write(header.tobytes())
        fh.write(g.edges.astype(_TRIPLE_DTYPE).tobytes())


def read_graph_binary(path) -> PAGraph:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER_DTYPE.itemsize:
        raise ValueError(f"{path}: truncated binary graph file")
    header = np.frombuffer(raw, dtype=_HEADER_DTYPE, count=1)[0]
    n, m = int(header["n"]), int(header["m"])
    delta = float(header["delta"])
    seed = int(header["seed"])
    body = np.frombuffer(raw, dtype=_TRIPLE_DTYPE, offset=_HEADER_DTYPE.itemsize)
    if body.size % 3:
        raise ValueError(f"{path}: triple section is not a multiple of 3 words")
    triples = body.reshape(-1, 3).astype(np.int64)
    return _assemble(path, n, m, delta, seed, triples)


def _assemble(path, n, m, delta, seed, triples) -> PAGraph:
    params = Params(m, delta)
    expected = m * (n - 1)
    if triples.shape != (expected, 3):
        raise ValueError(
            f"{path}: expected {expected} edge triples for n={n}, m={m}, "
            f"found {triples.shape[0]}"
        )
    newer = np.concatenate([
        np.full(m, 2, dtype=np.int64),
        np.repeat(np.arange(3, n + 1, dtype=np.int64), m),
    ])
    slots = np.tile(np.arange(1, m + 1, dtype=np.int64), n - 1)
    if not (np.array_equal(triples[:, 0], newer)
            and np.array_equal(triples[:, 1], slots)):
        raise ValueError(f"{path}: edge triples are not in generation order")
    if not np.array_equal(triples[:m, 2], np.ones(m, dtype=np.int64)):
        raise ValueError(f"{path}: initial edges must all target vertex 1")
    targets = triples[m:, 2]
    return graph_from_targets(n, params, targets, seed=seed, validate=True)


def write_graph(g: PAGraph, path, fmt: str = "text", seed: int | None = None) -> None:
    if fmt == "text":
        write_graph_text(g, path, seed=seed)
    elif fmt == "binary":
        write_graph_binary(g, path, seed=seed)
    else:
        raise ValueError(f"unknown graph format {fmt!r}")


def read_graph(path) -> PAGraph:
    """Read a graph file, sniffing text vs binary from the leading bytes."""
    with open(path, "rb") as fh:
        lead = fh.read(3)
    if lead == b"pa ":
        return read_graph_text(path)
    return read_graph_binary(path)
