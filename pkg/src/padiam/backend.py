"""Kernel backend selection.

The compiled extension (:mod:`padiam._ckernels`) is used when it imported
cleanly; otherwise the pure-Python kernels take over.  Selection happens
at import time and honors the ``PADIAM_BACKEND`` environment variable:

* ``auto`` (default): compiled if available, else pure Python
* ``c``: require the compiled kernels, raise if missing
* ``python``: force the pure-Python kernels

:func:`set_backend` swaps the active implementation at runtime, which the
benchmark and the cross-backend tests use to compare both in one process.
"""

from __future__ import annotations

import contextlib
import os

from . import _pykernels

_IMPORT_ERROR = None
try:
    from . import _ckernels
except ImportError as exc:  # pragma: no cover - depends on build
    _ckernels = None
    _IMPORT_ERROR = exc

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["c"] = _ckernels


def available_backends():
    return sorted(_BACKENDS)


def _initial():
    choice = os.environ.get("PADIAM_BACKEND", "auto").lower()
    if choice == "auto":
        return "c" if "c" in _BACKENDS else "python"
    if choice not in ("c", "python"):
        raise ValueError(f"PADIAM_BACKEND must be auto, c or python, got {choice!r}")
    if choice not in _BACKENDS:
        raise ImportError(
            f"PADIAM_BACKEND={choice} but the compiled kernels are unavailable"
        ) from _IMPORT_ERROR
    return choice


_active_name = _initial()
_active = _BACKENDS[_active_name]


def backend_name() -> str:
    """Name of the active kernel backend ('c' or 'python')."""
    return _active_name


def set_backend(name: str) -> str:
    """Activate a backend by name; returns the previously active name."""
    global _active, _active_name
    if name not in _BACKENDS:
        raise ValueError(f"unknown or unavailable backend {name!r}; "
                         f"available: {available_backends()}")
    previous = _active_name
    _active_name = name
    _active = _BACKENDS[name]
    return previous


@contextlib.contextmanager
def using_backend(name: str):
    previous = set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)


# Thin dispatchers; resolved per call so set_backend takes effect everywhere.

def sample_targets(n, m, delta, generator):
    return _active.sample_targets(n, m, delta, generator)


def sample_targets_batch(n, m, delta, count, generator):
    return _active.sample_targets_batch(n, m, delta, count, generator)


def bfs_fill(offsets, neighbors, source, max_radius, dist):
    return _active.bfs_fill(offsets, neighbors, source, max_radius, dist)


def truncated_ball_size(offsets, neighbors, source, max_radius, threshold,
                        label_cap, dist, queue):
    return _active.truncated_ball_size(offsets, neighbors, source, max_radius,
                                       threshold, label_cap, dist, queue)


def pair_distance(offsets, neighbors, u, v, du, dv, qu, qv):
    return _active.pair_distance(offsets, neighbors, u, v, du, dv, qu, qv)


def prefix_multi_source_fill(offsets, neighbors, cutoff, dist):
    return _active.prefix_multi_source_fill(offsets, neighbors, cutoff, dist)


def distance_to_prefix(offsets, neighbors, source, cutoff):
    return _active.distance_to_prefix(offsets, neighbors, source, cutoff)
