"""Reproducible scaling experiments.

A plan fixes (m, delta), a ladder of sizes, seeds per size, and sampling
settings.  Each cell (n, seed index) generates one graph, samples
typical distances, measures the diameter, and appends one CSV row.  Cell
randomness is derived from ``SeedSequence((plan.seed, n, k, purpose))``
so results do not depend on execution order or worker count.

Rows are written strictly in cell order and flushed row by row; an
interrupted run can be resumed and skips the cells already on disk.
Cell wall times are inherently nondeterministic, so they go to a
``<output>.times.csv`` sidecar log and never into the main CSV, which is
byte-for-byte reproducible.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import backend
from .asymptotics import log_nu, regime_of
from .core import PAGraph, Params, SeedLike, as_generator, generate
from .metrics import diameter_exact, eccentricity, typical_distance

__all__ = [
    "ExperimentPlan",
    "ExperimentRow",
    "load_plan",
    "parse_plan",
    "format_plan",
    "run_plan",
    "write_summary",
    "typical_vertex_fraction",
    "default_K",
    "default_L",
    "SCHEMA_VERSION",
    "EXACT_DIAMETER_MAX_N",
    "WORKERS_ENV",
]

SCHEMA_VERSION = 1
EXACT_DIAMETER_MAX_N = 2**21
WORKERS_ENV = "PADIAM_WORKERS"
_ECC_SAMPLES = 16

_COLUMNS = (
    "n",
    "seed",
    "diameter",
    "diameter_is_exact",
    "typical_median",
    "typical_mean",
    "log_nu_n",
    "ratio_diam",
    "ratio_typical",
)


def default_K(n: int) -> int:
    """Late-window width: ceil(n / log n)."""
    return math.ceil(n / math.log(n))


def default_L(n: int) -> float:
    """Neighborhood radius scale: (log n)^(2/3)."""
    return math.log(n) ** (2.0 / 3.0)


@dataclass(frozen=True)
class ExperimentPlan:
    """Declarative description of one scaling run."""

    m: int
    delta: float
    sizes: tuple[int, ...]
    seeds_per_size: int
    output: str
    pairs_per_graph: int = 10_000
    compute_exact_diameter: bool = True
    ratios: bool = True
    radius_multiplier: float = 3.0
    seed: int = 0
    k_n: int | None = None
    l_n: float | None = None

    @property
    def params(self) -> Params:
        return Params(self.m, self.delta)

    def validate(self) -> "ExperimentPlan":
        params = self.params  # raises on bad (m, delta)
        if not self.sizes:
            raise ValueError("plan needs at least one size")
        if any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
            raise ValueError(f"sizes must be strictly increasing, got {self.sizes}")
        if min(self.sizes) < 2:
            raise ValueError("sizes must be >= 2")
        if self.seeds_per_size < 1:
            raise ValueError("seeds_per_size must be >= 1")
        if self.pairs_per_graph < 1:
            raise ValueError("pairs_per_graph must be >= 1")
        if self.ratios and regime_of(params) != "positive_delta":
            raise ValueError(
                "ratios against log_nu(n) require m >= 2 and delta > 0; "
                "set ratios = false for other regimes"
            )
        if self.compute_exact_diameter and max(self.sizes) > EXACT_DIAMETER_MAX_N:
            raise ValueError(
                f"exact diameter is limited to n <= {EXACT_DIAMETER_MAX_N}; "
                "set compute_exact_diameter = false for larger sizes"
            )
        return self

    def cells(self) -> list[tuple[int, int]]:
        return [(n, k) for n in self.sizes for k in range(self.seeds_per_size)]

    def fingerprint(self) -> str:
        """Hash of everything that determines row values (not the output path)."""
        parts = []
        for f in sorted(fld.name for fld in fields(self)):
            if f == "output":
                continue
            parts.append(f"{f}={getattr(self, f)!r}")
        digest = hashlib.sha256(";".join(parts).encode()).hexdigest()
        return digest[:16]


@dataclass(frozen=True)
class ExperimentRow:
    """One measured cell.  ``seed`` is the cell's seed index within its size."""

    n: int
    seed: int
    diameter: int
    diameter_is_exact: bool
    typical_median: float
    typical_mean: float
    log_nu_n: float | None
    ratio_diam: float | None
    ratio_typical: float | None
    wall_time: float | None = None


# ---------------------------------------------------------------------------
# plan files: flat "key = value" lines


_BOOL_WORDS = {"true": True, "false": False, "1": True, "0": False}


def parse_plan(text: str) -> ExperimentPlan:
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"plan line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key == "m":
            values[key] = int(val)
        elif key in ("delta", "radius_multiplier", "l_n"):
            values[key] = float(val)
        elif key == "sizes":
            values[key] = tuple(int(x) for x in val.replace(",", " ").split())
        elif key in ("seeds_per_size", "pairs_per_graph", "seed", "k_n"):
            values[key] = int(val)
        elif key in ("compute_exact_diameter", "ratios"):
            try:
                values[key] = _BOOL_WORDS[val.lower()]
            except KeyError:
                raise ValueError(f"plan line {lineno}: bad boolean {val!r}") from None
        elif key == "output":
            values[key] = val
        else:
            raise ValueError(f"plan line {lineno}: unknown key {key!r}")
    missing = {"m", "delta", "sizes", "seeds_per_size", "output"} - set(values)
    if missing:
        raise ValueError(f"plan is missing required keys: {sorted(missing)}")
    return ExperimentPlan(**values).validate()


def load_plan(path) -> ExperimentPlan:
    return parse_plan(Path(path).read_text(encoding="utf-8"))


def format_plan(plan: ExperimentPlan) -> str:
    lines = []
    for fld in fields(plan):
        value = getattr(plan, fld.name)
        if value is None:
            continue
        if fld.name == "sizes":
            value = ", ".join(str(x) for x in value)
        elif isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{fld.name} = {value}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# cell execution


def _cell_graph(plan: ExperimentPlan, n: int, k: int) -> PAGraph:
    return generate(n, plan.params, np.random.SeedSequence((plan.seed, n, k, 0)))


def _run_cell(plan: ExperimentPlan, n: int, k: int) -> ExperimentRow:
    start = time.perf_counter()
    g = _cell_graph(plan, n, k)
    sample = typical_distance(
        g, plan.pairs_per_graph, np.random.SeedSequence((plan.seed, n, k, 1))
    )
    if plan.compute_exact_diameter:
        diam = diameter_exact(g)
        exact = True
    else:
        # Lower bound: max eccentricity over a few sampled BFS sources.
        rng = as_generator(np.random.SeedSequence((plan.seed, n, k, 2)))
        sources = rng.integers(1, n + 1, size=_ECC_SAMPLES)
        diam = max(eccentricity(g, int(s)) for s in sources)
        exact = False
    if plan.ratios:
        denom = log_nu(n, plan.params)
        log_nu_n = denom
        ratio_diam = diam / denom
        ratio_typical = sample.median / denom
    else:
        log_nu_n = ratio_diam = ratio_typical = None
    return ExperimentRow(
        n=n,
        seed=k,
        diameter=int(diam),
        diameter_is_exact=exact,
        typical_median=sample.median,
        typical_mean=sample.mean,
        log_nu_n=log_nu_n,
        ratio_diam=ratio_diam,
        ratio_typical=ratio_typical,
        wall_time=time.perf_counter() - start,
    )


# ---------------------------------------------------------------------------
# CSV emission


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _row_line(row: ExperimentRow) -> str:
    return ",".join(_fmt(getattr(row, col)) for col in _COLUMNS) + "\n"


def _header_lines(plan: ExperimentPlan) -> list[str]:
    return [
        f"# pa-diam v{SCHEMA_VERSION}\n",
        f"# plan {plan.fingerprint()}\n",
        ",".join(_COLUMNS) + "\n",
    ]


def _parse_value(col: str, text: str):
    if text == "":
        return None
    if col in ("n", "seed", "diameter"):
        return int(text)
    if col == "diameter_is_exact":
        return text == "true"
    return float(text)


def _read_existing(path: Path, plan: ExperimentPlan) -> list[ExperimentRow]:
    """Parse completed rows from an interrupted run (prefix of cell order)."""
    text = path.read_text(encoding="utf-8")
    # The last element is "" after a complete line, or a partial row from
    # a crash mid-write; either way it is not a data row.
    lines = text.split("\n")[:-1]
    header = _header_lines(plan)
    for want, got in zip(header, lines[: len(header)]):
        if want.rstrip("\n") != got:
            raise ValueError(
                f"{path}: existing output does not match this plan "
                f"(expected {want.strip()!r}, found {got!r}); "
                "refusing to resume"
            )
    rows = []
    for line in lines[len(header):]:
        parts = line.split(",")
        if len(parts) != len(_COLUMNS):
            break  # damaged row; recompute from here on
        vals = {col: _parse_value(col, part) for col, part in zip(_COLUMNS, parts)}
        rows.append(ExperimentRow(wall_time=None, **vals))
    expected = plan.cells()
    for row, (n, k) in zip(rows, expected):
        if (row.n, row.seed) != (n, k):
            raise ValueError(
                f"{path}: row order does not match the plan at cell "
                f"(n={n}, seed={k}); refusing to resume"
            )
    return rows


def _resolve_workers(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    if workers < 1:
        raise ValueError(f"worker count must be >= 1, got {workers}")
    return workers


def run_plan(plan: ExperimentPlan, resume: bool = False,
             workers: int | None = None) -> list[ExperimentRow]:
    """Execute every cell of the plan, streaming rows to the plan's output.

    Cells run on up to ``workers`` threads (default from the
    ``PADIAM_WORKERS`` environment variable); rows are emitted strictly
    in cell order so the CSV bytes are independent of the worker count.
    With ``resume=True``, rows already present in the output are kept
    and their cells skipped.  Returns all rows in cell order.
    """
    plan.validate()
    workers = _resolve_workers(workers)
    out_path = Path(plan.output)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    times_path = Path(str(out_path) + ".times.csv")

    cells = plan.cells()
    done: list[ExperimentRow] = []
    if resume and out_path.exists():
        done = _read_existing(out_path, plan)
        # Rewrite the intact prefix so a damaged trailing row is dropped.
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.writelines(_header_lines(plan))
            for row in done:
                fh.write(_row_line(row))
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.writelines(_header_lines(plan))
    if not times_path.exists() or not resume:
        times_path.write_text("n,seed,wall_time\n", encoding="utf-8")

    todo = cells[len(done):]
    rows = list(done)
    if todo:
        with open(out_path, "a", encoding="utf-8") as fh, \
             open(times_path, "a", encoding="utf-8") as tfh:
            pending: dict[int, ExperimentRow] = {}
            next_idx = 0
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = {
                    pool.submit(_run_cell, plan, n, k): idx
                    for idx, (n, k) in enumerate(todo)
                }
                for fut in as_completed(futures):
                    idx = futures[fut]
                    n, k = todo[idx]
                    try:
                        pending[idx] = fut.result()
                    except Exception as exc:
                        raise RuntimeError(
                            f"cell n={n}, seed={k} failed: {exc}"
                        ) from exc
                    while next_idx in pending:
                        row = pending.pop(next_idx)
                        fh.write(_row_line(row))
                        fh.flush()
                        tfh.write(f"{row.n},{row.seed},{row.wall_time!r}\n")
                        tfh.flush()
                        rows.append(row)
                        next_idx += 1
    write_summary(rows, plan)
    return rows


def write_summary(rows: list[ExperimentRow], plan: ExperimentPlan) -> dict:
    """Aggregate rows per size and write ``<output>.summary.json``.

    Includes per-size means and standard deviations of the two ratios
    and the fitted slope of each mean ratio against 1/log n.
    """
    per_n = []
    for n in plan.sizes:
        group = [r for r in rows if r.n == n]
        if not group:
            continue
        entry = {
            "n": n,
            "cells": len(group),
            "mean_diameter": float(np.mean([r.diameter for r in group])),
            "mean_typical_median": float(np.mean([r.typical_median for r in group])),
            "mean_typical_mean": float(np.mean([r.typical_mean for r in group])),
        }
        if plan.ratios:
            rt = np.array([r.ratio_typical for r in group], dtype=float)
            rd = np.array([r.ratio_diam for r in group], dtype=float)
            entry.update(
                mean_ratio_typical=float(rt.mean()),
                std_ratio_typical=float(rt.std()),
                mean_ratio_diam=float(rd.mean()),
                std_ratio_diam=float(rd.std()),
            )
        per_n.append(entry)
    summary = {
        "schema": f"pa-diam v{SCHEMA_VERSION}",
        "plan_fingerprint": plan.fingerprint(),
        "m": plan.m,
        "delta": plan.delta,
        "pairs_per_graph": plan.pairs_per_graph,
        "per_n": per_n,
    }
    if plan.ratios and len(per_n) >= 2:
        x = np.array([1.0 / math.log(e["n"]) for e in per_n])
        for key in ("mean_ratio_typical", "mean_ratio_diam"):
            y = np.array([e[key] for e in per_n])
            slope = float(np.polyfit(x, y, 1)[0])
            summary[f"trend_slope_{key.removeprefix('mean_')}"] = slope
    path = Path(str(plan.output) + ".summary.json")
    path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    return summary


def typical_vertex_fraction(g: PAGraph, M: int, cutoff: int,
                            sample_vertices: int, seed: SeedLike) -> float:
    """Estimated fraction of vertices u <= cutoff whose M-ball is large.

    A vertex qualifies when at least floor(n/10) vertices v <= cutoff
    satisfy dist(u, v) <= M, distances taken in the subgraph induced by
    labels <= cutoff (which is exactly the graph after cutoff steps).
    Estimated over ``sample_vertices`` uniform starting vertices.
    """
    if M < 0:
        raise ValueError(f"M must be >= 0, got {M}")
    cutoff = int(cutoff)
    if not 1 <= cutoff <= g.n:
        raise ValueError(f"cutoff {cutoff} out of range [1, {g.n}]")
    if sample_vertices < 1:
        raise ValueError("sample_vertices must be >= 1")
    need = g.n // 10
    if need < 1:
        return 1.0
    rng = as_generator(seed)
    sources = rng.integers(1, cutoff + 1, size=int(sample_vertices))
    dist = np.full(g.n + 1, -1, dtype=np.int32)
    queue = np.empty(g.n + 1, dtype=np.int32)
    hits = 0
    for u in sources:
        size = backend.truncated_ball_size(
            g.offsets, g.neighbors, int(u), int(M), int(need), cutoff,
            dist, queue,
        )
        if size >= need:
            hits += 1
    return hits / int(sample_vertices)
