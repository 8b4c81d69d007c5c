"""Exact probabilities of edge-set events.

The probability that a fixed set E of attachment edges all appear in the
finished graph factorizes over vertex labels s = 2..n.  With

* ``p_s`` = number of edges of E whose target is s, and
* ``q_s`` = number of edges of E that span s (target < s < newer),

each label contributes

    (m+d+p_s-1)_{p_s} * ((2s-3)m+(s-1)d+q_s-1)_{q_s}
    -------------------------------------------------
         ((2s-2)m+sd+p_s+q_s-1)_{p_s+q_s}

where ``(x)_r`` is the falling factorial and d the degree offset.  Events
that pin the same slot of the same vertex to two different targets have
probability zero, as do malformed triples whose target is not strictly
older; both return 0 rather than raising so that set algebra stays total.

A brute-force enumeration oracle over complete attachment outcomes backs
the formula on tiny instances, using exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence, Union

import numpy as np

from .core import EdgeTriple, Params

__all__ = [
    "EdgeEvent",
    "ShellCounts",
    "ExactDistribution",
    "falling_factorial",
    "shell_counts",
    "edge_set_probability",
    "edge_set_log_probability",
    "enumerate_distribution",
    "conditional_probability",
    "bound_conditional",
    "MAX_ORACLE_OUTCOMES",
    "INCLUSION_EXCLUSION_LIMIT",
]

EdgeEvent = Iterable[Union[EdgeTriple, Sequence[int]]]

MAX_ORACLE_OUTCOMES = 10**6
INCLUSION_EXCLUSION_LIMIT = 12

# Accumulate the factor product in log space for big events or long spans.
_LOG_EVENT_SIZE = 8
_LOG_N = 1000


def falling_factorial(x, r: int):
    """(x)_r = x (x-1) ... (x-r+1), with (x)_0 = 1.

    Works for float, int, and Fraction arguments alike.
    """
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    result = 1
    for k in range(r):
        result = result * (x - k)
    return result


def _normalize_event(event: EdgeEvent, n: int | None = None,
                     params: Params | None = None) -> tuple[EdgeTriple, ...]:
    """Canonical sorted tuple of validated triples."""
    triples = []
    for item in event:
        newer, slot, target = (int(x) for x in item)
        if newer < 2:
            raise ValueError(f"edge {item}: attaching vertex must have label >= 2")
        if slot < 1:
            raise ValueError(f"edge {item}: slot must be >= 1")
        if target < 1:
            raise ValueError(f"edge {item}: target must have label >= 1")
        if params is not None and slot > params.m:
            raise ValueError(f"edge {item}: slot {slot} exceeds m={params.m}")
        if n is not None and newer > n:
            raise ValueError(f"edge {item}: vertex {newer} exceeds n={n}")
        triples.append(EdgeTriple(newer, slot, target))
    return tuple(sorted(set(triples)))


def _is_structural_zero(triples: Sequence[EdgeTriple]) -> bool:
    slots = {}
    for t in triples:
        if t.target >= t.newer:
            return True
        key = (t.newer, t.slot)
        if key in slots and slots[key] != t.target:
            return True
        slots[key] = t.target
    return False


@dataclass(frozen=True)
class ShellCounts:
    """Per-label target counts (p) and spanning-edge counts (q) of an event."""

    p: dict
    q: dict


def shell_counts(event: EdgeEvent) -> ShellCounts:
    triples = _normalize_event(event)
    p: dict[int, int] = {}
    q: dict[int, int] = {}
    for newer, _slot, target in triples:
        p[target] = p.get(target, 0) + 1
        for s in range(target + 1, newer):
            q[s] = q.get(s, 0) + 1
    return ShellCounts(p=p, q=q)


def _log_or_linear_product(triples, n, params, want_log):
    m, d = params.m, params.delta
    p = np.zeros(n + 2, dtype=np.int64)
    qd = np.zeros(n + 2, dtype=np.int64)
    for newer, _slot, target in triples:
        p[target] += 1
        if target + 1 < newer:
            qd[target + 1] += 1
            qd[newer] -= 1
    q = np.cumsum(qd)
    active = np.flatnonzero((p[: n + 1] > 0) | (q[: n + 1] > 0))
    use_log = want_log or len(triples) > _LOG_EVENT_SIZE or n > _LOG_N
    acc = 0.0 if use_log else 1.0
    for s in active:
        if s < 2:
            continue
        ps = int(p[s])
        qs = int(q[s])
        num = falling_factorial(m + d + ps - 1, ps) * falling_factorial(
            (2 * s - 3) * m + (s - 1) * d + qs - 1, qs
        )
        den = falling_factorial((2 * s - 2) * m + s * d + ps + qs - 1, ps + qs)
        if use_log:
            acc += math.log(num) - math.log(den)
        else:
            acc = acc * (num / den)
    if use_log:
        return acc if want_log else math.exp(acc)
    return math.log(acc) if want_log else acc


def edge_set_probability(event: EdgeEvent, n: int, params: Params) -> float:
    """Probability that every edge of ``event`` appears in the n-vertex graph.

    The empty event has probability 1.  Conflicting or malformed target
    assignments give 0.  Raises for triples outside the (n, m) ranges.
    """
    triples = _normalize_event(event, n=n, params=params)
    if not triples:
        return 1.0
    if _is_structural_zero(triples):
        return 0.0
    return _log_or_linear_product(triples, n, params, want_log=False)


def edge_set_log_probability(event: EdgeEvent, n: int, params: Params) -> float:
    """Natural log of :func:`edge_set_probability`; -inf for zero events."""
    triples = _normalize_event(event, n=n, params=params)
    if not triples:
        return 0.0
    if _is_structural_zero(triples):
        return float("-inf")
    return _log_or_linear_product(triples, n, params, want_log=True)


def bound_conditional(size_e: int, size_eprime: int, s: int, params: Params) -> float:
    """Upper bound on P[some edge of E' present | E present].

    Valid whenever every vertex of E' has label >= s and E, E' are
    disjoint; the caller asserts those.  The bound is
    (|E'| (m+d+1) + |E|) / ((2s-2) m + s d).
    """
    if s < 2:
        raise ValueError(f"s must be >= 2, got {s}")
    if size_e < 0 or size_eprime < 0:
        raise ValueError("event sizes must be nonnegative")
    m, d = params.m, params.delta
    denom = (2 * s - 2) * m + s * d
    assert denom > 0, "denominator positive for s >= 2, delta > -m"
    return (size_eprime * (m + d + 1) + size_e) / denom


class ExactDistribution:
    """Every complete attachment outcome of a tiny instance, with exact mass.

    Outcomes are ordered lexicographically by target sequence; outcome
    probabilities are Fractions computed from the sequential attachment
    law, so they sum to exactly 1.
    """

    def __init__(self, n: int, params: Params, outcomes):
        self.n = int(n)
        self.params = params
        self.outcomes = outcomes
        self._slots = [(t, i) for t in range(3, self.n + 1)
                       for i in range(1, params.m + 1)]
        self._matrix = np.array([o[0] for o in outcomes], dtype=np.int32)
        if self._matrix.size == 0:
            self._matrix = self._matrix.reshape(len(outcomes), 0)
        self._probs = np.array([float(o[1]) for o in outcomes])

    def __len__(self) -> int:
        return len(self.outcomes)

    @property
    def slots(self):
        """(vertex, slot) pairs in sampling order, one per matrix column."""
        return list(self._slots)

    def probabilities(self) -> np.ndarray:
        return self._probs.copy()

    def probabilities_exact(self):
        return [o[1] for o in self.outcomes]

    def edge_sequence(self, outcome_id: int) -> tuple[EdgeTriple, ...]:
        row = self.outcomes[outcome_id][0]
        return tuple(
            EdgeTriple(t, i, int(j)) for (t, i), j in zip(self._slots, row)
        )

    def outcome_ids(self, target_rows: np.ndarray) -> np.ndarray:
        """Map rows of sampled targets to outcome indexes (mixed radix)."""
        radices = np.array([t - 1 for t, _ in self._slots], dtype=np.int64)
        weights = np.ones_like(radices)
        if radices.size:
            weights[:-1] = np.cumprod(radices[::-1])[::-1][1:]
        return ((np.asarray(target_rows, dtype=np.int64) - 1) * weights).sum(axis=1)

    def _column(self, triple: EdgeTriple) -> np.ndarray:
        newer, slot, target = triple
        if target >= newer or newer > self.n or slot > self.params.m:
            return np.zeros(len(self), dtype=bool)
        if newer == 2:
            full = target == 1
            return np.full(len(self), full, dtype=bool)
        col = self.params.m * (newer - 3) + slot - 1
        return self._matrix[:, col] == target

    def event_mask(self, event: EdgeEvent) -> np.ndarray:
        """Boolean mask of outcomes containing every edge of the event."""
        triples = _normalize_event(event, n=self.n, params=self.params)
        mask = np.ones(len(self), dtype=bool)
        for t in triples:
            mask &= self._column(t)
        return mask

    def hit_mask(self, event: EdgeEvent) -> np.ndarray:
        """Boolean mask of outcomes containing at least one edge of the event."""
        triples = _normalize_event(event, n=self.n, params=self.params)
        mask = np.zeros(len(self), dtype=bool)
        for t in triples:
            mask |= self._column(t)
        return mask

    def event_probability(self, event: EdgeEvent) -> float:
        return float(self._probs[self.event_mask(event)].sum())

    def event_probability_exact(self, event: EdgeEvent) -> Fraction:
        mask = self.event_mask(event)
        total = Fraction(0)
        for idx in np.flatnonzero(mask):
            total += self.outcomes[idx][1]
        return total

    def conditional_hit_probability(self, event: EdgeEvent,
                                    eprime: EdgeEvent) -> float:
        """P[some edge of eprime present | all of event present]."""
        cond = self.event_mask(event)
        den = float(self._probs[cond].sum())
        if den <= 0.0:
            raise ValueError("conditioning event has probability 0")
        num = float(self._probs[cond & self.hit_mask(eprime)].sum())
        return num / den


def _outcome_count(n: int, m: int) -> int:
    count = 1
    for t in range(3, n + 1):
        count *= (t - 1) ** m
    return count


def enumerate_distribution(n: int, params: Params) -> ExactDistribution:
    """Enumerate all attachment outcomes of an n-vertex instance exactly.

    Guarded: the outcome count prod_{t=3..n} (t-1)^m must not exceed
    ``MAX_ORACLE_OUTCOMES``.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    m = params.m
    count = _outcome_count(n, m)
    if count > MAX_ORACLE_OUTCOMES:
        raise ValueError(
            f"enumeration would produce {count} outcomes "
            f"(limit {MAX_ORACLE_OUTCOMES})"
        )
    dfrac = Fraction(params.delta)
    total_slots = m * max(n - 2, 0)
    deg = [0] * (n + 1)
    deg[1] = deg[2] = m
    current: list[int] = []
    outcomes: list[tuple[tuple[int, ...], Fraction]] = []

    def rec(idx: int, prob: Fraction):
        if idx == total_slots:
            outcomes.append((tuple(current), prob))
            return
        t = 3 + idx // m
        i = idx % m
        denom = 2 * m * (t - 2) + i + (t - 1) * dfrac
        closes_step = i == m - 1
        for j in range(1, t):
            factor = (deg[j] + dfrac) / denom
            current.append(j)
            deg[j] += 1
            if closes_step:
                deg[t] += m
            rec(idx + 1, prob * factor)
            if closes_step:
                deg[t] -= m
            deg[j] -= 1
            current.pop()

    rec(0, Fraction(1))
    return ExactDistribution(n, params, outcomes)


def conditional_probability(event: EdgeEvent, eprime: EdgeEvent, n: int,
                            params: Params, method: str = "auto") -> float:
    """Exact P[some edge of eprime present | all of event present].

    Uses inclusion-exclusion over subsets of eprime (up to
    ``INCLUSION_EXCLUSION_LIMIT`` edges), or the enumeration oracle when
    the instance is small enough.  The two events must be disjoint and
    the conditioning event must have positive probability.
    """
    ev = _normalize_event(event, n=n, params=params)
    evp = _normalize_event(eprime, n=n, params=params)
    if set(ev) & set(evp):
        raise ValueError("events must be disjoint")
    p_event = edge_set_probability(ev, n, params)
    if p_event <= 0.0:
        raise ValueError("conditioning event has probability 0")
    if not evp:
        return 0.0
    if method == "auto":
        if len(evp) <= INCLUSION_EXCLUSION_LIMIT:
            method = "inclusion-exclusion"
        elif _outcome_count(n, params.m) <= MAX_ORACLE_OUTCOMES:
            method = "oracle"
        else:
            raise ValueError(
                f"eprime has {len(evp)} edges (inclusion-exclusion limit "
                f"{INCLUSION_EXCLUSION_LIMIT}) and the instance is too large "
                "to enumerate; use bound_conditional instead"
            )
    if method == "inclusion-exclusion":
        if len(evp) > INCLUSION_EXCLUSION_LIMIT:
            raise ValueError(
                f"inclusion-exclusion supports at most "
                f"{INCLUSION_EXCLUSION_LIMIT} edges, got {len(evp)}"
            )
        total = 0.0
        for k in range(1, len(evp) + 1):
            sign = 1.0 if k % 2 == 1 else -1.0
            for subset in combinations(evp, k):
                total += sign * edge_set_probability(ev + subset, n, params)
        return total / p_event
    if method == "oracle":
        dist = enumerate_distribution(n, params)
        return dist.conditional_hit_probability(ev, evp)
    raise ValueError(f"unknown method {method!r}")
