"""Closed-form leading-order diameter predictions.

Four parameter regimes, keyed on (m, delta):

* ``m1`` (m = 1): diameter ~ 2 (1+d) log n / ((2+d) theta), where theta
  is the unique root in (0,1) of theta + (1+d)(1 + log theta) = 0.
* ``negative_delta`` (m >= 2, -m < d < 0): doubly logarithmic,
  (4/|log(1+d/m)| + 2/log m) log log n.
* ``zero_delta`` (m >= 2, d = 0): log n / log log n.  The known result
  at this boundary concerns a self-loop-permitting model variant, so
  predictions carry a "variant model" note.
* ``positive_delta`` (m >= 2, d > 0): log n / log nu with the
  neighborhood growth rate nu from :func:`growth_rate_nu`.

All logarithms are natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .core import Params

__all__ = [
    "RegimePrediction",
    "regime_of",
    "growth_rate_nu",
    "theta_root",
    "log_nu",
    "predicted_diameter",
]


def regime_of(params: Params) -> str:
    """Regime tag, a function of (m, delta) alone."""
    if params.m == 1:
        return "m1"
    if params.delta < 0:
        return "negative_delta"
    if params.delta == 0:
        return "zero_delta"
    return "positive_delta"


def growth_rate_nu(params: Params) -> float:
    """Exponential neighborhood growth rate for m >= 2, delta > 0.

    nu = (2m(m+d) + 2 sqrt(m(m-1)(m+d)(m+d+1))) / d, always > 1 on its
    domain.  Out-of-regime parameters are rejected.
    """
    m, d = params.m, params.delta
    if m < 2 or d <= 0:
        raise ValueError(
            f"growth rate is defined for m >= 2 and delta > 0, "
            f"got m={m}, delta={d}"
        )
    nu = (2 * m * (m + d) + 2 * math.sqrt(m * (m - 1) * (m + d) * (m + d + 1))) / d
    assert nu > 1.0
    return nu


def theta_root(delta: float) -> float:
    """Unique root in (0,1) of f(t) = t + (1+delta)(1 + log t), delta > -1.

    f is strictly increasing on (0,1) (f' = 1 + (1+delta)/t > 0), so
    bisection is exact; the bracket is shrunk to floating-point
    resolution, well past 1e-12.
    """
    if not delta > -1:
        raise ValueError(f"delta must be > -1, got {delta}")
    c = 1.0 + delta

    def f(t: float) -> float:
        return t + c * (1.0 + math.log(t))

    lo, hi = 1e-15, 1.0 - 1e-15
    if f(lo) >= 0.0 or f(hi) <= 0.0:  # pragma: no cover - cannot happen for delta > -1
        raise ArithmeticError("bisection bracket does not straddle the root")
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    root = hi if abs(f(hi)) < abs(f(lo)) else lo
    return root


def log_nu(n: float, params: Params) -> float:
    """log base nu of n, the typical-distance scale for the positive regime."""
    return math.log(n) / math.log(growth_rate_nu(params))


@dataclass(frozen=True)
class RegimePrediction:
    """Leading-order predicted diameter at size n for one parameter regime."""

    regime: str
    n: float
    predicted_value: float
    inputs: dict = field(default_factory=dict)
    note: str | None = None


def predicted_diameter(n: float, params: Params) -> RegimePrediction:
    """Leading-order diameter prediction at size n.

    ``n`` may be any real > 1 (> e for the regimes that divide by
    log log n).  The prediction is positive on its domain.
    """
    regime = regime_of(params)
    m, d = params.m, params.delta
    if regime in ("negative_delta", "zero_delta"):
        if not n > math.e:
            raise ValueError(f"n must be > e for the {regime} regime, got {n}")
    elif not n > 1:
        raise ValueError(f"n must be > 1, got {n}")
    log_n = math.log(n)
    if regime == "m1":
        theta = theta_root(d)
        value = 2 * (1 + d) * log_n / ((2 + d) * theta)
        return RegimePrediction(regime, n, value, inputs={"theta": theta})
    if regime == "negative_delta":
        a = 4.0 / abs(math.log(1.0 + d / m))
        b = 2.0 / math.log(m)
        value = (a + b) * math.log(log_n)
        return RegimePrediction(regime, n, value,
                                inputs={"loglog_coefficient": a + b})
    if regime == "zero_delta":
        value = log_n / math.log(log_n)
        return RegimePrediction(regime, n, value, inputs={},
                                note="variant model")
    nu = growth_rate_nu(params)
    value = log_n / math.log(nu)
    return RegimePrediction(regime, n, value, inputs={"nu": nu})
