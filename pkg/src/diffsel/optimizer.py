"""Choice of the selection weight with the statistics-based power rule.

The composite objective ``C(P*(delta), delta)`` is scanned on a coarse grid and
the best bracket is refined by golden-section search.  Unimodality of the
composite is not assumed beyond the bracket.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .analytic import BITS, PROBABILITY, MetricValue, mutual_information, outage_probability
from .power import statistical_power

MAX_MI = "max-mi"
MIN_OUTAGE = "min-outage"
OBJECTIVES = (MAX_MI, MIN_OUTAGE)

COARSE_POINTS = 101
GOLDEN_TOL = 1e-7
TIE_TOL = 1e-12
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptimizationResult:
    delta_star: float
    p_s_star: float
    objective_value: MetricValue
    objective: str
    evaluations: int


def _check(objective, r0):
    if objective not in OBJECTIVES:
        raise ValueError(f"objective must be one of {OBJECTIVES}, got {objective!r}")
    if objective == MIN_OUTAGE and r0 is None:
        raise ValueError("min-outage needs r0")


def evaluate(delta, params, constraints, objective, r0=None):
    """Power and objective value at one weight; returns ``(p_s, value)``."""
    p_s = statistical_power(params, constraints, delta).p_s
    if objective == MAX_MI:
        return p_s, mutual_information(p_s, params, delta)
    return p_s, outage_probability(p_s, r0, params, delta)


def golden_section_max(f, lo, hi, tol=GOLDEN_TOL, max_iter=200):
    """Maximize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x), evaluations)``."""
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    n = 2
    while hi - lo > tol and n < max_iter:
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_PHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_PHI * (hi - lo)
            f2 = f(x2)
        n += 1
    return (x1, f1, n) if f1 >= f2 else (x2, f2, n)


def _pick(candidates):
    """Best score; among near-ties prefer the largest delta."""
    best = max(score for _, score in candidates)
    band = TIE_TOL * max(1.0, abs(best))
    return max(d for d, score in candidates if score >= best - band)


def optimize_delta(params, constraints, objective=MAX_MI, r0: Optional[float] = None):
    """Maximize the rate or minimize outage over delta in [0, 1].

    Grid of 101 weights, golden-section refinement around the best grid
    point, and ties (within 1e-12) resolved towards the larger delta.
    """
    _check(objective, r0)
    sign = 1.0 if objective == MAX_MI else -1.0
    cache = {}

    def score(delta):
        delta = float(delta)
        if delta not in cache:
            cache[delta] = sign * float(evaluate(delta, params, constraints, objective, r0)[1])
        return cache[delta]

    grid = np.linspace(0.0, 1.0, COARSE_POINTS)
    scores = [score(d) for d in grid]
    i = int(np.argmax(scores))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, COARSE_POINTS - 1)]
    golden_section_max(score, lo, hi)
    delta_star = _pick(cache.items())
    p_s, value = evaluate(delta_star, params, constraints, objective, r0)
    units = BITS if objective == MAX_MI else PROBABILITY
    return OptimizationResult(delta_star, p_s, MetricValue(value, units), objective, len(cache))


def objective_curve(params, constraints, objective=MAX_MI, r0=None, grid_size=101):
    """``[(delta, p_s, value), ...]`` on a uniform grid including both endpoints."""
    _check(objective, r0)
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    out = []
    for delta in np.linspace(0.0, 1.0, int(grid_size)):
        p_s, value = evaluate(float(delta), params, constraints, objective, r0)
        out.append((float(delta), p_s, value))
    return out
