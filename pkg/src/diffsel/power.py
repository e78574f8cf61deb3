"""Transmit-power rules under peak-power and interference constraints."""

import math
from dataclasses import dataclass

from .analytic import mean_selected_interference_gain
from .errors import DegenerateInputError, DomainError

PEAK_POWER = "peak-power"
INTERFERENCE = "interference"
NONE = "none"
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class PowerDecision:
    p_s: float
    binding: str


def average_interference(p_s, params, weight):
    """Mean interference power ``p_s * E[gamma_p of the selected antenna]``.

    Lies in ``[p_s*mean_gain_p/M, p_s*mean_gain_p]``, increasing with delta.
    """
    if p_s < 0:
        raise DomainError(f"p_s must be >= 0, got {p_s!r}")
    return p_s * mean_selected_interference_gain(params, weight)


def statistical_power(params, constraints, weight):
    """Largest power meeting the average-interference limit, capped at the peak.

    When ``mean_gain_p < limit / p_max`` even maximum-data-gain selection stays
    below the limit at full power, so the peak constraint alone binds.
    """
    p_max = constraints.p_max
    limit = constraints.interference_limit
    if params.mean_gain_p < limit / p_max:
        return PowerDecision(p_max, PEAK_POWER)
    p_limit = limit / mean_selected_interference_gain(params, weight)
    if p_limit <= p_max * (1.0 + TIE_RTOL):
        return PowerDecision(min(p_limit, p_max), INTERFERENCE)
    return PowerDecision(p_max, PEAK_POWER)


def instantaneous_power_pic(gain_p_selected, constraints):
    """Peak-interference power ``min(p_max, limit / gain_p)`` for one realization."""
    gain = float(gain_p_selected)
    if gain < 0 or math.isnan(gain):
        raise DomainError(f"gain_p_selected must be >= 0, got {gain!r}")
    p_max = constraints.p_max
    if gain == 0.0:
        if math.isinf(p_max):
            raise DegenerateInputError("zero interference gain with unbounded peak power")
        return PowerDecision(p_max, PEAK_POWER)
    p_limit = constraints.interference_limit / gain
    if p_limit <= p_max:
        return PowerDecision(p_limit, INTERFERENCE)
    return PowerDecision(p_max, PEAK_POWER)
