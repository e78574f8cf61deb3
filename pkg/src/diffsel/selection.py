"""Transmit-antenna selection rules.

Scalar functions operate on a :class:`~diffsel.model.GainSample` and report
1-based antenna indices; the ``*_indices`` variants work on (trials, M)
arrays and return 0-based indices for the simulator.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError
from .model import _as_weight

STRATEGIES = ("difference", "ratio", "max-gain", "min-interference")
_ALIASES = {"max-gain": 1.0, "min-interference": 0.0}


@dataclass(frozen=True)
class SelectionOutcome:
    index: int
    gain_s: float
    gain_p: float
    metric: float


def resolve_strategy(name, delta=None):
    """Map a strategy name to ``("difference", delta)`` or ``("ratio", None)``."""
    if name in _ALIASES:
        return "difference", _ALIASES[name]
    if name == "difference":
        if delta is None:
            raise ValueError("difference selection needs a delta")
        return "difference", _as_weight(delta).delta
    if name == "ratio":
        return "ratio", None
    raise ValueError(f"unknown strategy {name!r}; expected one of {STRATEGIES}")


def difference_metric(gains_s, gains_p, delta):
    return delta * np.asarray(gains_s, dtype=float) - (1.0 - delta) * np.asarray(gains_p, dtype=float)


def difference_indices(gains_s, gains_p, delta):
    # argmax returns the first maximum, i.e. ties go to the lowest index
    return np.argmax(difference_metric(gains_s, gains_p, delta), axis=-1)


def ratio_indices(gains_s, gains_p):
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.asarray(gains_s, dtype=float) / np.asarray(gains_p, dtype=float)
    return np.argmax(ratio, axis=-1)


def _outcome(sample, i, metric):
    return SelectionOutcome(i + 1, sample.gains_s[i], sample.gains_p[i], float(metric[i]))


def difference_select(sample, weight):
    """Pick the antenna maximizing ``delta*gamma_s - (1-delta)*gamma_p``."""
    delta = _as_weight(weight).delta
    z = difference_metric(sample.gains_s, sample.gains_p, delta)
    return _outcome(sample, int(np.argmax(z)), z)


def ratio_select(sample):
    """Pick the antenna maximizing ``gamma_s / gamma_p``.

    Raises
    ------
    DegenerateInputError
        If any interference gain is exactly zero.
    """
    gp = np.asarray(sample.gains_p)
    if np.any(gp == 0.0):
        raise DegenerateInputError("ratio selection undefined with a zero interference gain")
    ratio = np.asarray(sample.gains_s) / gp
    return _outcome(sample, int(np.argmax(ratio)), ratio)
