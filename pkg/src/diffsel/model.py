"""Scenario value types, selection-dependent weights and the channel sampler."""

import math
import numbers
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .special import MAX_BINOMIAL_N

DEGENERACY_RTOL = 1e-9

# Trials are drawn in fixed-size blocks; each block owns an independent
# Philox counter range so a draw depends only on (seed, trial, antenna, link).
BLOCK_SIZE = 1 << 16
DATA_LINK = 0
INTERFERENCE_LINK = 1


def _finite_positive(name, value):
    if not (isinstance(value, numbers.Real) and math.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class SystemParams:
    """Static scenario: antenna count and mean gains, noise power (linear)."""

    num_antennas: int
    mean_gain_s: float = 1.0
    mean_gain_p: float = 1.0
    noise_power: float = 1.0

    def __post_init__(self):
        m = self.num_antennas
        if isinstance(m, bool) or int(m) != m or not 1 <= m <= MAX_BINOMIAL_N:
            raise ValueError(f"num_antennas must be an integer in [1, {MAX_BINOMIAL_N}], got {m!r}")
        object.__setattr__(self, "num_antennas", int(m))
        _finite_positive("mean_gain_s", self.mean_gain_s)
        _finite_positive("mean_gain_p", self.mean_gain_p)
        _finite_positive("noise_power", self.noise_power)

    @property
    def xi(self):
        return self.mean_gain_s / self.mean_gain_p


@dataclass(frozen=True)
class Constraints:
    """Peak transmit power and average-interference limit, both linear.

    ``p_max`` may be ``math.inf`` to model the unconstrained benchmark.
    """

    p_max: float
    interference_limit: float = 1.0

    def __post_init__(self):
        if not (isinstance(self.p_max, numbers.Real) and self.p_max > 0) or math.isnan(self.p_max):
            raise ValueError(f"p_max must be > 0, got {self.p_max!r}")
        _finite_positive("interference_limit", self.interference_limit)


@dataclass(frozen=True)
class SelectionWeight:
    delta: float

    def __post_init__(self):
        d = self.delta
        if not (isinstance(d, numbers.Real) and 0.0 <= d <= 1.0):
            raise ValueError(f"delta must lie in [0, 1], got {d!r}")
        object.__setattr__(self, "delta", float(d))


@dataclass(frozen=True)
class DerivedWeights:
    w_s: float
    w_p: float
    gamma_bar: float
    alpha: float
    degenerate_g: Optional[int]


@dataclass(frozen=True)
class GainSample:
    gains_s: Tuple[float, ...]
    gains_p: Tuple[float, ...]

    def __post_init__(self):
        gs = tuple(float(v) for v in self.gains_s)
        gp = tuple(float(v) for v in self.gains_p)
        if len(gs) != len(gp) or not gs:
            raise ValueError("gains_s and gains_p must be non-empty and of equal length")
        for v in gs + gp:
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"gains must be finite and >= 0, got {v!r}")
        object.__setattr__(self, "gains_s", gs)
        object.__setattr__(self, "gains_p", gp)

    @property
    def num_antennas(self):
        return len(self.gains_s)


def _as_weight(weight):
    return weight if isinstance(weight, SelectionWeight) else SelectionWeight(weight)


def derive_weights(params, weight):
    """Weights of the two exponential components of the difference metric.

    ``w_s = delta * mean_gain_s`` and ``w_p = (1 - delta) * mean_gain_p`` are
    the means of the scaled data and interference gains entering
    ``Z = delta * gamma_s - (1 - delta) * gamma_p``.  ``degenerate_g`` is the
    integer ``g`` in ``[0, M-1]`` with ``w_s == g * w_p`` (to a relative
    tolerance of 1e-9), if any.
    """
    delta = _as_weight(weight).delta
    w_s = delta * params.mean_gain_s
    w_p = (1.0 - delta) * params.mean_gain_p
    gamma_bar = w_s + w_p
    alpha = math.inf if w_p == 0.0 else w_s / w_p
    tol = DEGENERACY_RTOL * gamma_bar
    degenerate_g = None
    if w_p > 0.0 and w_s / w_p < params.num_antennas:
        g = int(round(w_s / w_p))
        if abs(w_s - g * w_p) <= tol and g <= params.num_antennas - 1:
            degenerate_g = g
    return DerivedWeights(w_s, w_p, gamma_bar, alpha, degenerate_g)


def block_generator(seed, block, phase=0):
    """Counter-based generator for one block of trials.

    ``phase`` separates independent experiment stages that share a seed.
    """
    return np.random.Generator(np.random.Philox(key=int(seed), counter=[0, 0, int(phase), int(block)]))


def sample_gain_block(params, seed, block, n, phase=0):
    """Draw ``n`` trials of block ``block``; returns (gains_s, gains_p), each (n, M)."""
    raw = block_generator(seed, block, phase).standard_exponential((n, 2, params.num_antennas))
    return raw[:, DATA_LINK, :] * params.mean_gain_s, raw[:, INTERFERENCE_LINK, :] * params.mean_gain_p


def sample_gains(params, rng_stream):
    """One realization of independent exponential gains for every antenna.

    ``rng_stream`` is a ``numpy.random.Generator``; concurrent callers must
    each hold their own.
    """
    raw = rng_stream.standard_exponential((2, params.num_antennas))
    return GainSample(
        tuple(raw[DATA_LINK] * params.mean_gain_s),
        tuple(raw[INTERFERENCE_LINK] * params.mean_gain_p),
    )
