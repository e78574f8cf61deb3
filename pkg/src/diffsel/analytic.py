"""Closed-form statistics of difference antenna selection over Rayleigh fading.

With ``w_s = delta*mean_gain_s``, ``w_p = (1-delta)*mean_gain_p`` and
``gbar = w_s + w_p`` (see :func:`diffsel.model.derive_weights`), the
selected data gain has a CDF made of exponentials with rates
``(k+1)/mean_gain_s`` and ``delta*gbar/(w_s*w_p)``.  The ergodic rate
integrates each exponential against ``log(1 + P x / N0)``, which produces
the ``exp(a) E1(a)`` terms evaluated through :func:`exp_scaled_e1`.

All CDF expressions are written in terms of ``1 - exp(-c x)`` computed with
``expm1`` so that small-argument (high-SNR outage) values keep full relative
precision.  Weights within 1e-6 of the endpoints use the exact limit forms:
``delta = 1`` is maximum-data-gain selection and ``delta = 0`` picks the
antenna independently of the data link.
"""

import math
import warnings

import numpy as np

from .errors import DomainError
from .model import DEGENERACY_RTOL, _as_weight, derive_weights
from .special import binomial, compensated_sum, exp_scaled_e1

LOG2E = 1.0 / math.log(2.0)
ENDPOINT_TOL = 1e-6
ACCURACY_ADVISORY_M = 16

BITS = "bits-per-sec-per-Hz"
PROBABILITY = "probability"
DIMENSIONLESS = "dimensionless"


class MetricValue(float):
    """A float tagged with its unit (bits/s/Hz, probability or dimensionless)."""

    def __new__(cls, value, units=DIMENSIONLESS):
        obj = super().__new__(cls, value)
        obj.units = units
        return obj

    def __reduce__(self):
        return (MetricValue, (float(self), self.units))

    def __repr__(self):
        return f"MetricValue({float(self)!r}, {self.units!r})"


def _tag(values, units):
    if np.ndim(values) == 0:
        return MetricValue(float(values), units)
    return values


def _nonneg_array(x, name):
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise DomainError(f"{name} must be >= 0")
    return arr


def _positive(value, name):
    value = float(value)
    if not value > 0 or math.isnan(value):
        raise DomainError(f"{name} must be > 0, got {value!r}")
    return value


def _one_minus_exp(rate, x):
    return -np.expm1(-rate * x)


def _advise(m):
    if m > ACCURACY_ADVISORY_M:
        warnings.warn(
            f"alternating binomial sums lose accuracy for M={m} > {ACCURACY_ADVISORY_M}",
            RuntimeWarning,
            stacklevel=3,
        )


def _endpoint(delta):
    if delta <= ENDPOINT_TOL:
        return 0
    if delta >= 1.0 - ENDPOINT_TOL:
        return 1
    return None


# ---------------------------------------------------------------------------
# Selected-link distributions
# ---------------------------------------------------------------------------

def cdf_selected_data_gain(x, params, weight):
    """CDF of the data-link gain of the selected antenna.

    Accepts a scalar or an array of ``x >= 0``; scalars come back as a
    :class:`MetricValue` in units of probability.
    """
    x = _nonneg_array(x, "x")
    delta = _as_weight(weight).delta
    m = params.num_antennas
    gs = params.mean_gain_s
    end = _endpoint(delta)
    if end == 0:
        out = _one_minus_exp(1.0 / gs, x)
    elif end == 1:
        out = _one_minus_exp(1.0 / gs, x) ** m
    else:
        _advise(m)
        w = derive_weights(params, delta)
        a, b, gbar, g = w.w_s, w.w_p, w.gamma_bar, w.degenerate_g
        om_mu = _one_minus_exp(delta * gbar / (a * b), x)
        om_0 = _one_minus_exp(1.0 / gs, x)
        terms = [(b / gbar) ** m * om_mu]
        for k in range(m):
            if k == g:
                continue
            coef = m * binomial(m - 1, k) * (-a) ** (k + 1) * b / (gbar ** (k + 1) * (a - k * b))
            terms.append(coef * (om_mu - _one_minus_exp((k + 1) / gs, x)))
        # (b/gbar + (a/gbar) om_0)^M - (b/gbar)^M, expanded so every term is >= 0
        for j in range(1, m + 1):
            terms.append(binomial(m, j) * (a / gbar * om_0) ** j * (b / gbar) ** (m - j))
        if g is not None:
            mu_g = binomial(m - 1, g) * (-a / gbar) ** g * np.exp(-(g + 1) * x / gs)
            terms.append(-m / gbar * delta * x * mu_g)
        out = compensated_sum(terms)
    return _tag(np.clip(out, 0.0, 1.0), PROBABILITY)


def _interference_degenerate(params, w):
    m = params.num_antennas
    return abs((m - 1) * w.w_s - w.w_p) <= DEGENERACY_RTOL * w.gamma_bar


def cdf_selected_interference_gain(y, params, weight):
    """CDF of the interference-link gain of the selected antenna."""
    y = _nonneg_array(y, "y")
    delta = _as_weight(weight).delta
    m = params.num_antennas
    gp = params.mean_gain_p
    end = _endpoint(delta)
    if end == 0:
        out = _one_minus_exp(m / gp, y)
    elif end == 1:
        out = _one_minus_exp(1.0 / gp, y)
    else:
        w = derive_weights(params, delta)
        a, b, gbar = w.w_s, w.w_p, w.gamma_bar
        om_c = _one_minus_exp((1.0 - delta) * gbar / (a * b), y)
        om_m = _one_minus_exp(m / gp, y)
        if not _interference_degenerate(params, w):
            coef = b ** m / (((m - 1) * a - b) * gbar ** (m - 1))
            out = compensated_sum([om_c, coef * (om_c - om_m)])
        else:
            tail = np.exp(-(1.0 - delta) * gbar / (a * b) * y) * y
            out = compensated_sum([
                om_c,
                -((b / gbar) ** m) * (om_c - om_m),
                -m * (1.0 - delta) * b ** (m - 1) / gbar ** m * tail,
            ])
    return _tag(np.clip(out, 0.0, 1.0), PROBABILITY)


def mean_selected_interference_gain(params, weight):
    """Mean interference-link gain of the selected antenna.

    Equal to ``[M gbar^(M-1) w_s + w_p^M] / (M gbar^M) * mean_gain_p``, here
    evaluated as ``(w_s/gbar + (w_p/gbar)^M / M) * mean_gain_p`` which stays
    finite at both endpoints.
    """
    w = derive_weights(params, weight)
    m = params.num_antennas
    return (w.w_s / w.gamma_bar + (w.w_p / w.gamma_bar) ** m / m) * params.mean_gain_p


def pdf_difference_metric(z, params, weight):
    """Two-sided exponential density of ``Z = delta*gamma_s - (1-delta)*gamma_p``."""
    delta = _as_weight(weight).delta
    if delta in (0.0, 1.0):
        raise DomainError("the difference metric density is one-sided at delta in {0, 1}")
    w = derive_weights(params, delta)
    z = np.asarray(z, dtype=float)
    with np.errstate(over="ignore"):
        out = np.where(z <= 0, np.exp(np.minimum(z, 0) / w.w_p), np.exp(-np.maximum(z, 0) / w.w_s)) / w.gamma_bar
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Mutual information and outage
# ---------------------------------------------------------------------------

def _snr_arg(params, p_s, k):
    return (k + 1) * params.noise_power / (params.mean_gain_s * p_s)


def _rate_delta1_nats(p_s, params):
    m = params.num_antennas
    _advise(m)
    return compensated_sum(
        binomial(m, k + 1) * (-1.0) ** k * exp_scaled_e1(_snr_arg(params, p_s, k)) for k in range(m)
    )


def _rate_delta0_nats(p_s, params):
    return exp_scaled_e1(_snr_arg(params, p_s, 0))


def mutual_information_limit_delta1(p_s, params):
    """Ergodic rate of maximum-data-gain selection (bits/s/Hz)."""
    p_s = _positive(p_s, "p_s")
    return MetricValue(max(0.0, LOG2E * _rate_delta1_nats(p_s, params)), BITS)


def mutual_information_limit_delta0(p_s, params):
    """Ergodic rate of a single Rayleigh-faded antenna (bits/s/Hz), independent of M."""
    p_s = _positive(p_s, "p_s")
    return MetricValue(LOG2E * _rate_delta0_nats(p_s, params), BITS)


def _rate_nats(p_s, params, delta):
    m = params.num_antennas
    _advise(m)
    w = derive_weights(params, delta)
    a, b, gbar, g = w.w_s, w.w_p, w.gamma_bar, w.degenerate_g
    s_mix = exp_scaled_e1(delta * gbar * params.noise_power / (a * b * p_s))
    terms = [(b / gbar) ** m * s_mix]
    for k in range(m):
        s_k = exp_scaled_e1(_snr_arg(params, p_s, k))
        lead = (-a / gbar) ** (k + 1)
        if k != g:
            coef = m * binomial(m - 1, k) * (-a) ** (k + 1) * b / (gbar ** (k + 1) * (a - k * b))
            terms.append(coef * (s_mix - s_k))
        terms.append(-binomial(m, k + 1) * lead * s_k)
    if g is not None:
        lead = (-a / gbar) ** (g + 1)
        s_g = exp_scaled_e1(_snr_arg(params, p_s, g))
        terms.append(-binomial(m, g + 1) * lead)
        terms.append(m * binomial(m - 1, g) * lead * params.noise_power / (params.mean_gain_s * p_s) * s_g)
    return compensated_sum(terms)


def mutual_information(p_s, params, weight):
    """Ergodic mutual information of the selected link in bits/s/Hz."""
    p_s = _positive(p_s, "p_s")
    delta = _as_weight(weight).delta
    end = _endpoint(delta)
    if end == 0:
        return mutual_information_limit_delta0(p_s, params)
    if end == 1:
        return mutual_information_limit_delta1(p_s, params)
    return MetricValue(max(0.0, LOG2E * _rate_nats(p_s, params, delta)), BITS)


def outage_threshold(p_s, r0, noise_power):
    """Gain below which the rate ``log2(1 + P g / N0)`` does not exceed ``r0``."""
    return (2.0 ** r0 - 1.0) * noise_power / p_s


def outage_probability(p_s, r0, params, weight):
    """Probability that the selected-link rate is at most ``r0`` bits/s/Hz."""
    p_s = _positive(p_s, "p_s")
    r0 = _positive(r0, "r0")
    return cdf_selected_data_gain(outage_threshold(p_s, r0, params.noise_power), params, weight)


def asymptotic_cdf_small_x(x, params, weight):
    """Leading-order behaviour of the selected data-gain CDF as ``x -> 0``.

    ``(x/mean_gain_s)^M`` at ``delta = 1``; otherwise linear in ``x`` with
    slope ``(w_p/gbar)^(M-1) / mean_gain_s``, which at a degenerate weight
    ``w_s = g w_p`` equals ``1 / ((g+1)^(M-1) mean_gain_s)``.
    """
    x = _nonneg_array(x, "x")
    delta = _as_weight(weight).delta
    m = params.num_antennas
    gs = params.mean_gain_s
    if _endpoint(delta) == 1:
        out = (x / gs) ** m
    else:
        w = derive_weights(params, delta)
        if w.degenerate_g is not None:
            out = x / ((w.degenerate_g + 1) ** (m - 1) * gs)
        else:
            out = (w.w_p / w.gamma_bar) ** (m - 1) * x / gs
    return float(out) if np.ndim(out) == 0 else out
