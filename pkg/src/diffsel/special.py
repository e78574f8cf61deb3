"""Exponential integral and combinatorial helpers.

The closed forms for the selected-link statistics are sums of terms of the
form ``exp(a) * E1(a)``, so the scaled exponential integral is exposed
directly to avoid overflow of ``exp(a)`` for large arguments.
"""

import math

import numpy as np

from .errors import DomainError

EULER_GAMMA = 0.57721566490153286061
_EPS = 1e-16
_FPMIN = 1e-300
_MAX_ITER = 10_000
_SWITCH = 1.0
MAX_BINOMIAL_N = 64


def _check_positive(x):
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"argument must be finite and > 0, got {x!r}")
    return x


def _e1_series(x):
    # E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k * k!)
    total = 0.0
    term = 1.0
    for k in range(1, _MAX_ITER):
        term *= -x / k
        contrib = term / k
        total += contrib
        if abs(contrib) < _EPS * abs(total):
            break
    return -EULER_GAMMA - math.log(x) - total


def _scaled_e1_cf(x):
    # Modified Lentz evaluation of exp(x) E1(x) = 1/(x+1- 1/(x+3- 4/(x+5- ...)))
    b = x + 1.0
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"continued fraction for E1({x}) did not converge")


def exp_integral_e1(x):
    """Exponential integral ``E1(x) = int_x^inf exp(-u)/u du`` for real x > 0.

    Power series for ``x <= 1``, continued fraction above.  Large arguments
    underflow gracefully towards zero.

    Raises
    ------
    DomainError
        If ``x`` is not finite or not strictly positive.
    """
    x = _check_positive(x)
    if x <= _SWITCH:
        return _e1_series(x)
    return math.exp(-x) * _scaled_e1_cf(x)


def exp_scaled_e1(x):
    """Return ``exp(x) * E1(x)`` without forming ``exp(x)`` for large x."""
    x = _check_positive(x)
    if x <= _SWITCH:
        return math.exp(x) * _e1_series(x)
    return _scaled_e1_cf(x)


def binomial(n, k):
    """Binomial coefficient as a float, exact for ``0 <= k <= n <= 64``."""
    if isinstance(n, bool) or isinstance(k, bool):
        raise DomainError("binomial arguments must be integers")
    if int(n) != n or int(k) != k:
        raise DomainError(f"binomial arguments must be integers, got ({n}, {k})")
    n, k = int(n), int(k)
    if n < 0 or k < 0 or k > n:
        raise DomainError(f"binomial requires 0 <= k <= n, got ({n}, {k})")
    if n > MAX_BINOMIAL_N:
        raise DomainError(f"binomial limited to n <= {MAX_BINOMIAL_N}, got {n}")
    return float(math.comb(n, k))


def compensated_sum(terms):
    """Neumaier-compensated sum of scalars or equally shaped arrays."""
    total = None
    comp = None
    for t in terms:
        t = np.asarray(t, dtype=float)
        if total is None:
            total = t.copy()
            comp = np.zeros_like(total)
            continue
        s = total + t
        comp = comp + np.where(np.abs(total) >= np.abs(t), (total - s) + t, (t - s) + total)
        total = s
    if total is None:
        return 0.0
    out = total + comp
    return float(out) if out.ndim == 0 else out
