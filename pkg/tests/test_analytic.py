import math
import pickle
import warnings

import numpy as np
import pytest
from scipy import integrate, stats

from diffsel.analytic import (BITS, PROBABILITY, MetricValue, asymptotic_cdf_small_x, cdf_selected_data_gain,
                              cdf_selected_interference_gain, mean_selected_interference_gain,
                              mutual_information, mutual_information_limit_delta0,
                              mutual_information_limit_delta1, outage_probability, pdf_difference_metric)
from diffsel.errors import DomainError
from diffsel.model import SystemParams, derive_weights, sample_gain_block
from diffsel.selection import difference_metric

import reference_values as ref

M_VALUES = (1, 2, 4, 8)
DELTA_GRID = np.linspace(0.0, 1.0, 21)
XI_VALUES = (0.1, 1.0, 10.0)
# sums of O(1) terms near F = 1 may wobble by an ulp
ROUNDING = 4 * np.finfo(float).eps


def metric_cdf(z, params, delta):
    """CDF of one antenna's difference metric (two-sided exponential)."""
    w = derive_weights(params, delta)
    if z <= 0:
        return 0.0 if w.w_p == 0 else w.w_p / w.gamma_bar * math.exp(z / w.w_p)
    return 1.0 if w.w_s == 0 else 1.0 - w.w_s / w.gamma_bar * math.exp(-z / w.w_s)


def order_statistic_cdf(x, params, delta, link):
    """P(selected gain <= x) by integrating over the winner's pair of gains."""
    m, gs, gp = params.num_antennas, params.mean_gain_s, params.mean_gain_p

    def integrand(v, u):
        su, sv = (u, v) if link == "data" else (v, u)
        dens = math.exp(-su / gs - sv / gp) / (gs * gp)
        return m * dens * metric_cdf(delta * su - (1 - delta) * sv, params, delta) ** (m - 1)

    return integrate.dblquad(integrand, 0.0, x, 0.0, math.inf, epsabs=1e-11, epsrel=1e-10)[0]


def rate_by_parts(p_s, params, delta):
    n0 = params.noise_power
    f = lambda t: (p_s / n0) * (1.0 - float(cdf_selected_data_gain(t, params, delta))) / (1.0 + p_s * t / n0)
    return integrate.quad(f, 0.0, math.inf, epsabs=1e-12, epsrel=1e-11, limit=400)[0] / math.log(2.0)


# --- selected data-gain CDF -------------------------------------------------

def test_cdf_max_gain_endpoint():
    assert cdf_selected_data_gain(1.0, SystemParams(2), 1.0) == pytest.approx((1 - math.exp(-1)) ** 2, rel=1e-14)
    assert cdf_selected_data_gain(1.0, SystemParams(2), 1.0) == pytest.approx(0.39958, abs=1e-5)


@pytest.mark.parametrize("m", M_VALUES)
def test_cdf_min_interference_endpoint(m):
    params = SystemParams(m, 3.0, 1.0)
    x = np.array([0.1, 1.0, 5.0])
    np.testing.assert_allclose(cdf_selected_data_gain(x, params, 0.0), -np.expm1(-x / 3.0), rtol=1e-14)


def test_cdf_degenerate_weight_matches_simulation():
    assert cdf_selected_data_gain(1.0, SystemParams(2), 0.5) == pytest.approx(ref.MC_CDF_DATA_AT_1,
                                                                              abs=ref.MC_TOLERANCE)


@pytest.mark.parametrize("m,delta,xi,x", [
    (2, 0.3, 1.0, 0.7), (3, 0.6, 2.0, 1.5), (4, 0.25, 0.1, 0.05), (4, 0.9, 10.0, 20.0), (8, 0.45, 1.0, 2.0),
])
def test_cdf_against_order_statistic_integral(m, delta, xi, x):
    params = SystemParams(m, xi, 1.0)
    assert cdf_selected_data_gain(x, params, delta) == pytest.approx(
        order_statistic_cdf(x, params, delta, "data"), abs=1e-8)


@pytest.mark.parametrize("m", M_VALUES)
@pytest.mark.parametrize("xi", XI_VALUES)
def test_cdf_validity_grid(m, xi):
    params = SystemParams(m, xi, 1.0)
    x = np.linspace(0.0, 50.0 * xi, 200)
    y = np.linspace(0.0, 50.0, 200)
    for delta in DELTA_GRID:
        f = cdf_selected_data_gain(x, params, delta)
        assert np.all(np.diff(f) >= -ROUNDING)
        assert f[0] <= 1e-12 and f[-1] >= 1 - 1e-6
        g = cdf_selected_interference_gain(y, params, delta)
        assert np.all(np.diff(g) >= -ROUNDING)
        assert g[0] <= 1e-12 and g[-1] >= 1 - 1e-6


@pytest.mark.parametrize("m,g", [(2, 1), (3, 1), (3, 2), (4, 2), (8, 5)])
def test_branch_continuity_at_degenerate_weight(m, g):
    params = SystemParams(m)
    d_star = g / (g + 1.0)
    assert derive_weights(params, d_star).degenerate_g == g
    x = np.linspace(0.0, 10.0, 101)
    exact = cdf_selected_data_gain(x, params, d_star)
    for d in (d_star - 1e-5, d_star + 1e-5):
        assert derive_weights(params, d).degenerate_g is None
        np.testing.assert_allclose(cdf_selected_data_gain(x, params, d), exact, atol=1e-3)


def test_endpoint_routing_is_continuous():
    params = SystemParams(3, 2.0, 1.0)
    x = np.linspace(0.0, 8.0, 41)
    for end in (0.0, 1.0):
        inside = 1e-4 if end == 0.0 else 1 - 1e-4
        np.testing.assert_allclose(cdf_selected_data_gain(x, params, inside),
                                   cdf_selected_data_gain(x, params, end), atol=1e-3)


def test_cdf_scalar_and_array_forms():
    params = SystemParams(2)
    v = cdf_selected_data_gain(1.0, params, 0.3)
    assert isinstance(v, MetricValue) and v.units == PROBABILITY
    arr = cdf_selected_data_gain([0.5, 1.0], params, 0.3)
    assert isinstance(arr, np.ndarray) and arr[1] == float(v)


def test_cdf_rejects_negative_argument():
    with pytest.raises(DomainError):
        cdf_selected_data_gain(-0.1, SystemParams(2), 0.5)
    with pytest.raises(DomainError):
        cdf_selected_interference_gain([0.1, -1.0], SystemParams(2), 0.5)


def test_large_m_accuracy_advisory():
    with pytest.warns(RuntimeWarning):
        cdf_selected_data_gain(1.0, SystemParams(20), 0.5)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        cdf_selected_data_gain(1.0, SystemParams(16), 0.5)


# --- selected interference-gain CDF and mean ---------------------------------

@pytest.mark.parametrize("m", M_VALUES)
def test_interference_cdf_endpoints(m):
    params = SystemParams(m, 1.0, 2.0)
    y = np.array([0.1, 1.0, 4.0])
    np.testing.assert_allclose(cdf_selected_interference_gain(y, params, 0.0), -np.expm1(-m * y / 2.0), rtol=1e-14)
    np.testing.assert_allclose(cdf_selected_interference_gain(y, params, 1.0), -np.expm1(-y / 2.0), rtol=1e-14)


def test_interference_cdf_matches_simulation():
    v = cdf_selected_interference_gain(0.5, SystemParams(2, 2.0, 1.0), 0.3)
    assert v == pytest.approx(ref.MC_CDF_INTERFERENCE_AT_HALF, abs=ref.MC_TOLERANCE)


@pytest.mark.parametrize("m,delta,xi,y", [(2, 0.3, 2.0, 0.5), (4, 0.5, 1.0, 0.2), (4, 0.8, 0.1, 1.0),
                                          (8, 0.1, 10.0, 0.3)])
def test_interference_cdf_against_order_statistic_integral(m, delta, xi, y):
    params = SystemParams(m, xi, 1.0)
    assert cdf_selected_interference_gain(y, params, delta) == pytest.approx(
        order_statistic_cdf(y, params, delta, "interference"), abs=1e-8)


def test_interference_cdf_degenerate_split():
    # (M - 1) w_s == w_p at delta = 1/M with unit gains
    for m in (2, 4):
        params = SystemParams(m)
        d = 1.0 / m
        y = np.linspace(0.0, 6.0, 61)
        exact = cdf_selected_interference_gain(y, params, d)
        for near in (d - 1e-5, d + 1e-5):
            np.testing.assert_allclose(cdf_selected_interference_gain(y, params, near), exact, atol=1e-3)
        assert cdf_selected_interference_gain(0.7, params, d) == pytest.approx(
            order_statistic_cdf(0.7, params, d, "interference"), abs=1e-8)


def test_mean_interference_gain_examples():
    assert mean_selected_interference_gain(SystemParams(4), 0.0) == pytest.approx(0.25, rel=1e-15)
    assert mean_selected_interference_gain(SystemParams(4), 1.0) == 1.0
    assert mean_selected_interference_gain(SystemParams(2), 0.5) == pytest.approx(0.625, rel=1e-15)


def test_mean_interference_gain_against_simulation():
    se = 1.9e-4
    assert abs(ref.MC_MEAN_GAIN_P - 0.625) < 4 * se


@pytest.mark.parametrize("m", (1, 2, 4, 8))
@pytest.mark.parametrize("delta", (0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0))
def test_mean_equals_integrated_survival(m, delta):
    params = SystemParams(m, 2.0, 1.5)
    survival = lambda t: 1.0 - float(cdf_selected_interference_gain(t, params, delta))
    area = integrate.quad(survival, 0.0, math.inf, epsabs=1e-13, epsrel=1e-12, limit=400)[0]
    assert mean_selected_interference_gain(params, delta) == pytest.approx(area, rel=1e-6)


# --- difference metric density ------------------------------------------------

def test_pdf_integrates_to_one():
    params = SystemParams(3, 2.0, 0.7)
    area = integrate.quad(lambda z: pdf_difference_metric(z, params, 0.35), -math.inf, 0)[0] + \
        integrate.quad(lambda z: pdf_difference_metric(z, params, 0.35), 0, math.inf)[0]
    assert area == pytest.approx(1.0, rel=1e-10)


def test_pdf_symmetric_at_half_weight():
    params = SystemParams(2)
    assert pdf_difference_metric(0.0, params, 0.5) == 1.0
    z = np.array([0.1, 0.7, 2.0])
    np.testing.assert_allclose(pdf_difference_metric(z, params, 0.5), pdf_difference_metric(-z, params, 0.5))


def test_pdf_rejects_endpoints():
    for d in (0.0, 1.0):
        with pytest.raises(DomainError):
            pdf_difference_metric(0.0, SystemParams(2), d)


def test_pdf_matches_histogram_chi_square():
    params, delta = SystemParams(1, 2.0, 1.0), 0.4
    gs, gp = sample_gain_block(params, seed=2024, block=0, n=200_000)
    z = difference_metric(gs[:, 0], gp[:, 0], delta)
    edges = np.linspace(-4.0, 6.0, 41)
    observed, _ = np.histogram(z, bins=edges)
    probs = np.array([integrate.quad(lambda t: pdf_difference_metric(t, params, delta), a, b)[0]
                      for a, b in zip(edges[:-1], edges[1:])])
    expected = probs * z.size
    keep = expected > 5
    observed, expected = observed[keep], expected[keep]
    chi2 = np.sum((observed - expected) ** 2 / expected)
    assert chi2 < stats.chi2.ppf(0.99, keep.sum())


# --- mutual information ----------------------------------------------------

def test_single_antenna_rate():
    v = mutual_information(1.0, SystemParams(1), 1.0)
    assert v == pytest.approx(ref.RATE_SINGLE_ANTENNA, rel=1e-12)
    assert v.units == BITS
    assert mutual_information_limit_delta0(1.0, SystemParams(1)) == pytest.approx(0.8604, abs=1e-4)


@pytest.mark.parametrize("m", (1, 2, 4, 8))
def test_min_interference_rate_independent_of_m(m):
    v = mutual_information(1.0, SystemParams(m), 0.0)
    assert v == pytest.approx(ref.RATE_SINGLE_ANTENNA, rel=1e-12)


def test_selection_combining_limit_values():
    assert mutual_information_limit_delta1(1.0, SystemParams(2)) == pytest.approx(ref.RATE_MAX_OF_2, rel=1e-12)
    assert mutual_information_limit_delta1(1.0, SystemParams(4)) == pytest.approx(ref.RATE_MAX_OF_4, rel=1e-12)
    assert mutual_information_limit_delta1(1.0, SystemParams(1)) == pytest.approx(ref.RATE_SINGLE_ANTENNA, rel=1e-12)


def test_selection_combining_grows_with_m():
    vals = [mutual_information_limit_delta1(3.0, SystemParams(m)) for m in (1, 2, 4, 8, 16)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_rate_vanishes_at_low_power():
    assert mutual_information_limit_delta0(1e-9, SystemParams(2)) < 2e-9


def test_degenerate_rate_matches_quadrature_reference():
    assert mutual_information(2.0, SystemParams(2), 0.5) == pytest.approx(ref.RATE_QUADRATURE_P2, rel=1e-10)


@pytest.mark.parametrize("m,delta,xi,p_s", [
    (2, 0.3, 1.0, 1.0), (3, 0.5, 2.0, 10.0), (4, 0.2, 1.0, 100.0), (4, 0.75, 0.1, 3.0), (8, 0.6, 10.0, 0.5),
    (4, 0.5, 1.0, 7.0), (4, 2.0 / 3.0, 1.0, 7.0),
])
def test_rate_against_quadrature(m, delta, xi, p_s):
    params = SystemParams(m, xi, 1.0)
    assert mutual_information(p_s, params, delta) == pytest.approx(rate_by_parts(p_s, params, delta), rel=1e-8)


@pytest.mark.parametrize("m", (2, 4, 8))
@pytest.mark.parametrize("xi", XI_VALUES)
def test_rate_nondecreasing_in_delta(m, xi):
    params = SystemParams(m, xi, 1.0)
    vals = np.array([float(mutual_information(5.0, params, d)) for d in DELTA_GRID])
    assert np.all(np.diff(vals) >= -1e-9)


def test_rate_near_endpoints_approaches_limits():
    params = SystemParams(4, 2.0, 1.0)
    assert mutual_information(4.0, params, 1e-4) == pytest.approx(
        float(mutual_information_limit_delta0(4.0, params)), rel=1e-3)
    assert mutual_information(4.0, params, 1 - 1e-4) == pytest.approx(
        float(mutual_information_limit_delta1(4.0, params)), rel=1e-3)


def test_rate_domain():
    for bad in (0.0, -1.0):
        with pytest.raises(DomainError):
            mutual_information(bad, SystemParams(2), 0.5)


def test_rate_survives_extreme_arguments():
    params = SystemParams(4)
    for p_s in (1e-8, 1e8):
        for d in (1e-5, 0.5, 1 - 1e-5):
            v = mutual_information(p_s, params, d)
            assert math.isfinite(v) and v >= 0


# --- outage ------------------------------------------------------------------

def test_outage_max_gain_example():
    assert outage_probability(1.0, 1.0, SystemParams(2), 1.0) == pytest.approx(0.39958, abs=1e-5)


def test_outage_matches_simulation_reference():
    v = outage_probability(10.0, 1.0, SystemParams(2), 0.5)
    assert v.units == PROBABILITY
    assert v == pytest.approx(ref.MC_OUTAGE_P10_R1, abs=ref.MC_TOLERANCE)


def test_outage_vanishes_at_high_power():
    assert outage_probability(1e12, 1.0, SystemParams(2), 0.5) < 1e-11


def test_outage_domain():
    with pytest.raises(DomainError):
        outage_probability(1.0, 0.0, SystemParams(2), 0.5)


# --- small-x behaviour ------------------------------------------------------

def test_asymptotic_examples():
    assert asymptotic_cdf_small_x(0.01, SystemParams(2), 1.0) == pytest.approx(1e-4)
    assert asymptotic_cdf_small_x(0.01, SystemParams(2), 0.5) == pytest.approx(5e-3)


@pytest.mark.parametrize("m,delta,xi", [(2, 1.0, 1.0), (4, 1.0, 2.0), (2, 0.5, 1.0), (4, 0.3, 1.0), (4, 0.0, 1.0),
                                        (3, 2.0 / 3.0, 1.0), (4, 0.9, 10.0)])
def test_asymptotic_ratio_tends_to_one(m, delta, xi):
    params = SystemParams(m, xi, 1.0)
    errors = []
    for x in (1e-3, 1e-4, 1e-5):
        exact = float(cdf_selected_data_gain(x * xi, params, delta))
        errors.append(abs(asymptotic_cdf_small_x(x * xi, params, delta) / exact - 1.0))
    # first-order expansion: the relative error shrinks about linearly in x
    if errors[2] > 1e-9:
        assert errors[1] < errors[0] / 5 and errors[2] < errors[1] / 5
    assert errors[2] < 1e-2


# --- MetricValue -----------------------------------------------------------

def test_metric_value_behaves_as_float():
    v = MetricValue(0.5, PROBABILITY)
    assert v + 1 == 1.5 and v.units == PROBABILITY
    w = pickle.loads(pickle.dumps(v))
    assert w == 0.5 and w.units == PROBABILITY
    assert "probability" in repr(v)
