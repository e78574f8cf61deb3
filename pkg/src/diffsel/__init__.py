"""Difference transmit-antenna selection for underlay cognitive radio links.

Closed-form selected-link statistics, ergodic rate and outage, the
statistics-based power rule under average-interference and peak-power
limits, optimization of the selection weight, and a Monte Carlo oracle that
also covers ratio selection.
"""

__version__ = "0.1.0"

from .analytic import (MetricValue, asymptotic_cdf_small_x, cdf_selected_data_gain,
                       cdf_selected_interference_gain, mean_selected_interference_gain, mutual_information,
                       mutual_information_limit_delta0, mutual_information_limit_delta1, outage_probability,
                       pdf_difference_metric)
from .errors import ConfigurationError, DegenerateInputError, DomainError
from .model import (Constraints, DerivedWeights, GainSample, SelectionWeight, SystemParams, derive_weights,
                    sample_gains)
from .montecarlo import SimConfig, SimReport, empirical_cdf, run_sim
from .optimizer import OptimizationResult, objective_curve, optimize_delta
from .power import PowerDecision, average_interference, instantaneous_power_pic, statistical_power
from .selection import SelectionOutcome, difference_select, ratio_select
from .special import binomial, exp_integral_e1, exp_scaled_e1

__all__ = [
    "ConfigurationError", "Constraints", "DegenerateInputError", "DerivedWeights", "DomainError", "GainSample",
    "MetricValue", "OptimizationResult", "PowerDecision", "SelectionOutcome", "SelectionWeight", "SimConfig",
    "SimReport", "SystemParams", "asymptotic_cdf_small_x", "average_interference", "binomial",
    "cdf_selected_data_gain", "cdf_selected_interference_gain", "derive_weights", "difference_select",
    "empirical_cdf", "exp_integral_e1", "exp_scaled_e1", "instantaneous_power_pic",
    "mean_selected_interference_gain", "mutual_information", "mutual_information_limit_delta0",
    "mutual_information_limit_delta1", "objective_curve", "optimize_delta", "outage_probability",
    "pdf_difference_metric", "ratio_select", "run_sim", "sample_gains", "statistical_power",
]
