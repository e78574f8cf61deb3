"""Parameter sweeps comparing difference and ratio selection systems.

Each sweep evaluates a set of named systems over one axis (the mean-gain
ratio ``xi``, the peak power in dB, or the interference limit in dB) and
produces flat records ready for CSV output.  Difference-selection systems are
evaluated in closed form; ratio-selection systems by simulation.
"""

import csv
import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from .analytic import mutual_information, outage_probability
from .errors import ConfigurationError
from .model import Constraints, SystemParams
from .montecarlo import INSTANTANEOUS_PIC, STATISTICAL_AIC, SimConfig, run_sim
from .optimizer import MAX_MI, MIN_OUTAGE, optimize_delta
from .power import statistical_power

CSV_HEADER = ("sweep_variable", "value", "system", "delta", "p_s", "metric_name", "metric_value",
              "stderr", "trials", "seed")

VARIABLES = ("xi", "p_max_db", "interference_limit")
SYSTEMS = ("DS-AIC", "RS-AIC", "RS-PIC", "RS-PIC-infinite", "DS-delta0", "DS-delta1", "DS-optimal")
METRICS = {"mi": "mutual_information", "outage": "outage_probability"}

DEFAULT_TRIALS = 1_000_000
DEFAULT_SEED = 12345


def db_to_linear(db):
    return 10.0 ** (float(db) / 10.0)


def linear_to_db(value):
    return 10.0 * math.log10(value)


@dataclass(frozen=True)
class SweepSpec:
    """One sweep axis plus the fixed scenario fields.

    ``interference_limit`` axis values are in dB, like ``p_max_db``; ``xi``
    is linear and varies ``mean_gain_s`` with ``mean_gain_p`` held at 1.
    """

    sweep_variable: str
    start: float
    stop: float
    num_points: int
    spacing: str = "linear"
    systems: Tuple[str, ...] = ("DS-AIC", "RS-AIC", "RS-PIC", "RS-PIC-infinite")
    metric: str = "mi"
    num_antennas: int = 2
    mean_gain_s: float = 1.0
    mean_gain_p: float = 1.0
    noise_power: float = 1.0
    p_max: float = 1.0
    interference_limit: float = 1.0
    r0: float = 1.0
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    name: Optional[str] = None

    def __post_init__(self):
        if self.sweep_variable not in VARIABLES:
            raise ConfigurationError(f"sweep_variable must be one of {VARIABLES}, got {self.sweep_variable!r}")
        if self.num_points < 2:
            raise ConfigurationError("num_points must be >= 2")
        if not self.start < self.stop:
            raise ConfigurationError("sweep range needs start < stop")
        if self.spacing not in ("linear", "log"):
            raise ConfigurationError(f"spacing must be 'linear' or 'log', got {self.spacing!r}")
        if self.spacing == "log" and self.start <= 0:
            raise ConfigurationError("log spacing needs start > 0")
        if not self.systems:
            raise ConfigurationError("at least one system is required")
        for s in self.systems:
            if s not in SYSTEMS:
                raise ConfigurationError(f"unknown system {s!r}; expected a subset of {SYSTEMS}")
        if self.metric not in METRICS:
            raise ConfigurationError(f"metric must be one of {tuple(METRICS)}, got {self.metric!r}")

    def values(self):
        if self.spacing == "log":
            return [float(v) for v in np.geomspace(self.start, self.stop, self.num_points)]
        return [float(v) for v in np.linspace(self.start, self.stop, self.num_points)]


@dataclass(frozen=True)
class SweepResult:
    sweep_variable: str
    value: float
    system: str
    delta: Optional[float]
    p_s: float
    metric_name: str
    metric_value: float
    stderr: Optional[float] = None
    trials: Optional[int] = None
    seed: Optional[int] = None

    def row(self):
        return [_fmt(getattr(self, name)) for name in CSV_HEADER]


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(float(v))
    return str(v)


_FIG_COMMON = dict(interference_limit=1.0, r0=1.0, noise_power=1.0, mean_gain_p=1.0)
_XI = dict(sweep_variable="xi", start=0.1, stop=100.0, num_points=16, spacing="log")
_DS_ENDPOINTS = ("DS-delta0", "DS-delta1", "DS-optimal")
_RS_COMPARE = ("DS-AIC", "RS-AIC", "RS-PIC", "RS-PIC-infinite")

PRESETS = {
    "fig2": dict(_XI, systems=_DS_ENDPOINTS, metric="mi", num_antennas=4, p_max=db_to_linear(10)),
    "fig3": dict(_XI, systems=_DS_ENDPOINTS, metric="outage", num_antennas=4, p_max=db_to_linear(10)),
    "fig4": dict(_XI, systems=_RS_COMPARE, metric="mi", num_antennas=2, p_max=db_to_linear(0)),
    "fig5": dict(_XI, systems=_RS_COMPARE, metric="outage", num_antennas=2, p_max=db_to_linear(0)),
    "fig6": dict(sweep_variable="p_max_db", start=-20.0, stop=20.0, num_points=21, systems=_RS_COMPARE,
                 metric="mi", num_antennas=2, mean_gain_s=1.0),
    "fig7": dict(sweep_variable="p_max_db", start=-20.0, stop=20.0, num_points=21, systems=_RS_COMPARE,
                 metric="outage", num_antennas=2, mean_gain_s=1.0),
    "fig8": dict(sweep_variable="interference_limit", start=-10.0, stop=20.0, num_points=16,
                 systems=_RS_COMPARE, metric="mi", num_antennas=2, mean_gain_s=1.0,
                 p_max=db_to_linear(5)),
    "fig9": dict(sweep_variable="interference_limit", start=-10.0, stop=20.0, num_points=16,
                 systems=_RS_COMPARE, metric="outage", num_antennas=2, mean_gain_s=1.0,
                 p_max=db_to_linear(5)),
}


def preset(name, **overrides):
    """SweepSpec for a named preset (``fig2`` .. ``fig9``) with optional overrides."""
    if name not in PRESETS:
        raise ConfigurationError(f"unknown preset {name!r}; expected one of {sorted(PRESETS)}")
    kwargs = dict(_FIG_COMMON, **PRESETS[name], name=name)
    kwargs.update({k: v for k, v in overrides.items() if v is not None})
    return SweepSpec(**kwargs)


def scenario_at(spec, value):
    """``(SystemParams, Constraints)`` for one point of the sweep axis."""
    gs, gp = spec.mean_gain_s, spec.mean_gain_p
    p_max, limit = spec.p_max, spec.interference_limit
    if spec.sweep_variable == "xi":
        gs, gp = value, 1.0
    elif spec.sweep_variable == "p_max_db":
        p_max = db_to_linear(value)
    else:
        limit = db_to_linear(value)
    return SystemParams(spec.num_antennas, gs, gp, spec.noise_power), Constraints(p_max, limit)


def _analytic_metric(spec, params, p_s, delta):
    if spec.metric == "mi":
        return mutual_information(p_s, params, delta)
    return outage_probability(p_s, spec.r0, params, delta)


def _simulated(spec, params, constraints, policy, workers):
    report = run_sim(SimConfig(params, constraints, "ratio", None, policy, trials=spec.trials,
                               seed=spec.seed, r0=spec.r0), workers=workers)
    if spec.metric == "mi":
        return report.mean_power, report.mean_mi, report.stderr_mi
    return report.mean_power, report.outage, report.stderr_outage


def evaluate_system(spec, value, system, workers=1):
    """One :class:`SweepResult` for ``system`` at axis value ``value``."""
    params, constraints = scenario_at(spec, value)
    metric_name = METRICS[spec.metric]
    base = dict(sweep_variable=spec.sweep_variable, value=value, system=system, metric_name=metric_name)
    if system in ("DS-AIC", "DS-optimal"):
        objective = MAX_MI if spec.metric == "mi" else MIN_OUTAGE
        r0 = spec.r0 if objective == MIN_OUTAGE else None
        res = optimize_delta(params, constraints, objective, r0)
        return SweepResult(delta=res.delta_star, p_s=res.p_s_star, metric_value=float(res.objective_value), **base)
    if system in ("DS-delta0", "DS-delta1"):
        delta = 0.0 if system == "DS-delta0" else 1.0
        p_s = statistical_power(params, constraints, delta).p_s
        return SweepResult(delta=delta, p_s=p_s, metric_value=float(_analytic_metric(spec, params, p_s, delta)),
                           **base)
    if system == "RS-AIC":
        p_s, metric, err = _simulated(spec, params, constraints, STATISTICAL_AIC, workers)
    elif system == "RS-PIC":
        p_s, metric, err = _simulated(spec, params, constraints, INSTANTANEOUS_PIC, workers)
    else:
        unbounded = Constraints(math.inf, constraints.interference_limit)
        p_s, metric, err = _simulated(spec, params, unbounded, INSTANTANEOUS_PIC, workers)
    return SweepResult(delta=None, p_s=p_s, metric_value=metric, stderr=err, trials=spec.trials,
                       seed=spec.seed, **base)


def run_sweep(spec, workers=1):
    """All records of the (axis value x system) cross product, in axis-major order."""
    return [evaluate_system(spec, v, s, workers) for v in spec.values() for s in spec.systems]


def write_csv(records, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for rec in records:
            writer.writerow(rec.row())


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def spec_metadata(spec):
    meta = dataclasses.asdict(spec)
    meta["systems"] = list(spec.systems)
    meta["axis_values"] = spec.values()
    meta["axis_units"] = {"xi": "linear", "p_max_db": "dB", "interference_limit": "dB"}[spec.sweep_variable]
    meta["p_max"] = repr(spec.p_max)
    return meta


def plot_path(csv_path):
    """Figure path written alongside a CSV report."""
    return str(Path(csv_path).with_suffix(".png"))
