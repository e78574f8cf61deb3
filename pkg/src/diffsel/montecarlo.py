"""Monte Carlo oracle for antenna selection with statistical or instantaneous power.

Trials are generated in fixed blocks of :data:`diffsel.model.BLOCK_SIZE`
from counter-based streams, and per-block partial statistics are merged in
block order.  Results are therefore bit-identical for a given seed whatever
the number of worker processes.
"""

import math
import numbers
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Optional

import numpy as np

from .errors import ConfigurationError, DegenerateInputError
from .model import BLOCK_SIZE, Constraints, SystemParams, sample_gain_block
from .power import statistical_power
from .selection import difference_indices, ratio_indices

STATISTICAL_AIC = "statistical-aic"
INSTANTANEOUS_PIC = "instantaneous-pic"
FIXED = "fixed"
POLICIES = (STATISTICAL_AIC, INSTANTANEOUS_PIC, FIXED)

MAX_TRIALS = 10 ** 9
MIN_PHASE1_TRIALS = 10 ** 5
_PHASE_MAIN = 0
_PHASE_MEAN_ESTIMATE = 1


@dataclass(frozen=True)
class SimConfig:
    params: SystemParams
    constraints: Constraints
    strategy: str = "difference"
    delta: Optional[float] = None
    power_policy: str = FIXED
    fixed_power: Optional[float] = None
    trials: int = 100_000
    seed: int = 12345
    r0: float = 1.0

    def __post_init__(self):
        if self.strategy not in ("difference", "ratio"):
            raise ConfigurationError(f"strategy must be 'difference' or 'ratio', got {self.strategy!r}")
        if self.strategy == "difference":
            if self.delta is None or not 0.0 <= self.delta <= 1.0:
                raise ConfigurationError(f"difference strategy needs delta in [0, 1], got {self.delta!r}")
        elif self.delta is not None:
            raise ConfigurationError("ratio strategy takes no delta")
        if self.power_policy not in POLICIES:
            raise ConfigurationError(f"power_policy must be one of {POLICIES}, got {self.power_policy!r}")
        if self.power_policy == FIXED:
            if self.fixed_power is None or not (0 < self.fixed_power < math.inf):
                raise ConfigurationError("fixed power policy needs a finite fixed_power > 0")
        elif self.fixed_power is not None:
            raise ConfigurationError("fixed_power is only meaningful with the fixed policy")
        if isinstance(self.trials, bool) or not isinstance(self.trials, numbers.Integral):
            raise ConfigurationError(f"trials must be an integer, got {self.trials!r}")
        if not 1 <= self.trials <= MAX_TRIALS:
            raise ConfigurationError(f"trials must lie in [1, {MAX_TRIALS}], got {self.trials}")
        if not isinstance(self.seed, numbers.Integral) or not 0 <= self.seed < 2 ** 64:
            raise ConfigurationError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if not self.r0 > 0:
            raise ConfigurationError(f"r0 must be > 0, got {self.r0!r}")


@dataclass(frozen=True)
class SimReport:
    mean_mi: float
    outage: float
    mean_interference: float
    mean_selected_gain_s: float
    mean_selected_gain_p: float
    mean_power: float
    stderr_mi: float
    stderr_outage: float
    stderr_interference: float
    stderr_selected_gain_s: float
    stderr_selected_gain_p: float
    stderr_power: float
    trials_used: int
    phase1_trials: int = 0
    phase1_mean_gain_p: float = math.nan
    phase1_stderr: float = math.nan

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass
class _Moments:
    """Count, mean and sum of squared deviations; merged with Chan's update."""

    n: int = 0
    mean: np.ndarray = field(default_factory=lambda: np.zeros(0))
    m2: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @classmethod
    def of(cls, columns):
        data = np.column_stack(columns)
        mean = data.mean(axis=0)
        return cls(data.shape[0], mean, ((data - mean) ** 2).sum(axis=0))

    def merge(self, other):
        if self.n == 0:
            return other
        n = self.n + other.n
        diff = other.mean - self.mean
        mean = self.mean + diff * (other.n / n)
        m2 = self.m2 + other.m2 + diff ** 2 * (self.n * other.n / n)
        return _Moments(n, mean, m2)

    def stderr(self):
        if self.n < 2:
            return np.zeros_like(self.mean)
        return np.sqrt(self.m2 / (self.n - 1)) / math.sqrt(self.n)


def _blocks(trials):
    full, rest = divmod(trials, BLOCK_SIZE)
    sizes = [BLOCK_SIZE] * full + ([rest] if rest else [])
    return list(enumerate(sizes))


def _select(strategy, delta, gs, gp):
    if strategy == "ratio":
        return ratio_indices(gs, gp)
    return difference_indices(gs, gp, delta)


def _selected_block(params, strategy, delta, seed, block, n, phase):
    gs, gp = sample_gain_block(params, seed, block, n, phase)
    idx = _select(strategy, delta, gs, gp)
    rows = np.arange(n)
    return gs[rows, idx], gp[rows, idx]


def _map(func, tasks, workers):
    if workers is None or workers <= 1 or len(tasks) <= 1:
        return [func(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, tasks))


def _reduce(parts):
    total = _Moments()
    for part in parts:
        total = total.merge(part)
    return total


def _mean_gain_p_task(task):
    config, block, n = task
    _, gp = _selected_block(config.params, config.strategy, config.delta, config.seed, block, n,
                            _PHASE_MEAN_ESTIMATE)
    return _Moments.of([gp])


def phase1_trials(trials):
    return max(MIN_PHASE1_TRIALS, trials // 10)


def _power_setting(config, workers):
    """Return (power, phase1 moments) for non-instantaneous policies."""
    if config.power_policy == FIXED:
        return config.fixed_power, None
    if config.power_policy == INSTANTANEOUS_PIC:
        return None, None
    if config.strategy == "difference":
        return statistical_power(config.params, config.constraints, config.delta).p_s, None
    tasks = [(config, b, n) for b, n in _blocks(phase1_trials(config.trials))]
    est = _reduce(_map(_mean_gain_p_task, tasks, workers))
    mean_gp = float(est.mean[0])
    power = min(config.constraints.interference_limit / mean_gp, config.constraints.p_max)
    return power, est


def _sim_task(task):
    config, power, block, n = task
    gs, gp = _selected_block(config.params, config.strategy, config.delta, config.seed, block, n,
                             _PHASE_MAIN)
    limit = config.constraints.interference_limit
    if config.power_policy == INSTANTANEOUS_PIC:
        p_max = config.constraints.p_max
        with np.errstate(divide="ignore"):
            p_limit = limit / gp
        if math.isinf(p_max) and np.any(gp == 0.0):
            raise DegenerateInputError("zero interference gain with unbounded peak power")
        bound = p_limit <= p_max
        p = np.where(bound, p_limit, p_max)
        interference = np.where(bound, limit, p * gp)
    else:
        p = np.full(n, power)
        interference = p * gp
    rate = np.log1p(p * gs / config.params.noise_power) / math.log(2.0)
    outage = (rate <= config.r0).astype(float)
    return _Moments.of([rate, outage, interference, gs, gp, p])


def run_sim(config, workers=1):
    """Simulate ``config.trials`` selections and summarize rate, outage and interference.

    For ratio selection under the statistical (average-interference) policy
    the mean selected interference gain is first estimated from an
    independent phase of ``max(1e5, trials/10)`` trials, then the power
    ``min(limit / estimate, p_max)`` is applied in the main phase.
    """
    power, est = _power_setting(config, workers)
    tasks = [(config, power, b, n) for b, n in _blocks(config.trials)]
    total = _reduce(_map(_sim_task, tasks, workers))
    mean = [float(v) for v in total.mean]
    err = [float(v) for v in total.stderr()]
    extra = {}
    if est is not None:
        extra = dict(phase1_trials=est.n, phase1_mean_gain_p=float(est.mean[0]),
                     phase1_stderr=float(est.stderr()[0]))
    return SimReport(*mean, *err, total.n, **extra)


def _cdf_task(task):
    config, grids, block, n = task
    gs, gp = _selected_block(config.params, config.strategy, config.delta, config.seed, block, n,
                             _PHASE_MAIN)
    values = {"data": gs, "interference": gp}
    return {link: np.bincount(np.searchsorted(grid, values[link], side="left"), minlength=len(grid) + 1)
            for link, grid in grids.items()}


def empirical_cdfs(config, grids, workers=1):
    """Empirical CDFs of the selected gains for several links in one pass.

    ``grids`` maps ``"data"`` and/or ``"interference"`` to ascending x grids.
    """
    grids = {link: np.asarray(g, dtype=float) for link, g in grids.items()}
    for link, grid in grids.items():
        if link not in ("data", "interference"):
            raise ValueError(f"link must be 'data' or 'interference', got {link!r}")
        if np.any(np.diff(grid) < 0):
            raise ValueError("x_grid must be sorted ascending")
    live = {link: g for link, g in grids.items() if g.size}
    out = {link: [] for link in grids}
    if not live:
        return out
    tasks = [(config, live, b, n) for b, n in _blocks(config.trials)]
    counts = {link: np.zeros(len(g) + 1, dtype=np.int64) for link, g in live.items()}
    for part in _map(_cdf_task, tasks, workers):
        for link in live:
            counts[link] += part[link]
    for link in live:
        # bin j holds samples in (grid[j-1], grid[j]]
        out[link] = list(np.cumsum(counts[link])[:-1] / config.trials)
    return out


def empirical_cdf(config, link, x_grid, workers=1):
    """Fraction of selected ``link`` gains at or below each point of ``x_grid``."""
    return empirical_cdfs(config, {link: x_grid}, workers)[link]
