"""Command-line front end.

Subcommands ``analyze``, ``optimize``, ``simulate`` and ``sweep``.  Powers
(peak power, interference limit, noise, fixed transmit power) are given in
dB and converted to linear units at this boundary.  A ``--config`` file of
``key = value`` lines supplies defaults; explicit flags win.

Exit codes: 0 success, 2 usage/validation error, 3 I/O error.
"""

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from . import __version__
from .analytic import mutual_information, outage_probability
from .errors import ConfigurationError
from .experiments import (DEFAULT_SEED, DEFAULT_TRIALS, METRICS, PRESETS, SYSTEMS, VARIABLES, SweepSpec,
                          db_to_linear, linear_to_db, plot_path, preset, run_sweep, spec_metadata,
                          write_csv)
from .model import Constraints, SystemParams
from .montecarlo import FIXED, POLICIES, SimConfig, run_sim
from .optimizer import MAX_MI, MIN_OUTAGE, objective_curve, optimize_delta
from .power import statistical_power
from .selection import STRATEGIES, resolve_strategy

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3


class UsageError(Exception):
    pass


def parse_db(text):
    """dB string to linear; accepts ``inf``."""
    value = float(text)
    if math.isinf(value) and value > 0:
        return math.inf
    return db_to_linear(value)


def parse_count(text):
    value = float(text)
    if not value.is_integer():
        raise ValueError(f"not an integer: {text!r}")
    return int(value)


def parse_delta(text):
    if str(text).strip().lower() == "optimal":
        return "optimal"
    return float(text)


# dest -> converter, shared by the flag parser and config files
CONVERTERS = {
    "antennas": int, "xi": float, "gamma_s": float, "gamma_p": float, "noise_db": float,
    "pmax_db": str, "interference_db": float, "r0": float, "delta": parse_delta, "metric": str,
    "strategy": str, "policy": str, "ps_db": float, "trials": parse_count, "seed": int,
    "workers": int, "out": str, "preset": str, "variable": str, "start": float, "stop": float,
    "points": int, "spacing": str, "systems": str, "grid_size": int, "plot": str,
}

DEFAULTS = dict(antennas=4, gamma_p=1.0, noise_db=0.0, pmax_db="10", interference_db=0.0, r0=1.0,
                metric="mi", seed=DEFAULT_SEED, workers=1, trials=DEFAULT_TRIALS, grid_size=101,
                plot="yes")


def read_config(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.lstrip("-").replace("-", "_")
            if key not in CONVERTERS or key == "config":
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = CONVERTERS[key](value)
            except ValueError:
                raise UsageError(f"{path}:{lineno}: bad value for {key}: {value!r}") from None
    return values


def _global_flags(parser, suppress):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", metavar="PATH", default=default, help="key = value defaults file")
    parser.add_argument("--seed", type=int, default=default)
    parser.add_argument("--workers", type=int, default=default)
    parser.add_argument("--out", metavar="PATH", default=default)


def _scenario_flags(parser):
    g = parser.add_argument_group("scenario")
    g.add_argument("-M", "--antennas", type=int)
    g.add_argument("--xi", type=float, help="mean gain ratio gamma_s/gamma_p (sets gamma_s)")
    g.add_argument("--gamma-s", type=float)
    g.add_argument("--gamma-p", type=float)
    g.add_argument("--noise-db", type=float)
    g.add_argument("--pmax-db", help="peak power in dB, or 'inf'")
    g.add_argument("--interference-db", type=float)
    g.add_argument("--r0", type=float, help="outage rate threshold, bits/s/Hz")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)

    parser = argparse.ArgumentParser(prog="diffsel", description=__doc__.splitlines()[0], parents=[common])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="closed-form metric at one weight")
    _scenario_flags(p)
    p.add_argument("--delta", type=parse_delta, help="weight in [0, 1] or 'optimal'")
    p.add_argument("--metric", choices=tuple(METRICS))

    p = sub.add_parser("optimize", parents=[common], help="optimal weight and objective curve")
    _scenario_flags(p)
    p.add_argument("--metric", choices=tuple(METRICS))
    p.add_argument("--grid-size", type=int)
    p.add_argument("--plot", choices=("yes", "no"))

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo run")
    _scenario_flags(p)
    p.add_argument("--strategy", choices=STRATEGIES)
    p.add_argument("--delta", type=float)
    p.add_argument("--policy", choices=POLICIES)
    p.add_argument("--ps-db", type=float, help="transmit power for the fixed policy, dB")
    p.add_argument("--trials", type=parse_count)

    p = sub.add_parser("sweep", parents=[common], help="figure-style parameter sweep to CSV")
    _scenario_flags(p)
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--variable", choices=VARIABLES)
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--spacing", choices=("linear", "log"))
    p.add_argument("--systems", help="comma-separated subset of " + ",".join(SYSTEMS))
    p.add_argument("--metric", choices=tuple(METRICS))
    p.add_argument("--trials", type=parse_count)
    p.add_argument("--plot", choices=("yes", "no"))
    return parser


def _merge(args):
    """Flags over config file over defaults; returns a plain dict."""
    opts = {k: v for k, v in vars(args).items() if v is not None}
    file_values = read_config(opts["config"]) if opts.get("config") else {}
    merged = dict(DEFAULTS)
    merged.update(file_values)
    merged.update(opts)
    if "xi" in opts and "gamma_s" in opts:
        raise UsageError("--xi and --gamma-s are mutually exclusive")
    return merged


def scenario(o):
    gamma_p = o["gamma_p"]
    if "xi" in o:
        gamma_s = o["xi"] * gamma_p
    else:
        gamma_s = o.get("gamma_s", 1.0)
    try:
        params = SystemParams(o["antennas"], gamma_s, gamma_p, db_to_linear(o["noise_db"]))
        constraints = Constraints(parse_db(o["pmax_db"]), db_to_linear(o["interference_db"]))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return params, constraints


def _check_delta(delta, flag="--delta"):
    if delta == "optimal":
        return delta
    if not 0.0 <= delta <= 1.0:
        raise UsageError(f"{flag} must lie in [0, 1] or be 'optimal', got {delta}")
    return delta


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(float(v))
    return str(v)


def cmd_analyze(o, out=None):
    out = out or sys.stdout
    params, constraints = scenario(o)
    delta = _check_delta(o.get("delta", "optimal"))
    metric = o["metric"]
    if delta == "optimal":
        objective = MAX_MI if metric == "mi" else MIN_OUTAGE
        res = optimize_delta(params, constraints, objective, o["r0"] if objective == MIN_OUTAGE else None)
        delta, p_s, value = res.delta_star, res.p_s_star, res.objective_value
        binding = statistical_power(params, constraints, delta).binding
    else:
        decision = statistical_power(params, constraints, delta)
        p_s, binding = decision.p_s, decision.binding
        if metric == "mi":
            value = mutual_information(p_s, params, delta)
        else:
            value = outage_probability(p_s, o["r0"], params, delta)
    print(f"delta: {delta!r}", file=out)
    print(f"p_s: {p_s!r} ({linear_to_db(p_s):.4f} dB, binding: {binding})", file=out)
    print(f"{METRICS[metric]}: {float(value)!r} {value.units}", file=out)
    if o.get("out"):
        _write_rows(o["out"], ("delta", "p_s", "binding", "metric_name", "metric_value", "units"),
                    [[_fmt(float(delta)), _fmt(p_s), binding, METRICS[metric], _fmt(float(value)), value.units]])
    return EXIT_OK


def cmd_optimize(o, out=None):
    out = out or sys.stdout
    params, constraints = scenario(o)
    metric = o["metric"]
    objective = MAX_MI if metric == "mi" else MIN_OUTAGE
    r0 = o["r0"] if objective == MIN_OUTAGE else None
    res = optimize_delta(params, constraints, objective, r0)
    print(f"objective: {res.objective}", file=out)
    print(f"delta_star: {res.delta_star!r}", file=out)
    print(f"p_s_star: {res.p_s_star!r} ({linear_to_db(res.p_s_star):.4f} dB)", file=out)
    print(f"{METRICS[metric]}: {float(res.objective_value)!r} {res.objective_value.units}", file=out)
    print(f"evaluations: {res.evaluations}", file=out)
    if o.get("out"):
        if o["grid_size"] < 2:
            raise UsageError("--grid-size must be >= 2")
        curve = objective_curve(params, constraints, objective, r0, o["grid_size"])
        _write_rows(o["out"], ("delta", "p_s", "metric_name", "metric_value"),
                    [[_fmt(d), _fmt(p), METRICS[metric], _fmt(float(v))] for d, p, v in curve])
        if o["plot"] == "yes":
            from .plotting import plot_objective_curve
            plot_objective_curve(curve, METRICS[metric], plot_path(o["out"]), res.delta_star)
    return EXIT_OK


SIM_CONFIG_COLUMNS = ("strategy", "delta", "power_policy", "seed")


def cmd_simulate(o, out=None):
    out = out or sys.stdout
    if o["trials"] < 1:
        raise UsageError(f"--trials must be >= 1, got {o['trials']}")
    params, constraints = scenario(o)
    strategy, delta = resolve_strategy(o.get("strategy", "difference"), o.get("delta"))
    if delta is not None:
        _check_delta(delta)
    policy = o.get("policy", FIXED)
    fixed = db_to_linear(o["ps_db"]) if policy == FIXED and "ps_db" in o else None
    if policy == FIXED and fixed is None:
        raise UsageError("--policy fixed needs --ps-db")
    config = SimConfig(params, constraints, strategy, delta, policy, fixed, o["trials"], o["seed"], o["r0"])
    report = run_sim(config, workers=o["workers"])
    fields = report.as_dict()
    for name, value in fields.items():
        print(f"{name}: {value!r}", file=out)
    if o.get("out"):
        header = SIM_CONFIG_COLUMNS + tuple(fields)
        row = [strategy, _fmt(delta), policy, str(config.seed)] + [_fmt(v) for v in fields.values()]
        _write_rows(o["out"], header, [row])
    return EXIT_OK


def sweep_spec(o):
    systems = tuple(s.strip() for s in o["systems"].split(",")) if "systems" in o else None
    custom = dict(sweep_variable=o.get("variable"), start=o.get("start"), stop=o.get("stop"),
                  num_points=o.get("points"), spacing=o.get("spacing"), systems=systems,
                  metric=o.get("metric") if "metric" in o else None, trials=o["trials"], seed=o["seed"])
    scen = {}
    if "antennas" in o:
        scen["num_antennas"] = o["antennas"]
    if "xi" in o:
        scen["mean_gain_s"] = o["xi"] * o["gamma_p"]
    elif "gamma_s" in o:
        scen["mean_gain_s"] = o["gamma_s"]
    if "gamma_p" in o:
        scen["mean_gain_p"] = o["gamma_p"]
    if "noise_db" in o:
        scen["noise_power"] = db_to_linear(o["noise_db"])
    if "pmax_db" in o:
        scen["p_max"] = parse_db(o["pmax_db"])
    if "interference_db" in o:
        scen["interference_limit"] = db_to_linear(o["interference_db"])
    if "r0" in o:
        scen["r0"] = o["r0"]
    if o.get("preset"):
        return preset(o["preset"], **custom, **scen)
    missing = [f for f, k in (("--variable", "variable"), ("--start", "start"), ("--stop", "stop"),
                              ("--points", "points")) if k not in o]
    if missing:
        raise UsageError("sweep needs --preset or " + ", ".join(missing))
    kwargs = {k: v for k, v in custom.items() if v is not None}
    return SweepSpec(**kwargs, **scen)


def cmd_sweep(o, out=None):
    out = out or sys.stdout
    if not o.get("out"):
        raise UsageError("sweep needs --out PATH")
    spec = sweep_spec(o)
    records = run_sweep(spec, workers=o["workers"])
    write_csv(records, o["out"])
    meta_path = Path(o["out"]).with_suffix(".json")
    with open(meta_path, "w") as fh:
        json.dump(spec_metadata(spec), fh, indent=2)
    if o["plot"] == "yes":
        from .plotting import plot_sweep
        plot_sweep(records, plot_path(o["out"]), title=spec.name)
    print(f"wrote {len(records)} records to {o['out']}", file=out)
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "optimize": cmd_optimize, "simulate": cmd_simulate, "sweep": cmd_sweep}


def _scenario_defaults_for(command, merged, explicit):
    # sweep presets carry their own scenario; only explicit or file values override them
    if command == "sweep":
        return {k: v for k, v in merged.items() if k in explicit or k not in DEFAULTS or
                k in ("trials", "seed", "workers", "plot", "gamma_p")}
    return merged


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.command
    try:
        explicit = {k for k, v in vars(args).items() if v is not None}
        merged = _merge(args)
        if merged.get("config"):
            explicit |= set(read_config(merged["config"]))
        o = _scenario_defaults_for(command, merged, explicit)
        if o["workers"] < 1:
            raise UsageError("--workers must be >= 1")
        return COMMANDS[command](o)
    except (UsageError, ConfigurationError, ValueError) as exc:
        print(f"diffsel {command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"diffsel {command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
