"""Matplotlib rendering of sweep and objective-curve reports."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

AXIS_LABELS = {
    "xi": r"$\xi = \bar\gamma_s / \bar\gamma_p$",
    "p_max_db": r"$P_{max}$ (dB)",
    "interference_limit": r"interference limit (dB)",
}
METRIC_LABELS = {
    "mutual_information": "mutual information (bits/s/Hz)",
    "outage_probability": "outage probability",
}


def _setup():
    plt.rcParams.update({
        "font.size": 9,
        "axes.grid": True,
        "grid.alpha": 0.3,
        "grid.linestyle": "--",
        "legend.fontsize": 8,
        "lines.linewidth": 1.2,
        "lines.markersize": 4,
        "savefig.dpi": 150,
        "savefig.bbox": "tight",
    })


def plot_sweep(records, path, title=None):
    """Plot one line per system against the sweep axis and save to ``path``."""
    _setup()
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    systems = list(dict.fromkeys(r.system for r in records))
    for system in systems:
        rows = [r for r in records if r.system == system]
        x = [r.value for r in rows]
        y = [r.metric_value for r in rows]
        err = [r.stderr or 0.0 for r in rows]
        ax.errorbar(x, y, yerr=err, marker="o", capsize=2, label=system)
    variable = records[0].sweep_variable
    metric = records[0].metric_name
    if variable == "xi":
        ax.set_xscale("log")
    if metric == "outage_probability" and all(r.metric_value > 0 for r in records):
        ax.set_yscale("log")
    ax.set_xlabel(AXIS_LABELS[variable])
    ax.set_ylabel(METRIC_LABELS[metric])
    if title:
        ax.set_title(title)
    ax.legend()
    fig.savefig(path)
    plt.close(fig)


def plot_objective_curve(curve, metric_name, path, delta_star=None):
    _setup()
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    ax.plot([c[0] for c in curve], [float(c[2]) for c in curve], marker=".")
    if delta_star is not None:
        ax.axvline(delta_star, color="k", linestyle=":", label=rf"$\delta^*={delta_star:.4f}$")
        ax.legend()
    ax.set_xlabel(r"selection weight $\delta$")
    ax.set_ylabel(METRIC_LABELS[metric_name])
    fig.savefig(path)
    plt.close(fig)
