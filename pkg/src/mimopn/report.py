"""Render capacity curves to figure files next to the delimited output."""

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .experiments import load_curve_points

_STYLES = {
    ("CO", "none"): dict(color="tab:blue", marker="o", linestyle="-"),
    ("CO", "kalman"): dict(color="tab:blue", marker="s", linestyle="--"),
    ("DO", "none"): dict(color="tab:red", marker="o", linestyle="-"),
    ("DO", "kalman"): dict(color="tab:red", marker="s", linestyle="--"),
}


def _label(scenario, compensation, kind):
    comp = "uncompensated" if compensation == "none" else "Kalman-compensated"
    suffix = " (analytic)" if kind == "analytic" else ""
    return f"{scenario}, {comp}{suffix}"


def _render(series, out_path, title):
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    for db, c, se, scenario, compensation, kind in series:
        style = dict(_STYLES.get((scenario, compensation), {}))
        if kind == "analytic":
            style.update(marker="x", linestyle=":")
        ax.errorbar(db, c, yerr=se, capsize=3, markersize=4,
                    label=_label(scenario, compensation, kind), **style)
    ax.set_xlabel(r"$P/\sigma_w^2$ [dB]")
    ax.set_ylabel("ergodic capacity [bits/s/Hz per subcarrier]")
    ax.grid(True, alpha=0.4)
    ax.legend(loc="upper left", fontsize=9)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def plot_curves(curves, out_path, title=None):
    """One figure overlaying in-memory CapacityCurve objects, with error bars."""
    series = []
    for curve in curves:
        series.append(([p.p_over_sigma_db for p in curve.points],
                       [p.c_erg for p in curve.points],
                       [p.std_err for p in curve.points],
                       curve.scenario, curve.compensation, curve.kind))
    _render(series, out_path, title)


def plot_curve_files(paths, out_path, title=None):
    """Same figure, built from emitted CSV/JSON curve files."""
    series = []
    for path in paths:
        pts, scenario, compensation, kind = load_curve_points(path)
        series.append(([p[0] for p in pts], [p[1] for p in pts], [p[2] for p in pts],
                       scenario, compensation, kind))
    _render(series, out_path, title)
