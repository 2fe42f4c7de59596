"""SVG line plots for run reports.  Plotting never gates a check."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "stokes-dtn"


def line_plot(path, series, xlabel, ylabel, title=None, logx=False, logy=False) -> Path:
    """Write one SVG with a line per ``(label, xs, ys)`` in ``series``."""
    fig, ax = plt.subplots(figsize=(6, 3.6))
    for label, xs, ys in series:
        ax.plot(xs, ys, marker="o", markersize=3, linewidth=1.2, label=label)
    if logx:
        ax.set_xscale("log", base=2)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.grid(alpha=0.3)
    ax.legend(frameon=False)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path
