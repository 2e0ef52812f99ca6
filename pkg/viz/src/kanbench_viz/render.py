"""Figure rendering: accuracy violins and parameter-count bars.

Both renderers draw only what the result files carry; in particular the
violin's median tick sits at the exported median, never at a re-derived
statistic.  Each returns a {group label: plotted value} mapping so callers
and tests can confirm figure positions against the source data.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .bundle import ResultBundle

ARCH_COLORS = {"mlp": "#4878cf", "kan": "#d65f5f"}
_DPI = 150


def render_violins(bundle: ResultBundle, out_path) -> dict:
    """One violin per group with a tick at the exported median."""
    for group in bundle.groups:
        if len(group.accuracies) < 2:
            raise ValueError(
                f"group {group.key(bundle.keyed_by_order)!r} has "
                f"{len(group.accuracies)} repetition(s); need at least 2 for a violin"
            )
    labels = bundle.labels()
    positions = np.arange(1, len(labels) + 1)
    fig, ax = plt.subplots(figsize=(1.6 + 1.3 * len(labels), 4.5))

    medians = {}
    for pos, label, group in zip(positions, labels, bundle.groups):
        values = np.asarray(group.accuracies, dtype=float)
        color = ARCH_COLORS.get(group.arch, "#777777")
        if np.ptp(values) > 0:
            parts = ax.violinplot([values], positions=[pos], widths=0.8,
                                  showextrema=False, showmedians=False)
            for body in parts["bodies"]:
                body.set_facecolor(color)
                body.set_alpha(0.6)
        else:
            # all repetitions identical: no density to draw, mark the point
            ax.plot([pos], [values[0]], marker="o", color=color, markersize=5)
        tick = group.tick_median()
        medians[label] = tick
        ax.hlines(tick, pos - 0.2, pos + 0.2, color="black", linewidth=1.5)

    ax.set_xticks(positions)
    ax.set_xticklabels(labels, rotation=20)
    ax.set_ylabel("test accuracy")
    ax.set_xlim(0.4, len(labels) + 0.6)
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=_DPI)
    plt.close(fig)
    return medians


def render_param_bars(bundle: ResultBundle, out_path, log_y: bool = False) -> dict:
    """Bar chart of learnable-parameter counts, one bar per group."""
    labels = bundle.labels()
    positions = np.arange(len(labels))
    counts = [g.param_count for g in bundle.groups]
    colors = [ARCH_COLORS.get(g.arch, "#777777") for g in bundle.groups]

    fig, ax = plt.subplots(figsize=(1.6 + 1.3 * len(labels), 4.5))
    ax.bar(positions, counts, color=colors, width=0.7)
    for pos, count in zip(positions, counts):
        ax.annotate(str(count), (pos, count), ha="center", va="bottom", fontsize=9)
    if log_y:
        ax.set_yscale("log")
    ax.set_xticks(positions)
    ax.set_xticklabels(labels, rotation=20)
    ax.set_ylabel("learnable parameters")
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=_DPI)
    plt.close(fig)
    return dict(zip(labels, counts))
