"""Figure rendering for sweep results.

Everything here draws from a finished SweepResult and writes image files;
nothing recomputes simulation state. The Agg backend is forced so rendering
works on headless machines.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiment import (
    ALPHA_BIN_WIDTH,
    SweepResult,
    histogram_rows,
    summarize,
)

__all__ = [
    "plot_transition",
    "plot_alpha_histogram",
    "plot_round_traces",
    "render_report_figures",
]


def plot_transition(result: SweepResult, path: str) -> None:
    """Fraction of optimal runs and mean final alpha against neighbor count."""
    rows = summarize(result)
    ks = [row.k for row in rows]
    frac = [row.frac_optimal for row in rows]
    mean_alpha = [row.mean_alpha for row in rows]

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(ks, frac, "o-", color="tab:blue", label="fraction of runs at optimum")
    ax.plot(ks, mean_alpha, "s--", color="tab:orange", label="mean final alpha")
    ax.set_xlabel("bids per target (k nearest sensors)")
    ax.set_ylabel("value")
    ax.set_xticks(ks)
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="lower right")
    ax.set_title("Solution quality versus communication")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_alpha_histogram(result: SweepResult, path: str) -> None:
    """Small-multiple histograms of final alpha, one panel per k."""
    ks = list(result.config.neighbor_counts)
    rows = histogram_rows(result)
    fig, axes = plt.subplots(
        len(ks), 1, figsize=(6.4, 1.4 * len(ks)), sharex=True, squeeze=False
    )
    for ax, k in zip(axes[:, 0], ks):
        edges = [edge for kk, edge, _ in rows if kk == k]
        counts = [count for kk, _, count in rows if kk == k]
        ax.bar(
            edges,
            counts,
            width=ALPHA_BIN_WIDTH * 0.9,
            align="edge",
            color="tab:blue",
        )
        ax.set_ylabel(f"k={k}", rotation=0, ha="right", va="center")
        ax.grid(True, axis="y", alpha=0.3)
    axes[-1, 0].set_xlabel("final alpha (bin width 0.05)")
    fig.suptitle("Distribution of final solution quality")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _mean_alpha_by_round(result: SweepResult, k: int) -> np.ndarray:
    """Average alpha trajectory over all defined cells at this k.

    Shorter traces are extended with their final value: a quiescent
    allocation persists unchanged through the remaining rounds.
    """
    traces = [
        [record.alpha for record in cell.trace.records]
        for cell in result.cells
        if cell.k == k and cell.final_alpha is not None
    ]
    if not traces:
        return np.empty(0)
    horizon = max(len(t) for t in traces)
    padded = np.array(
        [t + [t[-1]] * (horizon - len(t)) for t in traces], dtype=float
    )
    return padded.mean(axis=0)


def plot_round_traces(result: SweepResult, path: str) -> None:
    """Mean alpha per protocol round, one line per k."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    cmap = plt.get_cmap("viridis")
    ks = list(result.config.neighbor_counts)
    for i, k in enumerate(ks):
        curve = _mean_alpha_by_round(result, k)
        if curve.size == 0:
            continue
        color = cmap(i / max(1, len(ks) - 1))
        ax.plot(range(curve.size), curve, color=color, label=f"k={k}")
    ax.set_xlabel("round")
    ax.set_ylabel("mean alpha")
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="lower right", ncol=2)
    ax.set_title("Convergence of global utility toward the optimum")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_report_figures(result: SweepResult, out_dir: str) -> list[str]:
    """Write the three standard figures into out_dir; returns their paths."""
    targets = [
        (os.path.join(out_dir, "transition.png"), plot_transition),
        (os.path.join(out_dir, "alpha_histogram.png"), plot_alpha_histogram),
        (os.path.join(out_dir, "round_traces.png"), plot_round_traces),
    ]
    written = []
    for path, renderer in targets:
        renderer(result, path)
        written.append(path)
    return written
