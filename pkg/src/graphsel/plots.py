"""Figure rendering for benchmark grids and core-set sweeps.

Figures are written next to the delimited output files; rendering never
blocks on a display (Agg backend).
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def plot_accuracy_vs_budget(table, out_path) -> Path:
    """One line per method: mean accuracy vs budget with std error bars.

    ``table`` is a list of dicts with method, budget, mean_accuracy,
    std_accuracy keys (the cmd_bench grid rows)."""
    out_path = Path(out_path)
    methods = sorted({row["method"] for row in table})
    fig, ax = plt.subplots(figsize=(6, 4))
    for method in methods:
        rows = sorted((r for r in table if r["method"] == method),
                      key=lambda r: r["budget"])
        budgets = [r["budget"] for r in rows]
        means = [r["mean_accuracy"] for r in rows]
        stds = [r["std_accuracy"] for r in rows]
        ax.errorbar(budgets, means, yerr=stds, marker="o", capsize=3, label=method)
    ax.set_xlabel("labeling budget")
    ax.set_ylabel("test accuracy")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def plot_coreset_sweep(sweep: dict, out_path) -> Path:
    """Accuracy gap vs label rate for a single method's budget sweep."""
    out_path = Path(out_path)
    rows = sweep["rows"]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot([r["label_rate"] for r in rows], [r["gap"] for r in rows], marker="o")
    ax.axhline(0.0, color="gray", linewidth=0.8)
    ax.set_xlabel("label rate")
    ax.set_ylabel("accuracy gap vs full pool")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path
