"""Matplotlib figure rendering for score and comparison reports.

Figures are written to files next to the delimited report output; the Agg
backend keeps rendering headless.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .evalreport import RunRecord


def render_accuracy_figure(records: Sequence[RunRecord], path: str | Path) -> Path:
    """Grouped bar chart of accuracy per benchmark, one bar group per run."""
    if not records:
        raise ValueError("at least one run record is required")
    path = Path(path)
    benchmarks = sorted({record.benchmark for record in records})
    runs = sorted({record.run_id for record in records})
    by_key = {(record.run_id, record.benchmark): record for record in records}

    fig, ax = plt.subplots(figsize=(max(6.0, 1.8 * len(benchmarks)), 4.0))
    width = 0.8 / max(1, len(runs))
    for k, run in enumerate(runs):
        xs, ys = [], []
        for b, benchmark in enumerate(benchmarks):
            record = by_key.get((run, benchmark))
            if record is None:
                continue
            xs.append(b + k * width)
            ys.append(record.accuracy_percent)
        bars = ax.bar(xs, ys, width=width, label=run)
        ax.bar_label(bars, fmt="%.1f", fontsize=8)
    ax.set_xticks([b + width * (len(runs) - 1) / 2 for b in range(len(benchmarks))])
    ax.set_xticklabels(benchmarks)
    ax.set_ylabel("accuracy (%)")
    ax.set_ylim(0, 105)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_path_breakdown_figure(records: Sequence[RunRecord], path: str | Path) -> Path:
    """Stacked bars of resolution-path counts per (run, benchmark)."""
    if not records:
        raise ValueError("at least one run record is required")
    path = Path(path)
    ordered = sorted(records, key=lambda r: (r.run_id, r.benchmark))
    labels = [f"{r.run_id}\n{r.benchmark}" for r in ordered]
    columns = list(ordered[0].path_counts)

    fig, ax = plt.subplots(figsize=(max(6.0, 1.5 * len(ordered)), 4.0))
    bottoms = [0] * len(ordered)
    for column in columns:
        heights = [r.path_counts[column] for r in ordered]
        ax.bar(labels, heights, bottom=bottoms, label=column)
        bottoms = [b + h for b, h in zip(bottoms, heights)]
    ax.set_ylabel("items")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
