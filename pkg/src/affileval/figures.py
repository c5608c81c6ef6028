"""Report figures rendered next to the delimited experiment output.

Three PNGs: a signed-bias heatmap (metrics by F1 bin, diverging colormap
centered at zero), a matching MAE heatmap, and per-metric scatters of
relative bias against run F1. Rendering is headless; files are written with
a fixed dpi so reruns produce stable images.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .analysis import BiasRecord, BiasTable

_DPI = 150


def _axes_order(table: BiasTable) -> tuple[list[str], list[str]]:
    bins: list[str] = []
    metrics: set[str] = set()
    for bin_label, metric in table.sorted_keys():
        if bin_label not in bins:
            bins.append(bin_label)
        metrics.add(metric)
    return bins, sorted(metrics)


def _matrix(table: BiasTable, bins: Sequence[str], metrics: Sequence[str], field: str) -> np.ndarray:
    grid = np.full((len(metrics), len(bins)), np.nan)
    for (bin_label, metric), row in table.rows.items():
        grid[metrics.index(metric), bins.index(bin_label)] = getattr(row, field)
    return grid


def _heatmap(
    table: BiasTable, field: str, title: str, cmap: str, signed: bool, out_path: Path
) -> Path:
    bins, metrics = _axes_order(table)
    grid = _matrix(table, bins, metrics, field)
    finite = grid[np.isfinite(grid)]
    span = float(np.max(np.abs(finite))) if finite.size else 0.0
    span = max(span, 1e-9)
    if signed:
        vmin, vmax = -span, span
    else:
        vmin, vmax = 0.0, span
    # base width leaves room for long metric labels even with a single bin
    fig, ax = plt.subplots(
        figsize=(3.2 + 1.3 * len(bins), 1.4 + 0.42 * len(metrics)), constrained_layout=True
    )
    image = ax.imshow(grid, cmap=cmap, vmin=vmin, vmax=vmax, aspect="auto")
    ax.set_xticks(range(len(bins)), labels=bins, rotation=30, ha="right")
    ax.set_yticks(range(len(metrics)), labels=metrics)
    ax.tick_params(axis="y", labelsize=8)
    ax.set_xlabel("F1 bin")
    ax.set_title(title)
    threshold = 0.6 * span
    for i in range(len(metrics)):
        for j in range(len(bins)):
            value = grid[i, j]
            if not np.isfinite(value):
                continue
            dark = abs(value) > threshold if signed else value > threshold
            ax.text(
                j,
                i,
                f"{value:+.3f}" if signed else f"{value:.3f}",
                ha="center",
                va="center",
                fontsize=7,
                color="white" if dark else "black",
            )
    fig.colorbar(image, ax=ax, shrink=0.85)
    fig.savefig(out_path, dpi=_DPI)
    plt.close(fig)
    return out_path


def _bias_scatter(records: Sequence[BiasRecord], out_path: Path) -> Path:
    usable = [r for r in records if r.rel_bias is not None]
    metrics = sorted({r.metric for r in usable})
    ncols = min(3, max(1, len(metrics)))
    nrows = (len(metrics) + ncols - 1) // ncols
    fig, axes = plt.subplots(
        nrows,
        ncols,
        figsize=(3.4 * ncols, 2.6 * nrows),
        squeeze=False,
        constrained_layout=True,
        sharex=True,
    )
    for idx, metric in enumerate(metrics):
        ax = axes[idx // ncols][idx % ncols]
        points = [(r.f1, r.rel_bias) for r in usable if r.metric == metric]
        xs, ys = zip(*points)
        ax.scatter(xs, ys, s=12, alpha=0.6, edgecolors="none")
        ax.axhline(0.0, color="black", linewidth=0.6)
        ax.set_title(metric, fontsize=8)
        ax.tick_params(labelsize=7)
    for idx in range(len(metrics), nrows * ncols):
        axes[idx // ncols][idx % ncols].set_visible(False)
    fig.supxlabel("run F1")
    fig.supylabel("relative bias")
    fig.savefig(out_path, dpi=_DPI)
    plt.close(fig)
    return out_path


def render_report_figures(
    table: BiasTable, records: Iterable[BiasRecord], out_dir: str | Path
) -> list[Path]:
    """Render the three report figures into ``out_dir``; returns written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = list(records)
    paths: list[Path] = []
    if table.rows:
        paths.append(
            _heatmap(
                table,
                "mean_rel_bias",
                "Mean relative bias by F1 bin",
                "BrBG",
                True,
                out_dir / "bias_heatmap.png",
            )
        )
        paths.append(
            _heatmap(
                table,
                "mean_rel_mae",
                "Mean relative MAE by F1 bin",
                "Greys",
                False,
                out_dir / "mae_heatmap.png",
            )
        )
    if any(r.rel_bias is not None for r in records):
        paths.append(_bias_scatter(records, out_dir / "bias_vs_f1.png"))
    return paths
