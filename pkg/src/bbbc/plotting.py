"""Figure rendering for experiment output directories.

Figures are written next to the delimited output: a convergence plot built
from the trace files, and for cluster runs a scatter of the best model's
assignments over the first two features. Rendering always targets files (Agg
backend), never a display.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .datasets import Dataset

__all__ = ["render_report", "plot_convergence", "plot_best_model"]

FIG_SIZE = (6.4, 4.0)
DPI = 150

# one fixed color per algorithm so figures from different runs line up
_COLORS = {
    "bbbc": "tab:blue",
    "mebbbc": "tab:red",
    "kmebb": "tab:green",
    "kmeans": "tab:orange",
}


def _read_traces(out_dir: Path) -> dict[str, list[np.ndarray]]:
    """best_so_far columns of every trace file, grouped by algorithm."""
    grouped: dict[str, list[np.ndarray]] = {}
    for path in sorted(out_dir.glob("trace_*.csv")):
        parts = path.stem.split("_")
        algorithm = "_".join(parts[1:-1])
        with open(path, newline="", encoding="utf-8") as fh:
            best = [float(row["best_so_far"]) for row in csv.DictReader(fh)]
        if best:
            grouped.setdefault(algorithm, []).append(np.asarray(best))
    return grouped


def plot_convergence(out_dir: Path, target: str) -> Optional[Path]:
    """Mean best-so-far curve per algorithm, individual runs drawn faintly.

    Returns the figure path, or None when the directory has no traces.
    """
    out_dir = Path(out_dir)
    traces = _read_traces(out_dir)
    if not traces:
        return None

    fig, ax = plt.subplots(figsize=FIG_SIZE)
    positive = True
    for algorithm in sorted(traces):
        runs = traces[algorithm]
        color = _COLORS.get(algorithm, "tab:gray")
        for run in runs:
            ax.plot(np.arange(1, run.size + 1), run, color=color, alpha=0.15, lw=0.7)
        longest = max(r.size for r in runs)
        # pad shorter (early-stopped) runs with their final value before averaging
        padded = np.vstack(
            [np.pad(r, (0, longest - r.size), mode="edge") for r in runs]
        )
        mean = padded.mean(axis=0)
        ax.plot(
            np.arange(1, longest + 1),
            mean,
            color=color,
            lw=1.8,
            label=f"{algorithm} (mean of {len(runs)})",
        )
        positive = positive and bool((padded > 0).all())
    if positive:
        ax.set_yscale("log")
    ax.set_xlabel("iteration")
    ax.set_ylabel("best cost so far")
    ax.set_title(target)
    ax.legend(frameon=False, fontsize=8)
    ax.spines["top"].set_visible(False)
    ax.spines["right"].set_visible(False)
    fig.tight_layout()
    path = out_dir / f"fig_convergence_{target}.png"
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path


def _read_best_model(out_dir: Path) -> dict[str, dict]:
    path = out_dir / "best_model.csv"
    if not path.exists():
        return {}
    models: dict[str, dict] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return {}
        d = len(header) - 3
        for row in reader:
            algorithm, kind, index = row[0], row[1], int(row[2])
            slot = models.setdefault(algorithm, {"centers": {}, "assignments": {}})
            if kind == "center":
                slot["centers"][index] = [float(v) for v in row[3 : 3 + d]]
            else:
                slot["assignments"][index] = int(float(row[3]))
    return models


def plot_best_model(
    out_dir: Path, target: str, dataset: Dataset
) -> list[Path]:
    """Scatter each algorithm's best clustering over the first two features."""
    out_dir = Path(out_dir)
    models = _read_best_model(out_dir)
    written: list[Path] = []
    if not models or dataset.d < 2:
        return written
    points = dataset.points[:, :2]
    for algorithm in sorted(models):
        model = models[algorithm]
        labels = np.array(
            [model["assignments"][i] for i in range(len(model["assignments"]))]
        )
        centers = np.array(
            [model["centers"][c] for c in sorted(model["centers"])]
        )[:, :2]
        fig, ax = plt.subplots(figsize=FIG_SIZE)
        ax.scatter(
            points[:, 0], points[:, 1], c=labels, cmap="viridis", s=14, alpha=0.7
        )
        ax.scatter(
            centers[:, 0], centers[:, 1], marker="x", c="black", s=70, lw=1.8,
            label="centers",
        )
        ax.set_xlabel("feature 0")
        ax.set_ylabel("feature 1")
        ax.set_title(f"{target}: best {algorithm} model")
        ax.legend(frameon=False, fontsize=8)
        fig.tight_layout()
        path = out_dir / f"fig_clusters_{target}_{algorithm}.png"
        fig.savefig(path, dpi=DPI)
        plt.close(fig)
        written.append(path)
    return written


def render_report(
    out_dir: Path,
    target: str,
    dataset: Optional[Dataset] = None,
    k: Optional[int] = None,
) -> list[Path]:
    """Render every figure the directory's contents support."""
    out_dir = Path(out_dir)
    written: list[Path] = []
    convergence = plot_convergence(out_dir, target)
    if convergence is not None:
        written.append(convergence)
    if dataset is not None:
        written.extend(plot_best_model(out_dir, target, dataset))
    return written
