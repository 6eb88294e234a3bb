"""Render training/evaluation figures next to the CSV outputs.

The CSVs are the contract; the PNGs are a convenience view of the same
numbers (accuracy and loss per epoch for each order, accuracy per engine
for eval runs).
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .training import TrainReport


def render_training_curves(reports: dict[int, TrainReport], out_dir) -> list[Path]:
    """One figure for accuracy, one for loss, all orders overlaid."""
    out = Path(out_dir)
    written = []
    for metric, fname, ylabel in (
        ("accuracies", "accuracy.png", "top-1 accuracy"),
        ("losses", "loss.png", "mean cross-entropy"),
    ):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        for order in sorted(reports):
            values = getattr(reports[order], metric)
            if not values:
                continue
            ax.plot(range(1, len(values) + 1), values, label=f"{order}-gram")
        ax.set_xlabel("epoch")
        ax.set_ylabel(ylabel)
        ax.legend(loc="best")
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        path = out / fname
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written


def render_eval_bars(rows: list[dict], out_dir) -> Path:
    """Grouped bars of top-1 accuracy per order, one group color per engine.

    rows: dicts with keys engine, order, accuracy (the eval.csv rows).
    """
    out = Path(out_dir)
    engines = sorted({r["engine"] for r in rows})
    orders = sorted({r["order"] for r in rows})
    width = 0.8 / max(len(engines), 1)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for i, engine in enumerate(engines):
        accs = []
        for order in orders:
            match = [r for r in rows if r["engine"] == engine and r["order"] == order]
            accs.append(match[0]["accuracy"] if match else 0.0)
        xs = [o + (i - (len(engines) - 1) / 2) * width for o in orders]
        ax.bar(xs, accs, width=width, label=engine)
    ax.set_xticks(orders)
    ax.set_xlabel("n-gram order")
    ax.set_ylabel("top-1 accuracy")
    ax.set_ylim(0, 1.05)
    ax.legend(loc="best")
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    path = out / "eval_accuracy.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
