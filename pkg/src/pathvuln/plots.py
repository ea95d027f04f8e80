"""Figure rendering for the CLI report paths.

All figures go straight to files via the Agg backend; nothing here ever
opens a window. Figures are a human-facing sidecar — the delimited
outputs next to them are the machine-readable record, and only those are
covered by the byte-reproducibility guarantee.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .evaluation import Metrics  # noqa: E402
from .vocab import TAGS  # noqa: E402


def save_label_distribution(split_counts: dict[str, tuple[int, int]], path) -> None:
    """Grouped bars of (vuln, safe) counts per split.

    split_counts maps split name to a (vuln_count, safe_count) pair.
    """
    names = list(split_counts)
    vuln = [split_counts[n][0] for n in names]
    safe = [split_counts[n][1] for n in names]
    x = range(len(names))
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar([i - 0.2 for i in x], safe, width=0.4, label="safe", color="#4c72b0")
    ax.bar([i + 0.2 for i in x], vuln, width=0.4, label="vuln", color="#c44e52")
    ax.set_xticks(list(x))
    ax.set_xticklabels(names)
    ax.set_ylabel("functions")
    ax.set_title("Label distribution by split")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_training_curves(history: list[dict], path) -> None:
    """Training loss and validation F1 across epochs on twin axes."""
    epochs = [h["epoch"] for h in history]
    loss = [h["train_loss"] for h in history]
    f1 = [h["valid_f1"] for h in history]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(epochs, loss, marker="o", color="#4c72b0", label="train loss")
    ax.set_xlabel("epoch")
    ax.set_ylabel("train loss", color="#4c72b0")
    twin = ax.twinx()
    twin.plot(epochs, f1, marker="s", color="#55a868", label="valid F1")
    twin.set_ylabel("validation F1", color="#55a868")
    twin.set_ylim(0.0, 1.05)
    ax.set_title("Training progress")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_confusion_matrix(metrics: Metrics, path) -> None:
    """2x2 confusion matrix heat map with counts; rows are true labels."""
    grid = [[metrics.tn, metrics.fp], [metrics.fn, metrics.tp]]
    fig, ax = plt.subplots(figsize=(4.5, 4))
    image = ax.imshow(grid, cmap="Blues")
    for row in range(2):
        for col in range(2):
            peak = max(max(r) for r in grid) or 1
            color = "white" if grid[row][col] > peak / 2 else "black"
            ax.text(col, row, str(grid[row][col]), ha="center", va="center", color=color)
    ax.set_xticks([0, 1])
    ax.set_yticks([0, 1])
    ax.set_xticklabels([f"pred {t}" for t in TAGS])
    ax.set_yticklabels([f"true {t}" for t in TAGS])
    ax.set_title("Confusion matrix")
    fig.colorbar(image, ax=ax, shrink=0.8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
