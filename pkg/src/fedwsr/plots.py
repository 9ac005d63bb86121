"""Matplotlib renderings of the CSV report surfaces (Agg backend, PNG).

Figures are a convenience companion to the CSVs — the CSVs remain the
authoritative data surface.  PNG metadata is stripped so identical runs
produce identical bytes.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SAVE_KW = {"dpi": 120, "metadata": {"Software": None}}


def _finish(fig, path: str | Path) -> None:
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def plot_accuracy_vs_snr(table, path: str | Path) -> None:
    """Accuracy-vs-SNR curves: bold overall line plus one line per class."""
    fig, ax = plt.subplots(figsize=(6, 4))
    snr_rows = table.snr_rows()
    snrs = [r.snr_db for r in snr_rows]
    ax.plot(snrs, [r.accuracy for r in snr_rows], "k-o", linewidth=2, label="all classes")
    per_class: dict[str, list] = {}
    for row in table.rows:
        if row.snr_db is not None and row.class_name is not None:
            per_class.setdefault(row.class_name, []).append((row.snr_db, row.accuracy))
    for name, pts in sorted(per_class.items()):
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts], "--", marker=".", label=name)
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("accuracy")
    ax.set_ylim(0.0, 1.0)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    _finish(fig, path)


def plot_confusion(counts: np.ndarray, class_names, path: str | Path, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(5, 4.5))
    row_sums = counts.sum(axis=1, keepdims=True)
    frac = np.divide(counts, np.maximum(row_sums, 1), dtype=np.float64)
    im = ax.imshow(frac, cmap="Blues", vmin=0.0, vmax=1.0)
    ax.set_xticks(range(len(class_names)), class_names, rotation=45, ha="right", fontsize=8)
    ax.set_yticks(range(len(class_names)), class_names, fontsize=8)
    for i in range(counts.shape[0]):
        for j in range(counts.shape[1]):
            if counts[i, j]:
                ax.text(j, i, str(counts[i, j]), ha="center", va="center",
                        fontsize=7, color="white" if frac[i, j] > 0.5 else "black")
    ax.set_xlabel("predicted")
    ax.set_ylabel("true")
    if title:
        ax.set_title(title, fontsize=10)
    fig.colorbar(im, ax=ax, fraction=0.046)
    _finish(fig, path)


def plot_training_curves(rows, path: str | Path) -> None:
    """Per-epoch loss (left axis) and accuracies (right axis)."""
    fig, ax = plt.subplots(figsize=(6, 4))
    epochs = [r.epoch for r in rows]
    ax.plot(epochs, [r.train_loss for r in rows], "C0-", label="train loss")
    ax.set_xlabel("epoch")
    ax.set_ylabel("loss", color="C0")
    ax2 = ax.twinx()
    ax2.plot(epochs, [r.train_accuracy for r in rows], "C1--", label="train accuracy")
    ax2.plot(epochs, [r.test_accuracy for r in rows], "C2-", label="test accuracy")
    ax2.set_ylabel("accuracy")
    ax2.set_ylim(0.0, 1.0)
    lines = ax.get_lines() + ax2.get_lines()
    ax.legend(lines, [ln.get_label() for ln in lines], fontsize=8, loc="center right")
    ax.grid(True, alpha=0.3)
    _finish(fig, path)


def plot_round_curves(records, path: str | Path) -> None:
    """Global and mean-client accuracy per federated round."""
    fig, ax = plt.subplots(figsize=(6, 4))
    rounds = [r.round for r in records]
    ax.plot(rounds, [r.global_performance for r in records], "C0-", label="global accuracy")
    ax.plot(rounds, [r.mean_performance for r in records], "C1--", label="mean client accuracy")
    ax.set_xlabel("round")
    ax.set_ylabel("accuracy")
    ax.set_ylim(0.0, 1.0)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    _finish(fig, path)


def plot_enhancement(rows, path: str | Path) -> None:
    """Input vs output MSE per SNR (log scale) with the dB gain annotated."""
    fig, ax = plt.subplots(figsize=(6, 4))
    snrs = [r.snr_db for r in rows]
    ax.semilogy(snrs, [r.mse_in for r in rows], "C3-o", label="MSE(x, s*)")
    ax.semilogy(snrs, [r.mse_out for r in rows], "C2-o", label="MSE(s_hat, s*)")
    for r in rows:
        ax.annotate(f"{r.gain_db:+.1f} dB", (r.snr_db, r.mse_out), fontsize=7,
                    textcoords="offset points", xytext=(0, -12))
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("MSE")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    _finish(fig, path)
