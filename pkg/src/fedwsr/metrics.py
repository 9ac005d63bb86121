"""Classification and enhancement metrics over labeled I/Q datasets.

All metrics are deterministic given model and dataset.  Accuracy tables
carry one row per (snr_db, class) plus ALL aggregates, and the ALL/ALL row
equals whole-set accuracy exactly (it is computed from the same
predictions, not re-estimated).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .signal import Dataset
from .train import predict_in_batches

GAIN_CAP_DB = 99.0  # reported in place of an infinite enhancement gain


def confusion(pred: np.ndarray, true: np.ndarray, num_classes: int) -> np.ndarray:
    """(M, M) count matrix: rows are true classes, columns predictions."""
    pred = np.asarray(pred)
    true = np.asarray(true)
    if pred.shape != true.shape or pred.ndim != 1:
        raise ValueError(f"pred/true must be equal-length vectors, got {pred.shape}, {true.shape}")
    for name, arr in (("pred", pred), ("true", true)):
        if arr.size and (arr.min() < 0 or arr.max() >= num_classes):
            raise ValueError(f"{name} labels out of range [0, {num_classes})")
    counts = np.zeros((num_classes, num_classes), dtype=np.int64)
    np.add.at(counts, (true, pred), 1)
    return counts


@dataclass(frozen=True)
class MetricsRow:
    snr_db: float | None  # None means ALL SNRs
    class_name: str | None  # None means ALL classes
    accuracy: float
    count: int


@dataclass(frozen=True)
class MetricsTable:
    rows: tuple[MetricsRow, ...]

    def overall(self) -> MetricsRow:
        for row in self.rows:
            if row.snr_db is None and row.class_name is None:
                return row
        raise ValueError("table has no ALL/ALL row")

    def snr_rows(self) -> list[MetricsRow]:
        return [r for r in self.rows if r.snr_db is not None and r.class_name is None]


def accuracy_by_snr(task, dataset: Dataset) -> MetricsTable:
    """Accuracy per SNR bucket, per (SNR, class), and overall."""
    pred = predict_in_batches(task, dataset.x)
    correct = pred == dataset.labels
    rows = [MetricsRow(None, None, float(correct.mean()), len(dataset))]
    for snr in sorted(set(dataset.snr_db.tolist())):
        in_bucket = dataset.snr_db == snr
        rows.append(MetricsRow(snr, None, float(correct[in_bucket].mean()), int(in_bucket.sum())))
        for label, name in enumerate(dataset.scheme_names):
            sel = in_bucket & (dataset.labels == label)
            if sel.any():
                rows.append(MetricsRow(snr, name, float(correct[sel].mean()), int(sel.sum())))
    return MetricsTable(tuple(rows))


@dataclass(frozen=True)
class GainRow:
    snr_db: float
    mse_in: float
    mse_out: float
    gain_db: float


def _mse_rows(err: np.ndarray) -> float:
    return float(np.mean(err.astype(np.float64) ** 2))


def enhancement_gain(enhance_fn, dataset: Dataset, batch_size: int = 512) -> list[GainRow]:
    """Per-SNR input/output MSE against s* and the dB gain (capped).

    ``enhance_fn`` maps a (n, 2, L) batch of noisy frames to enhanced
    frames (eval mode is the caller's responsibility via the model API; the
    function is called in batches).
    """
    s_hat = np.concatenate(
        [enhance_fn(dataset.x[lo : lo + batch_size]) for lo in range(0, len(dataset), batch_size)]
    )
    rows = []
    for snr in sorted(set(dataset.snr_db.tolist())):
        sel = dataset.snr_db == snr
        mse_in = _mse_rows(dataset.x[sel] - dataset.s_star[sel])
        mse_out = _mse_rows(s_hat[sel] - dataset.s_star[sel])
        if mse_out == 0.0:
            gain = GAIN_CAP_DB
        else:
            gain = min(10.0 * np.log10(mse_in / mse_out), GAIN_CAP_DB)
        rows.append(GainRow(float(snr), mse_in, mse_out, float(gain)))
    return rows
