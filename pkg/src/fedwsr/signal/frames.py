"""I/Q frames and labeled samples: the dataset record types."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class IQFrame:
    """A 2xL real view of L complex baseband samples."""

    i_row: np.ndarray
    q_row: np.ndarray

    def __post_init__(self):
        if self.i_row.ndim != 1 or self.i_row.shape != self.q_row.shape:
            raise ValueError(
                f"i/q rows must be equal-length 1-D vectors, got {self.i_row.shape} and {self.q_row.shape}"
            )
        if not (np.isfinite(self.i_row).all() and np.isfinite(self.q_row).all()):
            raise ValueError("IQFrame entries must be finite")

    @property
    def length(self) -> int:
        return self.i_row.size

    @classmethod
    def from_complex(cls, x: np.ndarray) -> "IQFrame":
        x = np.asarray(x)
        return cls(np.real(x).astype(np.float64), np.imag(x).astype(np.float64))

    def to_complex(self) -> np.ndarray:
        return self.i_row + 1j * self.q_row

    def as_array(self) -> np.ndarray:
        """(2, L) array: row 0 in-phase, row 1 quadrature."""
        return np.stack([self.i_row, self.q_row])


@dataclass(frozen=True)
class LabeledSample:
    """Noisy frame x, its noise-free counterpart s*, class label, SNR."""

    x: IQFrame
    s_star: IQFrame
    label: int
    snr_db: float

    def __post_init__(self):
        if self.x.length != self.s_star.length:
            raise ValueError("x and s_star must have the same frame length")
        if self.label < 0:
            raise ValueError(f"label must be nonnegative, got {self.label}")


def to_iq_frames(x: np.ndarray, frame_len: int) -> list[IQFrame]:
    """Slice a complex vector into non-overlapping frames; drop the tail."""
    x = np.asarray(x)
    if frame_len < 1:
        raise ValueError(f"frame_len must be >= 1, got {frame_len}")
    if x.ndim != 1 or x.size < frame_len:
        raise ValueError(f"need a 1-D vector of length >= {frame_len}, got shape {x.shape}")
    count = x.size // frame_len
    return [
        IQFrame.from_complex(x[k * frame_len : (k + 1) * frame_len]) for k in range(count)
    ]
