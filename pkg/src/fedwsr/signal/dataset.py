"""Dataset generation: (scheme, SNR) cells of labeled I/Q frames.

``generate_dataset`` is a pure function of its spec: every (scheme, snr)
cell derives an independent RNG stream from the spec seed via
``SeedSequence(seed, spawn_key=(scheme_idx, snr_idx))``, so regeneration is
bit-identical and cells could be produced in any order (or in parallel).

Each frame is modulated from fresh symbols/messages with generous padding,
channel-impaired, sliced out of the padded stream, normalized to unit
average power, and only then hit with AWGN — which makes the per-frame SNR
exact by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..errors import DataError
from .channel import ChannelConfig, add_awgn, apply_channel
from .frames import IQFrame, LabeledSample
from .modulate import RRC_SPAN_SYMBOLS, analog_message, modulate_analog, modulate_digital
from .schemes import ModScheme, alphabet_size


@dataclass(frozen=True)
class DatasetSpec:
    schemes: tuple[ModScheme, ...]
    snr_grid_db: tuple[float, ...]
    frames_per_scheme_per_snr: int
    frame_len: int = 128
    channel: ChannelConfig = ChannelConfig()
    seed: int = 0

    def __post_init__(self):
        if not self.schemes:
            raise ValueError("schemes must be nonempty")
        if len(set(self.schemes)) != len(self.schemes):
            raise ValueError("schemes must be distinct")
        if not self.snr_grid_db:
            raise ValueError("snr_grid_db must be nonempty")
        if self.frames_per_scheme_per_snr < 1:
            raise ValueError("frames_per_scheme_per_snr must be >= 1")
        if self.frame_len < 8:
            raise ValueError(f"frame_len must be >= 8, got {self.frame_len}")

    @property
    def total_samples(self) -> int:
        return len(self.schemes) * len(self.snr_grid_db) * self.frames_per_scheme_per_snr


class Dataset:
    """Array-backed sequence of LabeledSamples.

    Arrays are float32 (the training and file precision): ``x`` and
    ``s_star`` have shape (n, 2, L) with the in-phase row first.
    """

    def __init__(
        self,
        x: np.ndarray,
        s_star: np.ndarray,
        labels: np.ndarray,
        snr_db: np.ndarray,
        scheme_names: tuple[str, ...],
    ):
        n = x.shape[0]
        if x.shape != s_star.shape or x.ndim != 3 or x.shape[1] != 2:
            raise DataError(f"x/s_star must be (n, 2, L) arrays, got {x.shape} and {s_star.shape}")
        if labels.shape != (n,) or snr_db.shape != (n,):
            raise DataError("labels and snr_db must be length-n vectors")
        if n and (labels.min() < 0 or labels.max() >= len(scheme_names)):
            raise DataError("labels must index scheme_names")
        if not (np.isfinite(x).all() and np.isfinite(s_star).all()):
            raise DataError("dataset contains non-finite values")
        self.x = x
        self.s_star = s_star
        self.labels = labels
        self.snr_db = snr_db
        self.scheme_names = tuple(scheme_names)

    @property
    def num_classes(self) -> int:
        return len(self.scheme_names)

    @property
    def frame_len(self) -> int:
        return self.x.shape[2]

    def __len__(self) -> int:
        return self.x.shape[0]

    def __getitem__(self, idx: int) -> LabeledSample:
        if not isinstance(idx, (int, np.integer)):
            raise TypeError("Dataset indices must be integers")
        return LabeledSample(
            x=IQFrame(self.x[idx, 0].astype(np.float64), self.x[idx, 1].astype(np.float64)),
            s_star=IQFrame(
                self.s_star[idx, 0].astype(np.float64), self.s_star[idx, 1].astype(np.float64)
            ),
            label=int(self.labels[idx]),
            snr_db=float(self.snr_db[idx]),
        )

    def subset(self, indices: np.ndarray) -> "Dataset":
        indices = np.asarray(indices)
        return Dataset(
            self.x[indices],
            self.s_star[indices],
            self.labels[indices],
            self.snr_db[indices],
            self.scheme_names,
        )


def _frame_channel_cfg(cfg: ChannelConfig, rng: np.random.Generator) -> ChannelConfig:
    """Draw this frame's offset realization; cfg values act as ranges."""
    if cfg.impairment_level == "awgn_only":
        return cfg
    return replace(
        cfg,
        f_err=rng.uniform(-cfg.f_err, cfg.f_err),
        theta_err=rng.uniform(-cfg.theta_err, cfg.theta_err),
        zeta_err=rng.uniform(0.0, cfg.zeta_err),
    )


def _one_frame(
    scheme: ModScheme, snr_db: float, spec: DatasetSpec, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Generate one (x, s_star) complex frame pair of length spec.frame_len."""
    cfg = spec.channel
    sps = cfg.samples_per_symbol
    pad = RRC_SPAN_SYMBOLS * sps  # swallow filter/channel edge transients
    needed = spec.frame_len + 2 * pad
    if scheme.is_analog:
        stream = modulate_analog(analog_message(rng, needed), scheme, cfg)
    else:
        n_sym = -(-needed // sps)
        symbols = rng.integers(0, alphabet_size(scheme), n_sym)
        stream = modulate_digital(symbols, scheme, cfg)
    impaired = apply_channel(stream, _frame_channel_cfg(cfg, rng), rng)
    s_star = impaired[pad : pad + spec.frame_len]
    power = np.mean(np.abs(s_star) ** 2)
    if power <= 0.0:
        raise DataError(f"zero-power frame generated for {scheme.name}")
    s_star = s_star / np.sqrt(power)
    x = add_awgn(s_star, snr_db, rng)
    return x, s_star


def generate_dataset(spec: DatasetSpec) -> Dataset:
    """Materialize the full dataset described by spec (deterministic)."""
    n = spec.total_samples
    frame_len = spec.frame_len
    x_all = np.empty((n, 2, frame_len), dtype=np.float32)
    s_all = np.empty((n, 2, frame_len), dtype=np.float32)
    labels = np.empty(n, dtype=np.int64)
    snrs = np.empty(n, dtype=np.float32)
    row = 0
    for scheme_idx, scheme in enumerate(spec.schemes):
        for snr_idx, snr_db in enumerate(spec.snr_grid_db):
            rng = np.random.default_rng(
                np.random.SeedSequence(spec.seed, spawn_key=(scheme_idx, snr_idx))
            )
            for _ in range(spec.frames_per_scheme_per_snr):
                x, s_star = _one_frame(scheme, snr_db, spec, rng)
                x_all[row, 0] = x.real
                x_all[row, 1] = x.imag
                s_all[row, 0] = s_star.real
                s_all[row, 1] = s_star.imag
                labels[row] = scheme_idx
                snrs[row] = snr_db
                row += 1
    return Dataset(x_all, s_all, labels, snrs, tuple(s.value for s in spec.schemes))
