"""Channel impairments and noise injection.

``apply_channel`` realizes the noise-free part of the received-signal
model: multipath fading taps, a fractional-sample timing error, and a
carrier frequency/phase offset, gated by ``impairment_level``:

    awgn_only   — exact identity (a copy of the input)
    offsets     — timing + frequency/phase offsets, no fading
    full_fading — random multipath taps, then offsets

Both impairing levels renormalize to unit average power so the SNR set by
``add_awgn`` stays exact by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

IMPAIRMENT_LEVELS = ("awgn_only", "offsets", "full_fading")

# Multipath profile: tap magnitudes (dB) at fractional-sample delays.
DEFAULT_TAP_MAGS_DB = (-1.0, -1.0, -1.0, 0.0, 0.0, -3.0, -5.0, -7.0)
DEFAULT_TAP_DELAYS = (0.0, 0.05, 0.12, 0.2, 0.23, 0.5, 1.6, 2.3)


@dataclass(frozen=True)
class ChannelConfig:
    samples_per_symbol: int = 2
    rolloff: float = 0.35
    fading_tap_mags_db: tuple[float, ...] = DEFAULT_TAP_MAGS_DB
    fading_tap_delays: tuple[float, ...] = DEFAULT_TAP_DELAYS
    f_err: float = 0.0  # carrier frequency offset, cycles/sample
    theta_err: float = 0.0  # carrier phase offset, radians
    zeta_err: float = 0.0  # timing error, fractional samples (>= 0)
    cpfsk_index: float = 0.5
    gfsk_bt: float = 0.3
    impairment_level: str = "awgn_only"
    sample_rate_hz: float | None = None  # documentation only; unused numerically

    def __post_init__(self):
        if self.samples_per_symbol < 1:
            raise ValueError(f"samples_per_symbol must be >= 1, got {self.samples_per_symbol}")
        if not 0.0 < self.rolloff < 1.0:
            raise ValueError(f"rolloff must be in (0, 1), got {self.rolloff}")
        if len(self.fading_tap_mags_db) != len(self.fading_tap_delays):
            raise ValueError("fading tap magnitude and delay lists must have equal length")
        if self.impairment_level not in IMPAIRMENT_LEVELS:
            raise ValueError(
                f"impairment_level must be one of {IMPAIRMENT_LEVELS}, got {self.impairment_level!r}"
            )
        if self.zeta_err < 0.0:
            raise ValueError(f"zeta_err must be >= 0, got {self.zeta_err}")


def _fractional_delay(x: np.ndarray, delay: float) -> np.ndarray:
    """Delay x by a (possibly fractional) number of samples, linear interp."""
    if delay == 0.0:
        return x
    whole = int(np.floor(delay))
    frac = delay - whole
    shifted = np.zeros_like(x)
    if whole < x.size:
        shifted[whole:] = x[: x.size - whole]
    if frac > 0.0:
        lagged = np.zeros_like(shifted)
        lagged[1:] = shifted[:-1]
        shifted = (1.0 - frac) * shifted + frac * lagged
    return shifted


def _fading_fir(cfg: ChannelConfig, rng: np.random.Generator) -> np.ndarray:
    """Random multipath FIR: complex Gaussian taps at fractional delays."""
    max_delay = max(cfg.fading_tap_delays)
    fir = np.zeros(int(np.floor(max_delay)) + 2, dtype=np.complex128)
    for mag_db, delay in zip(cfg.fading_tap_mags_db, cfg.fading_tap_delays):
        scale = 10.0 ** (mag_db / 20.0)
        weight = scale * (rng.standard_normal() + 1j * rng.standard_normal()) / np.sqrt(2.0)
        base = int(np.floor(delay))
        frac = delay - base
        fir[base] += weight * (1.0 - frac)
        if frac > 0.0:
            fir[base + 1] += weight * frac
    return fir


def apply_channel(clean: np.ndarray, cfg: ChannelConfig, rng: np.random.Generator) -> np.ndarray:
    """Impair a complex baseband stream per cfg; adds no noise."""
    clean = np.asarray(clean, dtype=np.complex128)
    if clean.ndim != 1 or clean.size == 0:
        raise ValueError("input must be a nonempty 1-D complex vector")
    if cfg.impairment_level == "awgn_only":
        return clean.copy()

    out = clean
    if cfg.impairment_level == "full_fading":
        fir = _fading_fir(cfg, rng)
        out = np.convolve(out, fir)[: clean.size]
    out = _fractional_delay(out, cfg.zeta_err)
    n = np.arange(out.size)
    out = out * np.exp(1j * (2.0 * np.pi * cfg.f_err * n + cfg.theta_err))
    power = np.mean(np.abs(out) ** 2)
    if power <= 0.0:
        raise ValueError("channel output has zero power; cannot renormalize")
    return out / np.sqrt(power)


def add_awgn(s_star: np.ndarray, snr_db: float, rng: np.random.Generator) -> np.ndarray:
    """Add circularly-symmetric complex AWGN at the given SNR.

    Assumes the input has unit average power, so the per-sample noise
    variance is exactly 10^(-snr_db/10).  ``snr_db=inf`` adds nothing.
    """
    s_star = np.asarray(s_star, dtype=np.complex128)
    if np.isinf(snr_db) and snr_db > 0:
        return s_star.copy()
    sigma2 = 10.0 ** (-snr_db / 10.0)
    scale = np.sqrt(sigma2 / 2.0)
    noise = scale * (rng.standard_normal(s_star.size) + 1j * rng.standard_normal(s_star.size))
    return s_star + noise
