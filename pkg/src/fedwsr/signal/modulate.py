"""Symbol/message streams to unit-power complex baseband.

Linear digital schemes are zero-stuff upsampled and RRC pulse shaped;
GFSK/CPFSK integrate a (possibly Gaussian-smoothed) NRZ frequency pulse
into a continuous phase.  Analog schemes map a real message straight to
baseband: AM-DSB as an envelope, WBFM as an integrated phase.  Every
modulator output is normalized to unit average power.
"""

from __future__ import annotations

import numpy as np

from .channel import ChannelConfig
from .filters import gaussian_taps, lowpass_taps, rrc_taps
from .schemes import ModScheme, alphabet_size, constellation

RRC_SPAN_SYMBOLS = 8
GFSK_SPAN_SYMBOLS = 4
AM_DEPTH = 0.5  # k_a: AM-DSB modulation depth
FM_DEVIATION = 0.15  # k_f: WBFM peak frequency deviation, cycles/sample per unit message
ANALOG_CUTOFF = 0.15  # message bandwidth as a fraction of the sample rate


def _normalize_power(x: np.ndarray) -> np.ndarray:
    power = np.mean(np.abs(x) ** 2)
    if power <= 0.0:
        raise ValueError("cannot normalize an all-zero baseband stream")
    return x / np.sqrt(power)


def _nrz(symbols: np.ndarray) -> np.ndarray:
    """Binary symbols {0,1} to NRZ levels {+1,-1}."""
    return 1.0 - 2.0 * symbols.astype(np.float64)


def modulate_digital(symbols: np.ndarray, scheme: ModScheme, cfg: ChannelConfig) -> np.ndarray:
    """Digital symbol indices -> complex baseband at cfg.samples_per_symbol."""
    if scheme.is_analog:
        raise ValueError(f"{scheme.name} is analog; use modulate_analog")
    symbols = np.asarray(symbols)
    if symbols.ndim != 1 or symbols.size == 0:
        raise ValueError("symbols must be a nonempty 1-D integer vector")
    size = alphabet_size(scheme)
    if symbols.min() < 0 or symbols.max() >= size:
        raise ValueError(f"symbol index out of range for {scheme.name} (alphabet {size})")
    sps = cfg.samples_per_symbol

    if scheme.is_linear:
        points = constellation(scheme)[symbols]
        upsampled = np.zeros(symbols.size * sps, dtype=np.complex128)
        upsampled[::sps] = points
        taps = rrc_taps(cfg.rolloff, RRC_SPAN_SYMBOLS, sps)
        shaped = np.convolve(upsampled, taps, mode="same")
        return _normalize_power(shaped)

    # GFSK / CPFSK: continuous phase, per-sample advance pi*h*f[n]/sps
    nrz = np.repeat(_nrz(symbols), sps)
    if scheme is ModScheme.GFSK:
        nrz = np.convolve(nrz, gaussian_taps(cfg.gfsk_bt, GFSK_SPAN_SYMBOLS, sps), mode="same")
    phase = np.cumsum(np.pi * cfg.cpfsk_index * nrz / sps)
    return _normalize_power(np.exp(1j * phase))


def modulate_analog(message: np.ndarray, scheme: ModScheme, cfg: ChannelConfig) -> np.ndarray:
    """Real message (one value per output sample) -> complex baseband."""
    if not scheme.is_analog:
        raise ValueError(f"{scheme.name} is digital; use modulate_digital")
    message = np.asarray(message, dtype=np.float64)
    if message.ndim != 1 or message.size == 0:
        raise ValueError("message must be a nonempty 1-D real vector")
    if not np.isfinite(message).all():
        raise ValueError("message must be finite")
    if scheme is ModScheme.AMDSB:
        envelope = 1.0 + AM_DEPTH * message
        return _normalize_power(envelope.astype(np.complex128))
    phase = 2.0 * np.pi * FM_DEVIATION * np.cumsum(message)
    return _normalize_power(np.exp(1j * phase))


def analog_message(rng: np.random.Generator, num_samples: int) -> np.ndarray:
    """Speech-like stand-in: white Gaussian noise lowpassed to ANALOG_CUTOFF.

    Normalized to unit standard deviation so the AM depth and FM deviation
    constants act on a consistent scale.
    """
    raw = rng.standard_normal(num_samples + 64)
    smooth = np.convolve(raw, lowpass_taps(ANALOG_CUTOFF), mode="same")[32 : 32 + num_samples]
    std = smooth.std()
    return smooth / std if std > 0 else smooth
