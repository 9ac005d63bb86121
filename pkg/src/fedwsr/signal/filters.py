"""Pulse-shaping and smoothing filters used by the modulators.

All taps are returned as float64 vectors.  Time is measured in symbol
periods for ``rrc_taps``/``gaussian_taps`` (``sps`` samples per symbol) and
in samples for ``lowpass_taps``.
"""

from __future__ import annotations

import numpy as np


def rrc_taps(rolloff: float, span_symbols: int, sps: int) -> np.ndarray:
    """Root-raised-cosine taps: span_symbols*sps + 1 of them, unit energy.

    The self-convolution of an RRC filter is a raised cosine, which is
    Nyquist: zero inter-symbol interference at symbol-spaced instants.
    """
    if not 0.0 < rolloff < 1.0:
        raise ValueError(f"rolloff must be in (0, 1), got {rolloff}")
    if span_symbols < 4 or span_symbols % 2:
        raise ValueError(f"span_symbols must be even and >= 4, got {span_symbols}")
    if sps < 1:
        raise ValueError(f"sps must be >= 1, got {sps}")
    n = span_symbols * sps + 1
    t = (np.arange(n) - (n - 1) / 2) / sps  # in symbol periods
    beta = rolloff
    taps = np.empty(n)
    for k, tk in enumerate(t):
        if abs(tk) < 1e-12:
            taps[k] = 1.0 - beta + 4.0 * beta / np.pi
        elif abs(abs(tk) - 1.0 / (4.0 * beta)) < 1e-12:
            taps[k] = (beta / np.sqrt(2.0)) * (
                (1.0 + 2.0 / np.pi) * np.sin(np.pi / (4.0 * beta))
                + (1.0 - 2.0 / np.pi) * np.cos(np.pi / (4.0 * beta))
            )
        else:
            num = np.sin(np.pi * tk * (1.0 - beta)) + 4.0 * beta * tk * np.cos(
                np.pi * tk * (1.0 + beta)
            )
            den = np.pi * tk * (1.0 - (4.0 * beta * tk) ** 2)
            taps[k] = num / den
    return taps / np.sqrt(np.sum(taps**2))


def gaussian_taps(bt: float, span_symbols: int, sps: int) -> np.ndarray:
    """Gaussian smoothing taps (unit DC gain) for GFSK frequency pulses.

    ``bt`` is the 3-dB-bandwidth/symbol-time product; smaller values smear
    the NRZ frequency pulse over more symbols.
    """
    if bt <= 0.0:
        raise ValueError(f"bt must be positive, got {bt}")
    if span_symbols < 1 or sps < 1:
        raise ValueError("span_symbols and sps must be >= 1")
    n = span_symbols * sps + 1
    t = (np.arange(n) - (n - 1) / 2) / sps
    alpha = np.sqrt(2.0 * np.pi**2 / np.log(2.0)) * bt
    taps = np.exp(-(alpha**2) * t**2)
    return taps / taps.sum()


def lowpass_taps(cutoff: float, num_taps: int = 65) -> np.ndarray:
    """Hamming-windowed sinc lowpass, unit DC gain.

    ``cutoff`` is the passband edge as a fraction of the sample rate
    (0 < cutoff < 0.5); used to shape the analog message spectrum.
    """
    if not 0.0 < cutoff < 0.5:
        raise ValueError(f"cutoff must be in (0, 0.5), got {cutoff}")
    if num_taps < 3 or num_taps % 2 == 0:
        raise ValueError(f"num_taps must be odd and >= 3, got {num_taps}")
    m = np.arange(num_taps) - (num_taps - 1) / 2
    taps = 2.0 * cutoff * np.sinc(2.0 * cutoff * m) * np.hamming(num_taps)
    return taps / taps.sum()
