"""Modulation schemes and their symbol alphabets.

Linear digital schemes carry a unit-average-power constellation indexed by
symbol value; Gray coding places single-bit-different labels on adjacent
points (adjacent phases for PSK, adjacent levels per axis for PAM/QAM).
GFSK and CPFSK are binary but phase-continuous, so they have an alphabet
size (2) but no constellation table.  Analog schemes map a real message to
baseband instead of symbols.
"""

from __future__ import annotations

import enum

import numpy as np


class ModScheme(enum.Enum):
    BPSK = "BPSK"
    QPSK = "QPSK"
    PSK8 = "8PSK"
    PAM4 = "PAM4"
    QAM16 = "QAM16"
    QAM64 = "QAM64"
    GFSK = "GFSK"
    CPFSK = "CPFSK"
    WBFM = "WBFM"
    AMDSB = "AM-DSB"

    @property
    def is_analog(self) -> bool:
        return self in (ModScheme.WBFM, ModScheme.AMDSB)

    @property
    def is_digital(self) -> bool:
        return not self.is_analog

    @property
    def is_linear(self) -> bool:
        """True for constellation-based (RRC pulse-shaped) schemes."""
        return self in _CONSTELLATIONS

    @classmethod
    def from_name(cls, name: str) -> "ModScheme":
        for scheme in cls:
            if name in (scheme.name, scheme.value):
                return scheme
        raise ValueError(f"unknown modulation scheme {name!r}")


DIGITAL_SCHEMES = tuple(s for s in ModScheme if s.is_digital)
ANALOG_SCHEMES = (ModScheme.WBFM, ModScheme.AMDSB)


def _gray(k: int) -> int:
    return k ^ (k >> 1)


def _psk(order: int, offset: float) -> np.ndarray:
    """PSK points: angular position k carries the Gray label of k."""
    points = np.empty(order, dtype=np.complex128)
    for k in range(order):
        points[_gray(k)] = np.exp(1j * (offset + 2.0 * np.pi * k / order))
    return points


def _gray_levels(bits: int) -> np.ndarray:
    """Amplitude levels (ascending) indexed so adjacent levels differ by one bit."""
    order = 1 << bits
    levels = np.arange(-(order - 1), order, 2, dtype=np.float64)
    out = np.empty(order)
    for k in range(order):
        out[_gray(k)] = levels[k]
    return out


def _qam(bits_per_axis: int) -> np.ndarray:
    """Square QAM, Gray-coded per axis; label = (i_bits << bits) | q_bits."""
    axis = _gray_levels(bits_per_axis)
    order = 1 << bits_per_axis
    points = np.empty(order * order, dtype=np.complex128)
    for i_label in range(order):
        for q_label in range(order):
            points[(i_label << bits_per_axis) | q_label] = axis[i_label] + 1j * axis[q_label]
    return points / np.sqrt(np.mean(np.abs(points) ** 2))


_CONSTELLATIONS: dict[ModScheme, np.ndarray] = {
    ModScheme.BPSK: np.array([1.0 + 0j, -1.0 + 0j]),
    ModScheme.QPSK: _psk(4, np.pi / 4),
    ModScheme.PSK8: _psk(8, 0.0),
    ModScheme.PAM4: (_gray_levels(2) / np.sqrt(5.0)).astype(np.complex128),
    ModScheme.QAM16: _qam(2),
    ModScheme.QAM64: _qam(3),
}


def constellation(scheme: ModScheme) -> np.ndarray:
    """Unit-average-power constellation for a linear digital scheme."""
    try:
        return _CONSTELLATIONS[scheme].copy()
    except KeyError:
        raise ValueError(f"{scheme.name} has no constellation (not a linear scheme)") from None


def alphabet_size(scheme: ModScheme) -> int:
    """Number of distinct symbols a digital scheme accepts."""
    if scheme.is_analog:
        raise ValueError(f"{scheme.name} is analog; it has no symbol alphabet")
    if scheme in _CONSTELLATIONS:
        return len(_CONSTELLATIONS[scheme])
    return 2  # GFSK / CPFSK are binary
