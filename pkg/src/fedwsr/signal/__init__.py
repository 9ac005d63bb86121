"""Synthetic I/Q dataset generation: modulation, channel, AWGN, framing."""

from .channel import (
    DEFAULT_TAP_DELAYS,
    DEFAULT_TAP_MAGS_DB,
    IMPAIRMENT_LEVELS,
    ChannelConfig,
    add_awgn,
    apply_channel,
)
from .dataset import Dataset, DatasetSpec, generate_dataset
from .fileio import read_dataset, write_dataset
from .filters import gaussian_taps, lowpass_taps, rrc_taps
from .frames import IQFrame, LabeledSample, to_iq_frames
from .modulate import analog_message, modulate_analog, modulate_digital
from .schemes import (
    ANALOG_SCHEMES,
    DIGITAL_SCHEMES,
    ModScheme,
    alphabet_size,
    constellation,
)

__all__ = [
    "ANALOG_SCHEMES",
    "ChannelConfig",
    "DEFAULT_TAP_DELAYS",
    "DEFAULT_TAP_MAGS_DB",
    "DIGITAL_SCHEMES",
    "Dataset",
    "DatasetSpec",
    "IMPAIRMENT_LEVELS",
    "IQFrame",
    "LabeledSample",
    "ModScheme",
    "add_awgn",
    "alphabet_size",
    "analog_message",
    "apply_channel",
    "constellation",
    "gaussian_taps",
    "generate_dataset",
    "lowpass_taps",
    "modulate_analog",
    "modulate_digital",
    "read_dataset",
    "rrc_taps",
    "to_iq_frames",
    "write_dataset",
]
