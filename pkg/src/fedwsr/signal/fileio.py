"""FWSR dataset file format (binary, little-endian).

Layout:
    magic   4 bytes  b"FWSR"
    version u16      currently 1
    M       u16      number of classes
    L       u16      frame length
    names   M x (u16 byte length + UTF-8 bytes)
    count   u64      number of samples
    samples count x (label u16, snr f32, x 2L f32, s_star 2L f32)

Readers reject unknown magic/version and truncated or inconsistent files
with :class:`DataError`.  The float payload is exactly the dataset's own
float32 arrays, so write -> read is lossless.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..errors import DataError
from .dataset import Dataset

MAGIC = b"FWSR"
VERSION = 1


def _sample_dtype(frame_len: int) -> np.dtype:
    return np.dtype(
        [
            ("label", "<u2"),
            ("snr", "<f4"),
            ("x", "<f4", (2, frame_len)),
            ("s", "<f4", (2, frame_len)),
        ]
    )


def write_dataset(path: str | Path, dataset: Dataset) -> None:
    n = len(dataset)
    if dataset.num_classes > 0xFFFF or dataset.frame_len > 0xFFFF:
        raise DataError("class count and frame length must fit in u16")
    if dataset.labels.max(initial=0) > 0xFFFF:
        raise DataError("labels must fit in u16")
    header = [MAGIC, struct.pack("<HHH", VERSION, dataset.num_classes, dataset.frame_len)]
    for name in dataset.scheme_names:
        raw = name.encode("utf-8")
        header.append(struct.pack("<H", len(raw)) + raw)
    header.append(struct.pack("<Q", n))
    block = np.empty(n, dtype=_sample_dtype(dataset.frame_len))
    block["label"] = dataset.labels
    block["snr"] = dataset.snr_db
    block["x"] = dataset.x
    block["s"] = dataset.s_star
    with open(path, "wb") as fh:
        fh.write(b"".join(header))
        fh.write(block.tobytes())


def _read_exact(fh, size: int, what: str) -> bytes:
    raw = fh.read(size)
    if len(raw) != size:
        raise DataError(f"truncated dataset file while reading {what}")
    return raw


def read_dataset(path: str | Path) -> Dataset:
    with open(path, "rb") as fh:
        if _read_exact(fh, 4, "magic") != MAGIC:
            raise DataError(f"{path}: not an FWSR dataset file (bad magic)")
        version, num_classes, frame_len = struct.unpack("<HHH", _read_exact(fh, 6, "header"))
        if version != VERSION:
            raise DataError(f"{path}: unsupported FWSR version {version} (expected {VERSION})")
        names = []
        for _ in range(num_classes):
            (length,) = struct.unpack("<H", _read_exact(fh, 2, "name table"))
            names.append(_read_exact(fh, length, "name table").decode("utf-8"))
        (count,) = struct.unpack("<Q", _read_exact(fh, 8, "sample count"))
        dtype = _sample_dtype(frame_len)
        raw = _read_exact(fh, count * dtype.itemsize, "samples")
        if fh.read(1):
            raise DataError(f"{path}: trailing bytes after {count} samples")
    block = np.frombuffer(raw, dtype=dtype)
    return Dataset(
        np.ascontiguousarray(block["x"]),
        np.ascontiguousarray(block["s"]),
        block["label"].astype(np.int64),
        np.ascontiguousarray(block["snr"]),
        tuple(names),
    )
