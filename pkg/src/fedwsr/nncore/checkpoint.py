"""Binary checkpoint format for flat parameter vectors.

Layout (little-endian): magic ``FWSP``, u16 format version, length-prefixed
architecture digest string, the layout table, then the values as f32.
Readers reject unknown magic or version, and loaders compare the stored
digest against the model the caller is about to fill.
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from ..errors import DataError
from .params import LayoutEntry, ParamVector

MAGIC = b"FWSP"
VERSION = 1


def config_digest(arch: dict) -> str:
    """Stable hex digest of an architecture description dict."""
    canonical = json.dumps(arch, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _write_str(fh, s: str) -> None:
    raw = s.encode("utf-8")
    fh.write(struct.pack("<H", len(raw)))
    fh.write(raw)


def _read_str(fh) -> str:
    (n,) = struct.unpack("<H", fh.read(2))
    return fh.read(n).decode("utf-8")


def save_checkpoint(path: str | Path, vector: ParamVector, digest: str) -> None:
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<H", VERSION))
        _write_str(fh, digest)
        fh.write(struct.pack("<I", len(vector.layout)))
        for e in vector.layout:
            _write_str(fh, e.name)
            fh.write(struct.pack("<QQ", e.offset, e.size))
            fh.write(struct.pack("<B", len(e.shape)))
            for d in e.shape:
                fh.write(struct.pack("<I", d))
            fh.write(struct.pack("<BB", int(e.decay), int(e.trainable)))
        values = np.asarray(vector.values, dtype="<f4")
        fh.write(struct.pack("<Q", values.size))
        fh.write(values.tobytes())


def load_checkpoint(path: str | Path) -> tuple[ParamVector, str]:
    """Read a checkpoint; returns the parameter vector and stored digest."""
    with open(path, "rb") as fh:
        if fh.read(4) != MAGIC:
            raise DataError(f"{path}: not a checkpoint file (bad magic)")
        (version,) = struct.unpack("<H", fh.read(2))
        if version != VERSION:
            raise DataError(f"{path}: unsupported checkpoint version {version}")
        digest = _read_str(fh)
        (n_entries,) = struct.unpack("<I", fh.read(4))
        layout = []
        for _ in range(n_entries):
            name = _read_str(fh)
            offset, size = struct.unpack("<QQ", fh.read(16))
            (ndim,) = struct.unpack("<B", fh.read(1))
            shape = tuple(struct.unpack("<I", fh.read(4))[0] for _ in range(ndim))
            decay, trainable = struct.unpack("<BB", fh.read(2))
            layout.append(LayoutEntry(name, offset, size, shape, bool(decay), bool(trainable)))
        (count,) = struct.unpack("<Q", fh.read(8))
        values = np.frombuffer(fh.read(count * 4), dtype="<f4").copy()
        if values.size != count:
            raise DataError(f"{path}: truncated checkpoint")
    return ParamVector(values, tuple(layout)), digest
