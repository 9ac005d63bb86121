"""Shared fixtures and oracle helpers.

The finite-difference helpers here are deliberately independent of the
library's backward passes: they perturb one parameter (or input element)
at a time and re-run the forward pass, so a gradient bug in the library
cannot hide inside its own check.
"""

import numpy as np
import pytest


def rng(seed: int = 0) -> np.random.Generator:
    return np.random.default_rng(seed)


def fd_grad(f, x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Central finite differences of scalar f at x, elementwise."""
    g = np.zeros_like(x, dtype=np.float64)
    flat = x.reshape(-1)
    out = g.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        f_plus = f()
        flat[i] = orig - h
        f_minus = f()
        flat[i] = orig
        out[i] = (f_plus - f_minus) / (2.0 * h)
    return g


def fd_grad_sampled(f, x: np.ndarray, indices, h: float = 1e-6) -> np.ndarray:
    """Like fd_grad but only at the given flat indices (for big params)."""
    flat = x.reshape(-1)
    out = np.zeros(len(indices), dtype=np.float64)
    for j, i in enumerate(indices):
        orig = flat[i]
        flat[i] = orig + h
        f_plus = f()
        flat[i] = orig - h
        f_minus = f()
        flat[i] = orig
        out[j] = (f_plus - f_minus) / (2.0 * h)
    return out


def rel_err(a: np.ndarray, b: np.ndarray) -> float:
    """Max relative error with an absolute floor for near-zero entries."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-4)
    return float(np.max(np.abs(a - b) / scale))


@pytest.fixture
def rng0() -> np.random.Generator:
    return np.random.default_rng(0)


@pytest.fixture(scope="session")
def tiny_dataset():
    """Small 3-class dataset reused by model/fed/metric tests."""
    from fedwsr.signal import ChannelConfig, DatasetSpec, ModScheme, generate_dataset

    spec = DatasetSpec(
        schemes=(ModScheme.BPSK, ModScheme.QPSK, ModScheme.PAM4),
        snr_grid_db=(0.0, 10.0),
        frames_per_scheme_per_snr=24,
        frame_len=64,
        channel=ChannelConfig(impairment_level="awgn_only"),
        seed=1234,
    )
    return generate_dataset(spec)
