"""Flat parameter views for optimization, aggregation and checkpointing.

``flatten_params`` produces a :class:`ParamVector`: a single 1-D array plus
an ordered layout describing where each named parameter lives.  Two models
built from the same architecture config flatten to identical layouts, which
is what makes parameter averaging and proximal distances well defined.

With ``with_state=True`` the vector additionally carries non-trainable
running statistics (batch-norm buffers); these are what a federated server
broadcasts and averages, while optimizer steps and proximal distances only
ever touch the trainable entries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor import Module


@dataclass(frozen=True)
class LayoutEntry:
    name: str
    offset: int
    size: int
    shape: tuple
    decay: bool
    trainable: bool


@dataclass
class ParamVector:
    """Immutable flat view of model parameters (optionally plus state)."""

    values: np.ndarray
    layout: tuple[LayoutEntry, ...]

    def __len__(self) -> int:
        return self.values.size

    @property
    def trainable_size(self) -> int:
        return sum(e.size for e in self.layout if e.trainable)

    def decay_mask(self) -> np.ndarray:
        mask = np.zeros(len(self), dtype=bool)
        for e in self.layout:
            if e.decay:
                mask[e.offset : e.offset + e.size] = True
        return mask

    def trainable_mask(self) -> np.ndarray:
        mask = np.zeros(len(self), dtype=bool)
        for e in self.layout:
            if e.trainable:
                mask[e.offset : e.offset + e.size] = True
        return mask

    def with_values(self, values: np.ndarray) -> "ParamVector":
        if values.shape != self.values.shape:
            raise ValueError(f"value shape {values.shape} does not match layout ({self.values.shape})")
        return ParamVector(values, self.layout)


def _entries(model: Module, with_state: bool):
    items = [(name, p.data, p.decay, True) for name, p in model.named_parameters()]
    if with_state:
        items += [(name, b, False, False) for name, b in model.named_buffers()]
    return items


def flatten_params(model: Module, with_state: bool = False) -> ParamVector:
    """Copy model parameters (and optionally buffers) into a flat vector."""
    items = _entries(model, with_state)
    layout = []
    chunks = []
    offset = 0
    for name, arr, decay, trainable in items:
        layout.append(LayoutEntry(name, offset, arr.size, arr.shape, decay, trainable))
        chunks.append(arr.ravel())
        offset += arr.size
    values = np.concatenate(chunks) if chunks else np.zeros(0)
    return ParamVector(values, tuple(layout))


def flatten_grads(model: Module) -> np.ndarray:
    """Current parameter gradients in flatten_params (trainable) order."""
    return np.concatenate([p.grad.ravel() for _, p in model.named_parameters()])


def load_params(model: Module, vector: ParamVector) -> None:
    """Write a flat vector back into the model's parameters/buffers.

    The vector's layout must match the model's own flatten layout exactly
    (names, sizes, order); loading is the exact inverse of flattening.
    """
    with_state = any(not e.trainable for e in vector.layout)
    items = _entries(model, with_state)
    if len(items) != len(vector.layout):
        raise ValueError(
            f"layout mismatch: model has {len(items)} entries, vector has {len(vector.layout)}"
        )
    for (name, arr, _, _), entry in zip(items, vector.layout):
        if name != entry.name or arr.size != entry.size:
            raise ValueError(f"layout mismatch at {entry.name!r} (model entry {name!r})")
        arr[...] = vector.values[entry.offset : entry.offset + entry.size].reshape(arr.shape)
