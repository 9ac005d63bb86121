"""Parameter container and module base for the 1-D network kernel.

A ``Tensor`` pairs a value array with a same-shaped gradient buffer and an
optional weight-decay flag.  ``Module`` provides pytorch-style child/param
registration so models can be walked in a stable order for flattening,
checkpointing and federated exchange.
"""

from __future__ import annotations

from typing import Iterator

import numpy as np

from ..errors import ShapeError


class Tensor:
    """A trainable parameter: value array plus gradient buffer.

    ``data`` and ``grad`` always share shape and dtype.  ``decay`` marks
    whether the parameter participates in weight decay (convolution and
    linear weights do; biases and normalization scales/shifts do not).
    """

    __slots__ = ("data", "grad", "decay")

    def __init__(self, data: np.ndarray, decay: bool = True):
        self.data = np.asarray(data)
        self.grad = np.zeros_like(self.data)
        self.decay = decay

    @property
    def shape(self) -> tuple:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    def zero_grad(self) -> None:
        self.grad.fill(0.0)

    def __repr__(self) -> str:  # pragma: no cover
        return f"Tensor(shape={self.data.shape}, decay={self.decay})"


class Module:
    """Base class for layers and models.

    Child modules and parameters are registered automatically on attribute
    assignment, in assignment order, which fixes the parameter layout for
    flattening.  Running statistics (non-trainable state) are registered
    explicitly via :meth:`register_buffer`.
    """

    def __init__(self):
        object.__setattr__(self, "_modules", {})
        object.__setattr__(self, "_params", {})
        object.__setattr__(self, "_buffers", {})
        object.__setattr__(self, "training", True)

    def __setattr__(self, name, value):
        if isinstance(value, Module):
            self._modules[name] = value
        elif isinstance(value, Tensor):
            self._params[name] = value
        object.__setattr__(self, name, value)

    def register_buffer(self, name: str, value: np.ndarray) -> None:
        self._buffers[name] = value
        object.__setattr__(self, name, value)

    def named_parameters(self, prefix: str = "") -> Iterator[tuple[str, Tensor]]:
        for name, p in self._params.items():
            yield prefix + name, p
        for name, child in self._modules.items():
            yield from child.named_parameters(prefix + name + ".")

    def named_buffers(self, prefix: str = "") -> Iterator[tuple[str, np.ndarray]]:
        for name, b in self._buffers.items():
            yield prefix + name, b
        for name, child in self._modules.items():
            yield from child.named_buffers(prefix + name + ".")

    def parameters(self) -> Iterator[Tensor]:
        for _, p in self.named_parameters():
            yield p

    def zero_grad(self) -> None:
        for p in self.parameters():
            p.zero_grad()

    def train(self, flag: bool = True) -> "Module":
        object.__setattr__(self, "training", flag)
        for child in self._modules.values():
            child.train(flag)
        return self

    def eval(self) -> "Module":
        return self.train(False)

    def num_parameters(self) -> int:
        return sum(p.size for p in self.parameters())

    def forward(self, x: np.ndarray) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError

    def backward(self, dy: np.ndarray) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.forward(x)


class ModuleList(Module):
    """Ordered container of sub-modules, registered as ``"0", "1", ...``."""

    def __init__(self, modules=()):
        super().__init__()
        self._list = []
        for m in modules:
            self.append(m)

    def append(self, module: Module) -> None:
        self._modules[str(len(self._list))] = module
        self._list.append(module)

    def __iter__(self):
        return iter(self._list)

    def __len__(self):
        return len(self._list)

    def __getitem__(self, i):
        return self._list[i]


def check_channels(x: np.ndarray, expected: int, who: str) -> None:
    """Validate a (batch, channels, length) activation against a layer."""
    if x.ndim != 3:
        raise ShapeError(f"{who}: expected (batch, channels, length) input, got shape {x.shape}")
    if x.shape[1] != expected:
        raise ShapeError(f"{who}: expected {expected} input channels, got {x.shape[1]}")
