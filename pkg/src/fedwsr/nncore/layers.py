"""1-D layers with exact analytic forward/backward passes.

All activations are ``(batch, channels, length)`` float arrays except after
global pooling, where they become ``(batch, features)``.  Convolutions use
"same"-style symmetric padding of ``kernel // 2``, so the output length is
``ceil(length / stride)``.  Backward passes return the input gradient and
accumulate parameter gradients into each ``Tensor.grad`` buffer.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import as_strided

from ..errors import ShapeError
from .tensor import Module, Tensor, check_channels


def _window_view(x_padded: np.ndarray, kernel: int, stride: int, l_out: int) -> np.ndarray:
    """Strided (batch, channels, kernel, l_out) view of a padded input."""
    n, c, _ = x_padded.shape
    sn, sc, sl = x_padded.strides
    return as_strided(
        x_padded,
        shape=(n, c, kernel, l_out),
        strides=(sn, sc, sl, sl * stride),
        writeable=False,
    )


def _scatter_windows(dcols: np.ndarray, l_padded: int, stride: int) -> np.ndarray:
    """Adjoint of :func:`_window_view`: scatter-add window gradients back."""
    n, c, kernel, l_out = dcols.shape
    dx = np.zeros((n, c, l_padded), dtype=dcols.dtype)
    for t in range(kernel):
        dx[:, :, t : t + stride * l_out : stride] += dcols[:, :, t, :]
    return dx


def init_conv_weight(rng: np.random.Generator, shape: tuple, fan_in: int, dtype) -> np.ndarray:
    """Fan-in-scaled Gaussian init (std = sqrt(2 / fan_in)) for ReLU nets."""
    return (rng.standard_normal(shape) * np.sqrt(2.0 / fan_in)).astype(dtype)


class Conv1D(Module):
    """Cross-correlation convolution over the length axis.

    Weights have shape (c_out, c_in, kernel); kernel must be odd so the
    symmetric pad of ``kernel // 2`` yields ``ceil(L / stride)`` outputs.
    """

    def __init__(self, c_in: int, c_out: int, kernel: int = 3, stride: int = 1,
                 bias: bool = True, rng: np.random.Generator | None = None,
                 dtype=np.float64):
        super().__init__()
        if kernel % 2 == 0 or kernel < 1:
            raise ValueError(f"kernel must be odd and positive, got {kernel}")
        if stride < 1:
            raise ValueError(f"stride must be >= 1, got {stride}")
        rng = rng or np.random.default_rng()
        self.c_in = c_in
        self.c_out = c_out
        self.kernel = kernel
        self.stride = stride
        self.pad = kernel // 2
        self.weight = Tensor(init_conv_weight(rng, (c_out, c_in, kernel), c_in * kernel, dtype))
        self.bias = Tensor(np.zeros(c_out, dtype=dtype), decay=False) if bias else None
        self._cache = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        check_channels(x, self.c_in, "Conv1D")
        n, _, l_in = x.shape
        xp = np.pad(x, ((0, 0), (0, 0), (self.pad, self.pad)))
        l_out = (xp.shape[2] - self.kernel) // self.stride + 1
        cols = np.ascontiguousarray(_window_view(xp, self.kernel, self.stride, l_out))
        cols2 = cols.reshape(n, self.c_in * self.kernel, l_out)
        w2 = self.weight.data.reshape(self.c_out, self.c_in * self.kernel)
        y = w2 @ cols2
        if self.bias is not None:
            y += self.bias.data[:, None]
        self._cache = (cols2, xp.shape[2], l_in)
        return y

    def backward(self, dy: np.ndarray) -> np.ndarray:
        cols2, l_padded, l_in = self._cache
        n = dy.shape[0]
        w2 = self.weight.data.reshape(self.c_out, self.c_in * self.kernel)
        dw = np.tensordot(dy, cols2, axes=([0, 2], [0, 2]))
        self.weight.grad += dw.reshape(self.weight.data.shape)
        if self.bias is not None:
            self.bias.grad += dy.sum(axis=(0, 2))
        dcols = (w2.T @ dy).reshape(n, self.c_in, self.kernel, dy.shape[2])
        dxp = _scatter_windows(dcols, l_padded, self.stride)
        return dxp[:, :, self.pad : l_padded - self.pad] if self.pad else dxp


def pointwise(c_in: int, c_out: int, **kwargs) -> Conv1D:
    """1x1 convolution: pure cross-channel mixing, no spatial context."""
    return Conv1D(c_in, c_out, kernel=1, stride=1, **kwargs)


class DepthwiseConv1D(Module):
    """Per-channel convolution: one length-``kernel`` filter per channel."""

    def __init__(self, channels: int, kernel: int = 3, stride: int = 1,
                 bias: bool = True, rng: np.random.Generator | None = None,
                 dtype=np.float64):
        super().__init__()
        if kernel % 2 == 0 or kernel < 1:
            raise ValueError(f"kernel must be odd and positive, got {kernel}")
        if stride < 1:
            raise ValueError(f"stride must be >= 1, got {stride}")
        rng = rng or np.random.default_rng()
        self.channels = channels
        self.kernel = kernel
        self.stride = stride
        self.pad = kernel // 2
        self.weight = Tensor(init_conv_weight(rng, (channels, kernel), kernel, dtype))
        self.bias = Tensor(np.zeros(channels, dtype=dtype), decay=False) if bias else None
        self._cache = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        check_channels(x, self.channels, "DepthwiseConv1D")
        xp = np.pad(x, ((0, 0), (0, 0), (self.pad, self.pad)))
        l_out = (xp.shape[2] - self.kernel) // self.stride + 1
        view = _window_view(xp, self.kernel, self.stride, l_out)
        y = np.einsum("nckl,ck->ncl", view, self.weight.data)
        if self.bias is not None:
            y += self.bias.data[:, None]
        self._cache = (view, xp.shape[2])
        return y

    def backward(self, dy: np.ndarray) -> np.ndarray:
        view, l_padded = self._cache
        self.weight.grad += np.einsum("ncl,nckl->ck", dy, view)
        if self.bias is not None:
            self.bias.grad += dy.sum(axis=(0, 2))
        dcols = np.einsum("ncl,ck->nckl", dy, self.weight.data)
        dxp = _scatter_windows(dcols, l_padded, self.stride)
        return dxp[:, :, self.pad : l_padded - self.pad] if self.pad else dxp


class BatchNorm1D(Module):
    """Per-channel batch normalization over the (batch, length) axes.

    Train mode uses batch statistics (biased variance) and updates the
    running statistics with the given momentum; eval mode uses the running
    statistics only.  Train mode requires batch size >= 2.
    """

    def __init__(self, channels: int, eps: float = 1e-5, momentum: float = 0.1,
                 dtype=np.float64):
        super().__init__()
        self.channels = channels
        self.eps = eps
        self.momentum = momentum
        self.gamma = Tensor(np.ones(channels, dtype=dtype), decay=False)
        self.beta = Tensor(np.zeros(channels, dtype=dtype), decay=False)
        self.register_buffer("running_mean", np.zeros(channels, dtype=dtype))
        self.register_buffer("running_var", np.ones(channels, dtype=dtype))
        self._cache = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        check_channels(x, self.channels, "BatchNorm1D")
        if self.training:
            if x.shape[0] < 2:
                raise ShapeError("BatchNorm1D train mode requires batch size >= 2")
            mean = x.mean(axis=(0, 2))
            var = x.var(axis=(0, 2))
            self.running_mean += self.momentum * (mean - self.running_mean)
            self.running_var += self.momentum * (var - self.running_var)
        else:
            mean = self.running_mean
            var = self.running_var
        inv_std = 1.0 / np.sqrt(var + self.eps)
        xhat = (x - mean[:, None]) * inv_std[:, None]
        self._cache = (xhat, inv_std)
        return self.gamma.data[:, None] * xhat + self.beta.data[:, None]

    def backward(self, dy: np.ndarray) -> np.ndarray:
        xhat, inv_std = self._cache
        self.gamma.grad += (dy * xhat).sum(axis=(0, 2))
        self.beta.grad += dy.sum(axis=(0, 2))
        dxhat = dy * self.gamma.data[:, None]
        if not self.training:
            return dxhat * inv_std[:, None]
        m = dy.shape[0] * dy.shape[2]
        sum_dxhat = dxhat.sum(axis=(0, 2), keepdims=True)
        sum_dxhat_xhat = (dxhat * xhat).sum(axis=(0, 2), keepdims=True)
        return (inv_std[:, None] / m) * (m * dxhat - sum_dxhat - xhat * sum_dxhat_xhat)


class ReLU(Module):
    def __init__(self):
        super().__init__()
        self._mask = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._mask = x > 0
        return np.where(self._mask, x, 0.0)

    def backward(self, dy: np.ndarray) -> np.ndarray:
        return np.where(self._mask, dy, 0.0)


class AvgPool1D(Module):
    """Sliding-window mean over the length axis (no padding)."""

    def __init__(self, window: int, stride: int | None = None):
        super().__init__()
        if window < 1:
            raise ValueError(f"window must be >= 1, got {window}")
        self.window = window
        self.stride = stride if stride is not None else window
        self._cache = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.ndim != 3:
            raise ShapeError(f"AvgPool1D: expected 3-D input, got shape {x.shape}")
        l_in = x.shape[2]
        if self.window > l_in:
            raise ShapeError(f"AvgPool1D: window {self.window} exceeds length {l_in}")
        l_out = (l_in - self.window) // self.stride + 1
        view = _window_view(x, self.window, self.stride, l_out)
        self._cache = (x.shape, l_out)
        return view.mean(axis=2)

    def backward(self, dy: np.ndarray) -> np.ndarray:
        shape, l_out = self._cache
        dx = np.zeros(shape, dtype=dy.dtype)
        share = dy / self.window
        for t in range(self.window):
            dx[:, :, t : t + self.stride * l_out : self.stride] += share
        return dx


class GlobalAvgPool(Module):
    """(batch, channels, length) -> (batch, channels) mean over length."""

    def __init__(self):
        super().__init__()
        self._length = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.ndim != 3:
            raise ShapeError(f"GlobalAvgPool: expected 3-D input, got shape {x.shape}")
        self._length = x.shape[2]
        return x.mean(axis=2)

    def backward(self, dy: np.ndarray) -> np.ndarray:
        return np.repeat(dy[:, :, None], self._length, axis=2) / self._length


class Linear(Module):
    """Fully connected layer on (batch, features) activations."""

    def __init__(self, n_in: int, n_out: int, bias: bool = True,
                 rng: np.random.Generator | None = None, dtype=np.float64):
        super().__init__()
        rng = rng or np.random.default_rng()
        self.n_in = n_in
        self.n_out = n_out
        self.weight = Tensor(init_conv_weight(rng, (n_out, n_in), n_in, dtype))
        self.bias = Tensor(np.zeros(n_out, dtype=dtype), decay=False) if bias else None
        self._x = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.ndim != 2 or x.shape[1] != self.n_in:
            raise ShapeError(f"Linear: expected (batch, {self.n_in}) input, got {x.shape}")
        self._x = x
        y = x @ self.weight.data.T
        if self.bias is not None:
            y += self.bias.data
        return y

    def backward(self, dy: np.ndarray) -> np.ndarray:
        self.weight.grad += dy.T @ self._x
        if self.bias is not None:
            self.bias.grad += dy.sum(axis=0)
        return dy @ self.weight.data
