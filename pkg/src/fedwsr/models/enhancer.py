"""Signal enhancement network (WSENet).

A shape-preserving denoiser over (2, L) I/Q frames: a 3-tap head conv with
ReLU, a stack of stride-1 ACBlocks at a fixed width, and a 3-tap tail conv
back to 2 channels.  In residual mode the stack predicts the noise estimate
w_hat and the enhanced frame is s_hat = x - w_hat, which makes a zero-tail
network the exact identity map.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..nncore import Conv1D, Module, ModuleList, ReLU, check_channels
from .acblock import ACBlock, ACBlockCfg


@dataclass(frozen=True)
class WSENetCfg:
    width: int = 32
    depth_blocks: int = 15
    frame_len: int = 128
    residual_output: bool = True
    identity_init: bool = False

    def __post_init__(self):
        if self.width < 1 or self.depth_blocks < 0:
            raise ValueError("width must be >= 1 and depth_blocks >= 0")
        if self.frame_len < 8 or self.frame_len % 2:
            raise ValueError(f"frame_len must be even and >= 8, got {self.frame_len}")
        if self.identity_init and not self.residual_output:
            raise ValueError("identity_init requires residual_output")


class WSENet(Module):
    def __init__(self, cfg: WSENetCfg, rng: np.random.Generator, dtype=np.float64):
        super().__init__()
        self.cfg = cfg
        w = cfg.width
        self.head = Conv1D(2, w, kernel=3, rng=rng, dtype=dtype)
        self.head_relu = ReLU()
        self.blocks = ModuleList(
            ACBlock(ACBlockCfg(w, w, kernel=3, stride=1), rng, dtype=dtype)
            for _ in range(cfg.depth_blocks)
        )
        self.tail = Conv1D(w, 2, kernel=3, rng=rng, dtype=dtype)
        if cfg.identity_init:
            self.zero_tail()  # s_hat == x until training moves the tail
        self._x = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        check_channels(x, 2, "WSENet")
        h = self.head_relu(self.head(x))
        for block in self.blocks:
            h = block(h)
        w_hat = self.tail(h)
        if self.cfg.residual_output:
            self._x = x
            return x - w_hat
        return w_hat

    def backward(self, d_s_hat: np.ndarray) -> np.ndarray:
        d_w_hat = -d_s_hat if self.cfg.residual_output else d_s_hat
        dh = self.tail.backward(d_w_hat)
        for block in reversed(list(self.blocks)):
            dh = block.backward(dh)
        dx = self.head.backward(self.head_relu.backward(dh))
        if self.cfg.residual_output:
            dx = dx + d_s_hat
        return dx

    def zero_tail(self) -> None:
        """Zero the tail conv, making the residual-mode network an identity."""
        self.tail.weight.data[...] = 0.0
        if self.tail.bias is not None:
            self.tail.bias.data[...] = 0.0
