"""Modulation recognition network (WSRNet).

Four ACBlocks widen the 2-channel frame to `channels` while the strides
halve the length, a global average pool collapses the length axis, and a
bias-free fully connected layer produces per-class logits.  `forward`
returns logits (what the loss wants); `predict_proba`/`predict` give the
softmax view.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..nncore import GlobalAvgPool, Linear, Module, ModuleList, check_channels, softmax
from .acblock import ACBlock, ACBlockCfg


@dataclass(frozen=True)
class WSRNetCfg:
    num_classes: int = 10
    channels: tuple[int, ...] = (64, 128, 256, 512)
    strides: tuple[int, ...] = (1, 2, 2, 2)
    frame_len: int = 128
    fc_bias: bool = False
    in_channels: int = 2

    def __post_init__(self):
        if len(self.channels) != len(self.strides):
            raise ValueError("channels and strides must have equal length")
        if self.num_classes < 2:
            raise ValueError(f"num_classes must be >= 2, got {self.num_classes}")
        total_stride = int(np.prod(self.strides))
        if self.frame_len % total_stride:
            raise ValueError(
                f"frame_len {self.frame_len} not divisible by total stride {total_stride}"
            )

    @property
    def feature_len(self) -> int:
        return self.frame_len // int(np.prod(self.strides))


class WSRNet(Module):
    def __init__(self, cfg: WSRNetCfg, rng: np.random.Generator, dtype=np.float64):
        super().__init__()
        self.cfg = cfg
        blocks = []
        c_in = cfg.in_channels
        for c_out, stride in zip(cfg.channels, cfg.strides):
            blocks.append(ACBlock(ACBlockCfg(c_in, c_out, kernel=3, stride=stride), rng, dtype=dtype))
            c_in = c_out
        self.blocks = ModuleList(blocks)
        self.pool = GlobalAvgPool()
        self.fc = Linear(cfg.channels[-1], cfg.num_classes, bias=cfg.fc_bias, rng=rng, dtype=dtype)

    def forward(self, x: np.ndarray) -> np.ndarray:
        check_channels(x, self.cfg.in_channels, "WSRNet")
        h = x
        for block in self.blocks:
            h = block(h)
        return self.fc(self.pool(h))

    def backward(self, d_logits: np.ndarray) -> np.ndarray:
        dh = self.pool.backward(self.fc.backward(d_logits))
        for block in reversed(list(self.blocks)):
            dh = block.backward(dh)
        return dh

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return softmax(self.forward(x))

    def predict(self, x: np.ndarray) -> np.ndarray:
        """Predicted class per sample; ties break to the lowest index."""
        return np.argmax(self.forward(x), axis=1)
