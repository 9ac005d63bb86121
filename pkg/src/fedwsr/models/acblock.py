"""Three-branch 1-D convolution block.

The block runs three parallel paths over the same input and rectifies
their element-wise sum:

  * pointwise -> BN -> depthwise(stride) -> BN   (channel mix first)
  * depthwise(stride) -> BN -> pointwise -> BN   (spatial filter first)
  * 1x1 conv -> BN -> average pool               (shortcut; pool only when
                                                  stride > 1, to keep the
                                                  branch lengths equal)

All branches emit (c_out, L / stride), so the sum is well defined for any
even input length.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..nncore import AvgPool1D, BatchNorm1D, Conv1D, DepthwiseConv1D, Module, ReLU, pointwise


@dataclass(frozen=True)
class ACBlockCfg:
    c_in: int
    c_out: int
    kernel: int = 3
    stride: int = 1

    def __post_init__(self):
        if self.stride not in (1, 2):
            raise ValueError(f"stride must be 1 or 2, got {self.stride}")
        if self.kernel % 2 == 0:
            raise ValueError(f"kernel must be odd, got {self.kernel}")


class ACBlock(Module):
    def __init__(self, cfg: ACBlockCfg, rng: np.random.Generator, dtype=np.float64):
        super().__init__()
        self.cfg = cfg
        c_in, c_out, k, s = cfg.c_in, cfg.c_out, cfg.kernel, cfg.stride
        # channel-mix-first branch
        self.pd_pw = pointwise(c_in, c_out, rng=rng, dtype=dtype)
        self.pd_bn1 = BatchNorm1D(c_out, dtype=dtype)
        self.pd_dw = DepthwiseConv1D(c_out, kernel=k, stride=s, rng=rng, dtype=dtype)
        self.pd_bn2 = BatchNorm1D(c_out, dtype=dtype)
        # spatial-filter-first branch
        self.dp_dw = DepthwiseConv1D(c_in, kernel=k, stride=s, rng=rng, dtype=dtype)
        self.dp_bn1 = BatchNorm1D(c_in, dtype=dtype)
        self.dp_pw = pointwise(c_in, c_out, rng=rng, dtype=dtype)
        self.dp_bn2 = BatchNorm1D(c_out, dtype=dtype)
        # shortcut branch
        self.r_conv = pointwise(c_in, c_out, rng=rng, dtype=dtype)
        self.r_bn = BatchNorm1D(c_out, dtype=dtype)
        self.r_pool = AvgPool1D(s, s) if s > 1 else None
        self.relu = ReLU()

    def forward(self, x: np.ndarray) -> np.ndarray:
        y_pd = self.pd_bn2(self.pd_dw(self.pd_bn1(self.pd_pw(x))))
        y_dp = self.dp_bn2(self.dp_pw(self.dp_bn1(self.dp_dw(x))))
        y_r = self.r_bn(self.r_conv(x))
        if self.r_pool is not None:
            y_r = self.r_pool(y_r)
        return self.relu(y_pd + y_dp + y_r)

    def backward(self, dy: np.ndarray) -> np.ndarray:
        ds = self.relu.backward(dy)
        dx_pd = self.pd_pw.backward(self.pd_bn1.backward(self.pd_dw.backward(self.pd_bn2.backward(ds))))
        dx_dp = self.dp_dw.backward(self.dp_bn1.backward(self.dp_pw.backward(self.dp_bn2.backward(ds))))
        dr = self.r_pool.backward(ds) if self.r_pool is not None else ds
        dx_r = self.r_conv.backward(self.r_bn.backward(dr))
        return dx_pd + dx_dp + dx_r

    def branch_layers(self) -> dict[str, list]:
        """Per-branch layer sequences, in application order."""
        residual = [self.r_conv, self.r_bn] + ([self.r_pool] if self.r_pool else [])
        return {
            "pointwise_depthwise": [self.pd_pw, self.pd_bn1, self.pd_dw, self.pd_bn2],
            "depthwise_pointwise": [self.dp_dw, self.dp_bn1, self.dp_pw, self.dp_bn2],
            "residual": residual,
        }
