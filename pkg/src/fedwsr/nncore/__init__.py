"""Minimal 1-D neural-network kernel: layers, losses, SGD, flat params."""

from .checkpoint import config_digest, load_checkpoint, save_checkpoint
from .layers import (
    AvgPool1D,
    BatchNorm1D,
    Conv1D,
    DepthwiseConv1D,
    GlobalAvgPool,
    Linear,
    ReLU,
    pointwise,
)
from .losses import mse_loss, softmax, softmax_cross_entropy
from .optim import SGDState, sgd_step
from .params import LayoutEntry, ParamVector, flatten_grads, flatten_params, load_params
from .tensor import Module, ModuleList, Tensor, check_channels

__all__ = [
    "AvgPool1D",
    "BatchNorm1D",
    "Conv1D",
    "DepthwiseConv1D",
    "GlobalAvgPool",
    "LayoutEntry",
    "Linear",
    "Module",
    "ModuleList",
    "ParamVector",
    "ReLU",
    "SGDState",
    "Tensor",
    "config_digest",
    "flatten_grads",
    "flatten_params",
    "load_checkpoint",
    "load_params",
    "mse_loss",
    "pointwise",
    "save_checkpoint",
    "sgd_step",
    "softmax",
    "softmax_cross_entropy",
    "check_channels",
]
