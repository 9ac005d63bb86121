"""Network assemblies: ACBlock, WSENet, WSRNet, WSERNet, and the joint loss."""

from .acblock import ACBlock, ACBlockCfg
from .enhancer import WSENet, WSENetCfg
from .joint import JointLossCfg, WSERNet, joint_loss
from .recognizer import WSRNet, WSRNetCfg
from .summary import LayerRow, ModelSummary, model_summary

__all__ = [
    "ACBlock",
    "ACBlockCfg",
    "WSENet",
    "WSENetCfg",
    "WSRNet",
    "WSRNetCfg",
    "WSERNet",
    "JointLossCfg",
    "joint_loss",
    "LayerRow",
    "ModelSummary",
    "model_summary",
]
