"""Per-layer shape / parameter / MAC reports for the three networks.

MAC counting convention: one multiply-accumulate per weight application
(conv: c_out*c_in*k per output element; depthwise: k per channel-element;
linear: n_in*n_out per sample), plus one per element for batch-norm's
scale-and-shift.  Pooling and ReLU are counted as zero.  Counts are per
single input frame (no batch dimension).
"""

from __future__ import annotations

from dataclasses import dataclass

from ..nncore import AvgPool1D, BatchNorm1D, Conv1D, DepthwiseConv1D, Linear, Module
from .acblock import ACBlock
from .enhancer import WSENet
from .joint import WSERNet
from .recognizer import WSRNet


@dataclass(frozen=True)
class LayerRow:
    name: str
    output_shape: tuple[int, ...]
    params: int
    macs: int


@dataclass(frozen=True)
class ModelSummary:
    model: str
    rows: tuple[LayerRow, ...]

    @property
    def total_params(self) -> int:
        return sum(r.params for r in self.rows)

    @property
    def total_macs(self) -> int:
        return sum(r.macs for r in self.rows)

    def format(self) -> str:
        name_w = max(len("layer"), *(len(r.name) for r in self.rows))
        shape_w = max(len("output"), *(len(_fmt_shape(r.output_shape)) for r in self.rows))
        lines = [
            f"{self.model}",
            f"{'layer':<{name_w}}  {'output':<{shape_w}}  {'params':>10}  {'MACs':>12}",
        ]
        for r in self.rows:
            lines.append(
                f"{r.name:<{name_w}}  {_fmt_shape(r.output_shape):<{shape_w}}"
                f"  {r.params:>10}  {r.macs:>12}"
            )
        lines.append(
            f"{'total':<{name_w}}  {'':<{shape_w}}  {self.total_params:>10}  {self.total_macs:>12}"
        )
        return "\n".join(lines)


def _fmt_shape(shape: tuple[int, ...]) -> str:
    return "(" + ", ".join(str(d) for d in shape) + ")"


def _params_of(module: Module) -> int:
    return sum(t.size for _, t in module.named_parameters())


def _layer_macs(layer, l_in: int) -> tuple[int, int]:
    """(macs, l_out) for one primitive layer at input length l_in."""
    if isinstance(layer, Conv1D):
        l_out = -(-l_in // layer.stride)
        return layer.c_out * layer.c_in * layer.kernel * l_out, l_out
    if isinstance(layer, DepthwiseConv1D):
        l_out = -(-l_in // layer.stride)
        return layer.channels * layer.kernel * l_out, l_out
    if isinstance(layer, BatchNorm1D):
        return layer.channels * l_in, l_in
    if isinstance(layer, AvgPool1D):
        return 0, (l_in - layer.window) // layer.stride + 1
    raise TypeError(f"unknown layer type {type(layer).__name__}")


def _acblock_macs(block: ACBlock, l_in: int) -> int:
    macs = 0
    for layers in block.branch_layers().values():
        l = l_in
        for layer in layers:
            m, l = _layer_macs(layer, l)
            macs += m
    return macs


def _wsenet_rows(net: WSENet, prefix: str = "") -> list[LayerRow]:
    cfg = net.cfg
    l = cfg.frame_len
    rows = [
        LayerRow(
            f"{prefix}conv_head+relu",
            (cfg.width, l),
            _params_of(net.head),
            _layer_macs(net.head, l)[0],
        )
    ]
    for i, block in enumerate(net.blocks, start=1):
        rows.append(
            LayerRow(f"{prefix}acblock_{i:02d}", (cfg.width, l), _params_of(block), _acblock_macs(block, l))
        )
    rows.append(
        LayerRow(f"{prefix}conv_tail", (2, l), _params_of(net.tail), _layer_macs(net.tail, l)[0])
    )
    return rows


def _wsrnet_rows(net: WSRNet, prefix: str = "") -> list[LayerRow]:
    cfg = net.cfg
    rows = []
    l = cfg.frame_len
    for i, (block, c_out, stride) in enumerate(zip(net.blocks, cfg.channels, cfg.strides), start=1):
        macs = _acblock_macs(block, l)
        l //= stride
        rows.append(LayerRow(f"{prefix}acblock_{i}", (c_out, l), _params_of(block), macs))
    rows.append(LayerRow(f"{prefix}global_avgpool", (cfg.channels[-1],), 0, 0))
    rows.append(
        LayerRow(
            f"{prefix}fc",
            (cfg.num_classes,),
            _params_of(net.fc),
            net.fc.n_in * net.fc.n_out,
        )
    )
    return rows


def model_summary(model: Module) -> ModelSummary:
    """Deterministic per-layer report; totals equal the flat parameter count."""
    if isinstance(model, WSENet):
        return ModelSummary("WSENet", tuple(_wsenet_rows(model)))
    if isinstance(model, WSRNet):
        return ModelSummary("WSRNet", tuple(_wsrnet_rows(model)))
    if isinstance(model, WSERNet):
        rows = _wsenet_rows(model.enhancer, "enhancer.") + _wsrnet_rows(
            model.recognizer, "recognizer."
        )
        return ModelSummary("WSERNet", tuple(rows))
    raise TypeError(f"no summary support for {type(model).__name__}")
