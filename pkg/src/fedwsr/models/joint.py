"""Joint enhancement + recognition model (WSERNet) and its multi-task loss.

The loss is the convex combination

    L = lam * MSE(s_hat, s_star) + (1 - lam) * CE(logits, labels)

so lam=1 reduces to pure enhancement and lam=0 to pure recognition.  The
recognition gradient flows through the enhancer (end-to-end training), so
even at lam=0 the enhancer weights receive nonzero gradients in general.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..nncore import Module, mse_loss, softmax, softmax_cross_entropy
from .enhancer import WSENet, WSENetCfg
from .recognizer import WSRNet, WSRNetCfg


@dataclass(frozen=True)
class JointLossCfg:
    lam: float = 0.3

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lam must be in [0, 1], got {self.lam}")


def joint_loss(
    s_hat: np.ndarray,
    s_star: np.ndarray,
    logits: np.ndarray,
    labels: np.ndarray,
    cfg: JointLossCfg,
) -> tuple[float, float, float, np.ndarray, np.ndarray]:
    """Return (loss, mse, ce, d_s_hat, d_logits).

    The gradients are already scaled by lam and (1 - lam), ready to feed a
    backward pass.  At lam=1 d_logits is exactly zero; at lam=0 d_s_hat is
    exactly zero.
    """
    mse, d_mse = mse_loss(s_hat, s_star)
    ce, d_ce = softmax_cross_entropy(logits, labels)
    lam = cfg.lam
    if lam == 1.0:
        loss = mse
    elif lam == 0.0:
        loss = ce
    else:
        loss = lam * mse + (1.0 - lam) * ce
    return loss, mse, ce, lam * d_mse, (1.0 - lam) * d_ce


class WSERNet(Module):
    """Enhancer followed by recognizer, trained end to end."""

    def __init__(
        self,
        enh_cfg: WSENetCfg,
        rec_cfg: WSRNetCfg,
        rng: np.random.Generator,
        dtype=np.float64,
    ):
        super().__init__()
        if enh_cfg.frame_len != rec_cfg.frame_len:
            raise ValueError("enhancer and recognizer frame_len must agree")
        self.enhancer = WSENet(enh_cfg, rng, dtype=dtype)
        self.recognizer = WSRNet(rec_cfg, rng, dtype=dtype)

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        s_hat = self.enhancer(x)
        logits = self.recognizer(s_hat)
        return s_hat, logits

    def backward(self, d_s_hat: np.ndarray, d_logits: np.ndarray) -> np.ndarray:
        d_total = d_s_hat + self.recognizer.backward(d_logits)
        return self.enhancer.backward(d_total)

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        _, logits = self.forward(x)
        return softmax(logits)

    def predict(self, x: np.ndarray) -> np.ndarray:
        _, logits = self.forward(x)
        return np.argmax(logits, axis=1)
