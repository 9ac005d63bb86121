"""SGD with momentum and selective weight decay, acting on flat vectors."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .params import ParamVector


@dataclass
class SGDState:
    """Optimizer hyperparameters plus the per-parameter velocity buffer.

    Weight decay applies only where ``decay_mask`` is set (convolution and
    linear weights); normalization scales/shifts and biases are excluded.
    """

    lr: float
    momentum: float = 0.9
    weight_decay: float = 0.0005
    decay_mask: np.ndarray | None = None
    velocity: np.ndarray = field(default=None)

    @classmethod
    def for_vector(cls, vector: ParamVector, lr: float, momentum: float = 0.9,
                   weight_decay: float = 0.0005) -> "SGDState":
        state = cls(lr=lr, momentum=momentum, weight_decay=weight_decay,
                    decay_mask=vector.decay_mask())
        state.velocity = np.zeros(len(vector), dtype=vector.values.dtype)
        return state


def sgd_step(params: np.ndarray, grads: np.ndarray, state: SGDState) -> np.ndarray:
    """One momentum-SGD update; returns the new parameter vector.

    v <- momentum * v + grad + weight_decay * param  (decayable entries)
    param <- param - lr * v
    """
    if params.shape != grads.shape:
        raise ValueError(f"param/grad shape mismatch: {params.shape} vs {grads.shape}")
    if state.velocity is None:
        state.velocity = np.zeros_like(params)
    if state.velocity.shape != params.shape:
        raise ValueError("optimizer state does not match parameter layout")
    g = grads
    if state.weight_decay != 0.0 and state.decay_mask is not None:
        g = grads + np.where(state.decay_mask, state.weight_decay * params, 0.0)
    elif state.weight_decay != 0.0:
        g = grads + state.weight_decay * params
    state.velocity *= state.momentum
    state.velocity += g
    return params - state.lr * state.velocity
