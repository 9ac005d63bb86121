"""Mini-batch SGD driver shared by centralized and federated training.

``run_epochs`` is the single code path both the centralized trainer and a
federated client's local update go through, which is what makes "one
FedAvg round with a single client" bit-identical to the same number of
centralized epochs.  The RNG is consumed only for the per-epoch shuffle,
so driving it one epoch at a time (as the CLI does, to log between
epochs) produces the same trajectory as one multi-epoch call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericError
from .models import JointLossCfg, WSERNet, WSRNet, joint_loss
from .nncore import (
    SGDState,
    flatten_grads,
    flatten_params,
    load_params,
    sgd_step,
    softmax_cross_entropy,
)

EVAL_BATCH = 512


class RecognitionTask:
    """WSRNet trained with cross-entropy on the noisy frames."""

    def __init__(self, model: WSRNet):
        self.model = model

    def loss_batch(self, xb: np.ndarray, sb, yb: np.ndarray) -> float:
        logits = self.model(xb)
        loss, d_logits = softmax_cross_entropy(logits, yb)
        self.model.backward(d_logits)
        return loss

    def predict(self, xb: np.ndarray) -> np.ndarray:
        return self.model.predict(xb)


class JointTask:
    """WSERNet trained with the joint enhancement + recognition loss."""

    def __init__(self, model: WSERNet, loss_cfg: JointLossCfg):
        self.model = model
        self.loss_cfg = loss_cfg

    def loss_batch(self, xb: np.ndarray, sb: np.ndarray, yb: np.ndarray) -> float:
        if sb is None:
            raise ValueError("JointTask needs clean targets s_star")
        s_hat, logits = self.model(xb)
        loss, _, _, d_s_hat, d_logits = joint_loss(s_hat, sb, logits, yb, self.loss_cfg)
        self.model.backward(d_s_hat, d_logits)
        return loss

    def predict(self, xb: np.ndarray) -> np.ndarray:
        return self.model.predict(xb)


def _batch_bounds(n: int, batch_size: int) -> list[int]:
    """Split points for sequential batches; a trailing singleton is folded
    into the previous batch so batch-norm always sees >= 2 samples."""
    bounds = list(range(0, n, batch_size)) + [n]
    if len(bounds) >= 3 and bounds[-1] - bounds[-2] == 1:
        del bounds[-2]
    return bounds


def run_epochs(
    task,
    x: np.ndarray,
    s: np.ndarray | None,
    y: np.ndarray,
    *,
    epochs: int,
    batch_size: int,
    opt: SGDState,
    rng: np.random.Generator,
    mu: float = 0.0,
    anchor: np.ndarray | None = None,
) -> list[float]:
    """Run shuffled mini-batch SGD epochs; return per-epoch mean losses.

    With ``mu > 0`` each step's gradient gains the proximal pull
    ``mu * (w - anchor)`` over the trainable parameters (the anchor is the
    round's broadcast weights in federated training).
    """
    n = x.shape[0]
    if n == 0:
        raise ValueError("empty training set")
    if mu != 0.0 and anchor is None:
        raise ValueError("a proximal term needs an anchor vector")
    model = task.model
    model.train()
    params = flatten_params(model)
    values = params.values
    bounds = _batch_bounds(n, batch_size)
    epoch_losses = []
    for _ in range(epochs):
        perm = rng.permutation(n)
        total = 0.0
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            idx = perm[lo:hi]
            xb = x[idx]
            sb = s[idx] if s is not None else None
            yb = y[idx]
            model.zero_grad()
            loss = task.loss_batch(xb, sb, yb)
            if not np.isfinite(loss):
                raise NumericError(f"non-finite training loss ({loss})")
            grads = flatten_grads(model)
            if mu != 0.0:
                grads = grads + mu * (values - anchor)
            values = sgd_step(values, grads, opt)
            load_params(model, params.with_values(values))
            total += loss * idx.size
        epoch_losses.append(total / n)
    return epoch_losses


def predict_in_batches(task, x: np.ndarray, batch_size: int = EVAL_BATCH) -> np.ndarray:
    """Eval-mode predictions; batch composition cannot change the result."""
    task.model.eval()
    out = [task.predict(x[lo : lo + batch_size]) for lo in range(0, x.shape[0], batch_size)]
    return np.concatenate(out)


def evaluate_accuracy(task, x: np.ndarray, y: np.ndarray, batch_size: int = EVAL_BATCH) -> float:
    if x.shape[0] == 0:
        raise ValueError("cannot evaluate on an empty dataset")
    return float(np.mean(predict_in_batches(task, x, batch_size) == y))


@dataclass(frozen=True)
class EpochRow:
    epoch: int
    train_loss: float
    train_accuracy: float
    test_accuracy: float


def train_centralized(
    task,
    train_xy: tuple[np.ndarray, np.ndarray | None, np.ndarray],
    test_xy: tuple[np.ndarray, np.ndarray],
    *,
    epochs: int,
    batch_size: int,
    lr: float,
    momentum: float = 0.9,
    weight_decay: float = 0.0005,
    rng: np.random.Generator,
    stop_when=None,
) -> list[EpochRow]:
    """Centralized training with per-epoch telemetry.

    ``stop_when(row)`` may end training early (e.g., on reaching a target
    accuracy); the optimizer's velocity persists across epochs.
    """
    x, s, y = train_xy
    x_test, y_test = test_xy
    vec = flatten_params(task.model)
    opt = SGDState.for_vector(vec, lr=lr, momentum=momentum, weight_decay=weight_decay)
    rows = []
    for epoch in range(epochs):
        (loss,) = run_epochs(
            task, x, s, y, epochs=1, batch_size=batch_size, opt=opt, rng=rng
        )
        train_acc = evaluate_accuracy(task, x, y)
        test_acc = evaluate_accuracy(task, x_test, y_test)
        row = EpochRow(epoch, loss, train_acc, test_acc)
        rows.append(row)
        if stop_when is not None and stop_when(row):
            break
    return rows
