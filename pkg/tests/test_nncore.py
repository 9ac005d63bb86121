"""Kernel-level tests: every backward pass against finite differences,
plus hand-computed forward values and optimizer/parameter-layout oracles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fedwsr.errors import DataError, ShapeError
from fedwsr.nncore import (
    AvgPool1D,
    BatchNorm1D,
    Conv1D,
    DepthwiseConv1D,
    GlobalAvgPool,
    Linear,
    ReLU,
    SGDState,
    Tensor,
    flatten_grads,
    flatten_params,
    load_checkpoint,
    load_params,
    mse_loss,
    pointwise,
    save_checkpoint,
    sgd_step,
    softmax,
    softmax_cross_entropy,
)

from conftest import fd_grad, rel_err, rng

FD_TOL = 1e-6  # float64 central differences vs analytic


def scalar_probe(y: np.ndarray, r: np.ndarray) -> float:
    """Fixed random projection turns any output into a scalar loss."""
    return float(np.sum(y * r))


def check_layer_grads(layer, x: np.ndarray, tol: float = FD_TOL) -> None:
    """FD-check d loss/d input and d loss/d params for sum(y * r)."""
    g = rng(99)
    r = g.normal(size=layer.forward(x).shape)

    layer.zero_grad()
    y = layer.forward(x)
    dx = layer.backward(r.copy())

    def loss() -> float:
        return scalar_probe(layer.forward(x), r)

    assert rel_err(dx, fd_grad(loss, x)) < tol, "input gradient mismatch"
    for name, p in layer.named_parameters():
        assert rel_err(p.grad, fd_grad(loss, p.data)) < tol, f"{name} gradient mismatch"


# ---- convolutions ----------------------------------------------------------


def test_conv_hand_case():
    # [1,2,3,4] * [1,1,1] with zero padding -> [3, 6, 9, 7]
    conv = Conv1D(1, 1, kernel=3, bias=False, rng=rng(0))
    conv.weight.data[:] = 1.0
    y = conv.forward(np.array([[[1.0, 2.0, 3.0, 4.0]]]))
    np.testing.assert_allclose(y, [[[3.0, 6.0, 9.0, 7.0]]])


def test_conv_identity_kernel():
    # a Dirac pointwise kernel with identity channel mixing is a no-op
    conv = Conv1D(3, 3, kernel=1, bias=False, rng=rng(0))
    conv.weight.data[:] = np.eye(3).reshape(3, 3, 1)
    x = rng(1).normal(size=(4, 3, 10))
    np.testing.assert_array_equal(conv.forward(x), x)


def test_conv_grads_fd():
    g = rng(2)
    check_layer_grads(Conv1D(3, 4, kernel=3, stride=1, rng=g), g.normal(size=(2, 3, 9)))


def test_conv_strided_grads_fd():
    g = rng(3)
    check_layer_grads(Conv1D(2, 3, kernel=5, stride=2, rng=g), g.normal(size=(2, 2, 11)))


def test_conv_rejects_even_kernel():
    with pytest.raises(ValueError):
        Conv1D(1, 1, kernel=4)


@given(length=st.integers(1, 40), stride=st.integers(1, 4), kernel=st.sampled_from([1, 3, 5, 7]))
@settings(max_examples=40, deadline=None)
def test_conv_output_length_property(length, stride, kernel):
    conv = Conv1D(1, 1, kernel=kernel, stride=stride, rng=rng(0))
    y = conv.forward(np.zeros((1, 1, length)))
    assert y.shape == (1, 1, -(-length // stride))  # ceil(L / stride)


def test_depthwise_dirac_is_identity():
    dw = DepthwiseConv1D(3, kernel=3, bias=False, rng=rng(0))
    dw.weight.data[:] = 0.0
    dw.weight.data[:, 1] = 1.0  # center tap
    x = rng(1).normal(size=(2, 3, 8))
    np.testing.assert_array_equal(dw.forward(x), x)


def test_depthwise_grads_fd():
    g = rng(4)
    check_layer_grads(DepthwiseConv1D(3, kernel=3, stride=1, rng=g), g.normal(size=(2, 3, 7)))


def test_depthwise_strided_grads_fd():
    g = rng(5)
    check_layer_grads(DepthwiseConv1D(2, kernel=3, stride=2, rng=g), g.normal(size=(3, 2, 9)))


def test_depthwise_then_pointwise_equals_full_conv():
    # DW(k) followed by PW(1x1) is a full conv with w[o,i,t] = pw[o,i]*dw[i,t]
    g = rng(6)
    c_in, c_out, k = 3, 4, 5
    dw = DepthwiseConv1D(c_in, kernel=k, stride=2, rng=g)
    pw = pointwise(c_in, c_out, rng=g)
    full = Conv1D(c_in, c_out, kernel=k, stride=2, rng=g)
    full.weight.data[:] = pw.weight.data[:, :, 0, None] * dw.weight.data[None, :, :]
    full.bias.data[:] = pw.weight.data[:, :, 0] @ dw.bias.data + pw.bias.data

    x = g.normal(size=(2, c_in, 12))
    composed = pw.forward(dw.forward(x))
    # stride-2 DW then PW halves length once; matching full conv at stride 2
    np.testing.assert_allclose(composed, full.forward(x), rtol=1e-12, atol=1e-12)


def test_fan_in_init_scale():
    conv = Conv1D(16, 512, kernel=3, rng=rng(7))
    std = conv.weight.data.std()
    assert abs(std - np.sqrt(2.0 / (16 * 3))) < 0.005


# ---- batch norm -------------------------------------------------------------


def test_batchnorm_train_forward_hand():
    bn = BatchNorm1D(1, eps=0.0)
    x = np.array([[[1.0, 3.0]], [[5.0, 7.0]]])  # mean 4, biased var 5
    y = bn.forward(x)
    np.testing.assert_allclose(y, (x - 4.0) / np.sqrt(5.0), rtol=1e-12)


def test_batchnorm_running_stats_update():
    bn = BatchNorm1D(1, momentum=0.5)
    x = np.array([[[1.0, 3.0]], [[5.0, 7.0]]])
    bn.forward(x)
    np.testing.assert_allclose(bn.running_mean, [0.5 * 0.0 + 0.5 * 4.0])
    np.testing.assert_allclose(bn.running_var, [0.5 * 1.0 + 0.5 * 5.0])


def test_batchnorm_train_grads_fd():
    g = rng(8)
    bn = BatchNorm1D(3)
    bn.gamma.data[:] = g.normal(size=3)
    bn.beta.data[:] = g.normal(size=3)
    check_layer_grads(bn, g.normal(size=(4, 3, 5)))


def test_batchnorm_eval_grads_fd():
    g = rng(9)
    bn = BatchNorm1D(2)
    bn.running_mean[:] = g.normal(size=2)
    bn.running_var[:] = g.uniform(0.5, 2.0, size=2)
    bn.eval()
    check_layer_grads(bn, g.normal(size=(3, 2, 4)))


def test_batchnorm_eval_uses_running_stats_only():
    bn = BatchNorm1D(1, eps=0.0)
    bn.running_mean[:] = 2.0
    bn.running_var[:] = 4.0
    bn.eval()
    y = bn.forward(np.array([[[6.0]]]))
    np.testing.assert_allclose(y, [[[2.0]]])  # (6-2)/sqrt(4)


def test_batchnorm_train_rejects_batch_of_one():
    with pytest.raises(ShapeError):
        BatchNorm1D(2).forward(np.zeros((1, 2, 8)))


# ---- simple layers ----------------------------------------------------------


def test_relu_forward_and_grads():
    relu = ReLU()
    x = np.array([[[-1.0, 0.0, 2.0]]])
    np.testing.assert_array_equal(relu.forward(x), [[[0.0, 0.0, 2.0]]])
    dx = relu.backward(np.ones_like(x))
    np.testing.assert_array_equal(dx, [[[0.0, 0.0, 1.0]]])


def test_avgpool_hand_case_and_grads():
    pool = AvgPool1D(2, 2)
    y = pool.forward(np.array([[[1.0, 2.0, 3.0, 4.0]]]))
    np.testing.assert_allclose(y, [[[1.5, 3.5]]])
    check_layer_grads(AvgPool1D(2, 2), rng(10).normal(size=(2, 3, 8)))


def test_global_avgpool_forward_and_grads():
    gap = GlobalAvgPool()
    x = np.array([[[1.0, 2.0, 3.0, 6.0]]])
    np.testing.assert_allclose(gap.forward(x), [[3.0]])
    check_layer_grads(GlobalAvgPool(), rng(11).normal(size=(3, 4, 6)))


def test_linear_grads_fd():
    g = rng(12)
    check_layer_grads(Linear(5, 3, rng=g), g.normal(size=(4, 5)))


def test_linear_no_bias_has_no_bias_parameter():
    fc = Linear(4, 2, bias=False, rng=rng(13))
    assert [name for name, _ in fc.named_parameters()] == ["weight"]


# ---- losses -----------------------------------------------------------------


def test_softmax_rows_sum_to_one_and_is_stable():
    p = softmax(np.array([[1000.0, 1000.0, 998.0], [0.0, 0.0, 0.0]]))
    assert np.all(np.isfinite(p))
    np.testing.assert_allclose(p.sum(axis=1), [1.0, 1.0], rtol=1e-12)


def test_cross_entropy_hand_values():
    # uniform logits over M classes -> ln M
    loss, _ = softmax_cross_entropy(np.zeros((4, 10)), np.arange(4))
    np.testing.assert_allclose(loss, np.log(10.0), rtol=1e-12)
    # two classes, logit gap g: loss = ln(1 + exp(-g))
    loss2, _ = softmax_cross_entropy(np.array([[3.0, 1.0]]), np.array([0]))
    np.testing.assert_allclose(loss2, np.log1p(np.exp(-2.0)), rtol=1e-12)


def test_cross_entropy_gradient_fd():
    g = rng(14)
    logits = g.normal(size=(3, 5))
    labels = np.array([0, 4, 2])
    _, dlogits = softmax_cross_entropy(logits, labels)

    def loss():
        return softmax_cross_entropy(logits, labels)[0]

    assert rel_err(dlogits, fd_grad(loss, logits)) < FD_TOL


def test_cross_entropy_gradient_form():
    logits = rng(15).normal(size=(2, 3))
    labels = np.array([1, 0])
    _, dlogits = softmax_cross_entropy(logits, labels)
    onehot = np.eye(3)[labels]
    np.testing.assert_allclose(dlogits, (softmax(logits) - onehot) / 2.0, rtol=1e-12)


def test_mse_hand_value_and_gradient():
    pred = np.array([[1.0, 2.0], [3.0, 4.0]])
    target = np.zeros((2, 2))
    loss, dpred = mse_loss(pred, target)
    np.testing.assert_allclose(loss, (1 + 4 + 9 + 16) / 4.0)
    np.testing.assert_allclose(dpred, 2.0 * pred / 4.0)


def test_cross_entropy_rejects_bad_labels():
    with pytest.raises(ValueError):
        softmax_cross_entropy(np.zeros((2, 3)), np.array([0, 3]))


# ---- optimizer --------------------------------------------------------------


def test_sgd_two_step_momentum_recurrence():
    # constant gradient g, no decay: after 2 steps p = p0 - lr*(2 + m)*g
    p = np.array([1.0, -2.0])
    grad = np.array([0.5, 0.25])
    state = SGDState(lr=0.1, momentum=0.9, weight_decay=0.0)
    p1 = sgd_step(p, grad, state)
    np.testing.assert_allclose(p1, p - 0.1 * grad)
    p2 = sgd_step(p1, grad, state)
    np.testing.assert_allclose(p2, p - 0.1 * (2.0 + 0.9) * grad, rtol=1e-12)


def test_sgd_weight_decay_respects_mask():
    p = np.array([1.0, 1.0])
    state = SGDState(lr=1.0, momentum=0.0, weight_decay=0.1,
                     decay_mask=np.array([True, False]))
    p1 = sgd_step(p, np.zeros(2), state)
    np.testing.assert_allclose(p1, [1.0 - 0.1, 1.0])


def test_decay_mask_excludes_biases_and_norm_params():
    from fedwsr.nncore import Module

    class Net(Module):
        def __init__(self):
            super().__init__()
            self.conv = Conv1D(2, 3, kernel=3, rng=rng(16))
            self.bn = BatchNorm1D(3)

    vec = flatten_params(Net())
    by_name = {e.name: e for e in vec.layout}
    assert by_name["conv.weight"].decay
    assert not by_name["conv.bias"].decay
    assert not by_name["bn.gamma"].decay
    assert not by_name["bn.beta"].decay


# ---- flat parameter views ---------------------------------------------------


def _small_model():
    from fedwsr.nncore import Module

    class Net(Module):
        def __init__(self, seed=0):
            super().__init__()
            g = rng(seed)
            self.conv = Conv1D(2, 4, kernel=3, rng=g)
            self.bn = BatchNorm1D(4)
            self.fc = Linear(4, 3, rng=g)

    return Net()


def test_flatten_load_roundtrip_with_state():
    model = _small_model()
    model.bn.running_mean[:] = 7.0
    vec = flatten_params(model, with_state=True)
    other = _small_model()
    load_params(other, vec)
    np.testing.assert_array_equal(flatten_params(other, with_state=True).values, vec.values)
    np.testing.assert_array_equal(other.bn.running_mean, model.bn.running_mean)


def test_flatten_grads_matches_layout_order():
    model = _small_model()
    model.zero_grad()
    for _, p in model.named_parameters():
        p.grad[:] = 1.0
    grads = flatten_grads(model)
    vec = flatten_params(model)
    assert grads.size == vec.trainable_size == len(vec)
    np.testing.assert_array_equal(grads, np.ones(len(vec)))


def test_load_params_rejects_foreign_layout():
    model = _small_model()
    other = Linear(3, 2, rng=rng(17))
    with pytest.raises(ValueError):
        load_params(other, flatten_params(model))


def test_trainable_mask_excludes_buffers():
    model = _small_model()
    vec = flatten_params(model, with_state=True)
    mask = vec.trainable_mask()
    assert mask.sum() == vec.trainable_size
    assert len(vec) - mask.sum() == model.bn.running_mean.size + model.bn.running_var.size


# ---- checkpoints ------------------------------------------------------------


def test_checkpoint_roundtrip(tmp_path):
    model = _small_model()
    vec = flatten_params(model, with_state=True)
    path = tmp_path / "m.fwsp"
    save_checkpoint(path, vec, "digest-abc")
    loaded, digest = load_checkpoint(path)
    assert digest == "digest-abc"
    np.testing.assert_array_equal(loaded.values, vec.values.astype(np.float32))
    assert [e.name for e in loaded.layout] == [e.name for e in vec.layout]


def test_checkpoint_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.fwsp"
    path.write_bytes(b"NOPE" + bytes(64))
    with pytest.raises(DataError):
        load_checkpoint(path)


def test_tensor_zero_grad():
    t = Tensor(np.ones(3))
    t.grad += 5.0
    t.zero_grad()
    np.testing.assert_array_equal(t.grad, np.zeros(3))
