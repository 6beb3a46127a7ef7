"""
Tests for the numerical core: kernels, layers, optimizers and model files.

Gradient checks run in float64 against central finite differences.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from app.nn import ops
from app.nn.gradcheck import numerical_gradient, relative_error
from app.nn.layers import Conv2D, Dense, Fire, ReLU, Softmax
from app.nn.network import Sequential, parameter_count
from app.nn.optim import AdamState, TrainingDivergedError, adam_step, clip_by_global_norm, decayed_lr, sgd_step
from app.nn.serialization import (
    ModelShapeError,
    ModelTruncatedError,
    ModelVersionError,
    load_model,
    read_model_file,
    register_architecture,
    save_model,
)

SMOOTH_TOL = 1e-6


def _projection(rng, shape):
    """Random weights turning an output tensor into a scalar loss."""
    return rng.standard_normal(shape)


# ---------------------------------------------------------------------------
# conv2d
# ---------------------------------------------------------------------------

def test_conv_identity_kernel():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((2, 5, 7, 3)).astype(np.float32)
    w = np.eye(3, dtype=np.float32).reshape(1, 1, 3, 3)
    out, _ = ops.conv2d_forward(x, w, np.zeros(3, dtype=np.float32))
    assert_array_equal(out, x)


def test_conv_same_padding_stride_two_halves_width():
    x = np.ones((1, 16, 16, 2))
    w = np.ones((3, 3, 2, 4))
    out, _ = ops.conv2d_forward(x, w, np.zeros(4), stride=2, padding="same")
    assert out.shape == (1, 8, 8, 4)


def test_conv_valid_padding_shrinks():
    out, _ = ops.conv2d_forward(np.ones((1, 5, 7, 1)), np.ones((3, 3, 1, 1)), np.zeros(1), padding="valid")
    assert out.shape == (1, 3, 5, 1)
    assert_allclose(out, 9.0)


def test_conv_channel_mismatch_names_both_shapes():
    with pytest.raises(ops.ShapeError) as exc:
        ops.conv2d_forward(np.ones((1, 4, 4, 3)), np.ones((3, 3, 2, 1)), np.zeros(1))
    assert "(1, 4, 4, 3)" in str(exc.value) and "(3, 3, 2, 1)" in str(exc.value)


@pytest.mark.parametrize("seed", range(20))
def test_conv_gradients_match_finite_differences(seed):
    rng = np.random.default_rng(seed)
    h, wd, cin, cout = rng.integers(2, 7), rng.integers(2, 8), rng.integers(1, 4), rng.integers(1, 4)
    k = int(rng.choice([1, 3]))
    stride = int(rng.choice([1, 2]))
    x = rng.standard_normal((2, h, wd, cin))
    w = rng.standard_normal((k, k, cin, cout))
    b = rng.standard_normal(cout)

    out, cache = ops.conv2d_forward(x, w, b, stride=stride)
    r = _projection(rng, out.shape)
    dx, dw, db = ops.conv2d_backward(r, cache)

    def loss():
        return float(np.sum(ops.conv2d_forward(x, w, b, stride=stride)[0] * r))

    assert relative_error(dx, numerical_gradient(loss, x)) < SMOOTH_TOL
    assert relative_error(dw, numerical_gradient(loss, w)) < SMOOTH_TOL
    assert relative_error(db, numerical_gradient(loss, b)) < SMOOTH_TOL


def test_conv_gradient_on_documented_shape():
    rng = np.random.default_rng(42)
    x = rng.standard_normal((1, 5, 7, 3))
    w = rng.standard_normal((3, 3, 3, 4))
    b = np.zeros(4)
    out, cache = ops.conv2d_forward(x, w, b)
    r = _projection(rng, out.shape)
    dx, _, _ = ops.conv2d_backward(r, cache)
    numeric = numerical_gradient(lambda: float(np.sum(ops.conv2d_forward(x, w, b)[0] * r)), x)
    assert relative_error(dx, numeric) < SMOOTH_TOL


# ---------------------------------------------------------------------------
# maxpool
# ---------------------------------------------------------------------------

def test_maxpool_constant_input():
    out, _ = ops.maxpool_forward(np.full((1, 6, 9, 2), 3.5))
    assert out.shape == (1, 3, 5, 2)
    assert_array_equal(out, 3.5)


def test_maxpool_topology_heights():
    x = np.zeros((1, 16, 20, 1))
    once, _ = ops.maxpool_forward(x)
    twice, _ = ops.maxpool_forward(once)
    assert once.shape[1] == 8 and twice.shape[1] == 4


def test_maxpool_ties_route_to_first_position():
    x = np.ones((1, 3, 3, 1))
    out, cache = ops.maxpool_forward(x, kernel=3, stride=2, padding="valid")
    dx = ops.maxpool_backward(np.ones_like(out), cache)
    expected = np.zeros_like(x)
    expected[0, 0, 0, 0] = 1.0
    assert_array_equal(dx, expected)


@pytest.mark.parametrize("seed", range(20))
def test_maxpool_gradients_away_from_ties(seed):
    rng = np.random.default_rng(seed)
    shape = (2, int(rng.integers(2, 9)), int(rng.integers(2, 9)), int(rng.integers(1, 4)))
    # distinct values spaced far beyond eps, so no window has a tie
    x = (rng.permutation(int(np.prod(shape))) * 0.1).reshape(shape).astype(np.float64)
    out, cache = ops.maxpool_forward(x)
    r = _projection(rng, out.shape)
    dx = ops.maxpool_backward(r, cache)
    numeric = numerical_gradient(lambda: float(np.sum(ops.maxpool_forward(x)[0] * r)), x)
    assert relative_error(dx, numeric) < SMOOTH_TOL


# ---------------------------------------------------------------------------
# dense, relu, softmax, dropout, concat
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("seed", range(20))
def test_dense_gradients(seed):
    rng = np.random.default_rng(seed)
    n, fin, fout = rng.integers(1, 5), rng.integers(1, 9), rng.integers(1, 9)
    x = rng.standard_normal((n, fin))
    w = rng.standard_normal((fin, fout))
    b = rng.standard_normal(fout)
    out, cache = ops.dense_forward(x, w, b)
    r = _projection(rng, out.shape)
    dx, dw, db = ops.dense_backward(r, cache)

    def loss():
        return float(np.sum(ops.dense_forward(x, w, b)[0] * r))

    assert relative_error(dx, numerical_gradient(loss, x)) < SMOOTH_TOL
    assert relative_error(dw, numerical_gradient(loss, w)) < SMOOTH_TOL
    assert relative_error(db, numerical_gradient(loss, b)) < SMOOTH_TOL


def test_relu_gradient_away_from_kink():
    rng = np.random.default_rng(1)
    x = rng.standard_normal((3, 7))
    x[np.abs(x) < 1e-2] = 0.5
    out, cache = ops.relu_forward(x)
    r = _projection(rng, out.shape)
    dx = ops.relu_backward(r, cache)
    numeric = numerical_gradient(lambda: float(np.sum(ops.relu_forward(x)[0] * r)), x)
    assert relative_error(dx, numeric) < SMOOTH_TOL


def test_softmax_uniform_over_thirteen_classes():
    out = ops.softmax(np.full((2, 13), 4.2))
    assert_allclose(out, 1.0 / 13)


def test_softmax_stable_for_large_logits():
    out = ops.softmax(np.array([[1e4, -1e4, 0.0], [-1e4, -1e4, -1e4]]))
    assert np.all(np.isfinite(out))
    assert_allclose(out.sum(axis=1), 1.0, atol=1e-6)
    assert_allclose(out[0], [1.0, 0.0, 0.0])


@pytest.mark.parametrize("seed", range(20))
def test_softmax_gradients(seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((int(rng.integers(1, 4)), int(rng.integers(2, 14))))
    out, cache = ops.softmax_forward(x)
    assert_allclose(out.sum(axis=1), 1.0, atol=1e-6)
    r = _projection(rng, out.shape)
    dx = ops.softmax_backward(r, cache)
    numeric = numerical_gradient(lambda: float(np.sum(ops.softmax_forward(x)[0] * r)), x)
    assert relative_error(dx, numeric) < SMOOTH_TOL


def test_softmax_cross_entropy_gradient():
    rng = np.random.default_rng(5)
    logits = rng.standard_normal((6, 13))
    labels = rng.integers(0, 13, size=6)
    _, dlogits = ops.softmax_cross_entropy(logits, labels)
    numeric = numerical_gradient(lambda: ops.softmax_cross_entropy(logits, labels)[0], logits)
    assert relative_error(dlogits, numeric) < SMOOTH_TOL


def test_dropout_rate_zero_is_identity():
    x = np.random.default_rng(0).standard_normal((4, 5))
    out, _ = ops.dropout_forward(x, 0.0, np.random.default_rng(1), training=True)
    assert_array_equal(out, x)


def test_dropout_is_identity_at_inference():
    x = np.random.default_rng(0).standard_normal((4, 5))
    out, _ = ops.dropout_forward(x, 0.5, np.random.default_rng(1), training=False)
    assert_array_equal(out, x)


def test_dropout_scales_survivors():
    x = np.ones((50, 50))
    out, _ = ops.dropout_forward(x, 0.5, np.random.default_rng(3), training=True)
    assert set(np.unique(out)) <= {0.0, 2.0}


def test_dropout_rejects_rate_one():
    with pytest.raises(ValueError):
        ops.dropout_forward(np.ones(3), 1.0, np.random.default_rng(0), training=True)


def test_dropout_gradient_with_fixed_mask():
    rng = np.random.default_rng(2)
    x = rng.standard_normal((3, 8))
    r = _projection(rng, x.shape)
    _, mask = ops.dropout_forward(x, 0.3, np.random.default_rng(9), training=True)
    dx = ops.dropout_backward(r, mask)

    def loss():
        return float(np.sum(ops.dropout_forward(x, 0.3, np.random.default_rng(9), training=True)[0] * r))

    assert relative_error(dx, numerical_gradient(loss, x)) < SMOOTH_TOL


def test_concat_gradient_and_mismatch():
    rng = np.random.default_rng(4)
    a = rng.standard_normal((1, 3, 4, 2))
    b = rng.standard_normal((1, 3, 4, 5))
    out, split = ops.channel_concat_forward(a, b)
    assert out.shape == (1, 3, 4, 7)
    r = _projection(rng, out.shape)
    da, db = ops.channel_concat_backward(r, split)
    numeric_a = numerical_gradient(lambda: float(np.sum(ops.channel_concat_forward(a, b)[0] * r)), a)
    assert relative_error(da, numeric_a) < SMOOTH_TOL
    assert_array_equal(db, r[..., 2:])

    with pytest.raises(ops.ShapeError):
        ops.channel_concat_forward(a, rng.standard_normal((1, 2, 4, 5)))


# ---------------------------------------------------------------------------
# layers
# ---------------------------------------------------------------------------

def test_fire_output_channels_match_expand_counts():
    fire = Fire(64, 16, 64, 64)
    out = fire.forward(np.random.default_rng(0).standard_normal((1, 16, 8, 64)).astype(np.float32))
    assert out.shape == (1, 16, 8, 128)
    assert fire.out_channels == 128


def test_fire_zero_input_gives_zero_output():
    fire = Fire(3, 2, 3, 3)
    assert_array_equal(fire.forward(np.zeros((1, 4, 5, 3), dtype=np.float32)), 0.0)


def test_fire_rejects_empty_input():
    with pytest.raises(ValueError):
        Fire(0, 2, 3, 3)


def _fire_clear_of_kinks(seed):
    """Draw a tiny fire layer and input whose pre-activations all sit away from zero."""
    for attempt in range(100):
        rng = np.random.default_rng(seed * 1000 + attempt)
        fire = Fire(2, 2, 3, 3, rng=rng).astype(np.float64)
        for conv in fire.sublayers().values():
            conv.params["b"] = rng.standard_normal(conv.params["b"].shape)
        x = rng.standard_normal((1, 4, 5, 2))
        fire.forward(x)
        if min(float(np.min(np.abs(relu.last_input))) for relu in fire.relus()) > 1e-2:
            return rng, fire, x
    pytest.skip("no kink-free draw found")


@pytest.mark.parametrize("seed", range(5))
def test_fire_gradients(seed):
    rng, fire, x = _fire_clear_of_kinks(seed)
    out = fire.forward(x)
    r = _projection(rng, out.shape)
    dx = fire.backward(r)
    analytic = fire.named_gradients()

    def loss():
        return float(np.sum(fire.forward(x) * r))

    assert relative_error(dx, numerical_gradient(loss, x)) < SMOOTH_TOL
    for name, param in fire.named_parameters().items():
        assert relative_error(analytic[name], numerical_gradient(loss, param)) < SMOOTH_TOL, name


def test_conv_layer_custom_init_std():
    conv = Conv2D(4, 8, 3, rng=np.random.default_rng(0), init_std=1e-4)
    assert float(np.std(conv.params["w"])) < 1e-3
    assert conv.params["w"].dtype == np.float32


def _shallow(hidden=(50, 30), rng=None, descriptor=None):
    rng = rng or np.random.default_rng(0)
    sizes = (85,) + tuple(hidden) + (13,)
    layers = []
    for i, (fin, fout) in enumerate(zip(sizes[:-1], sizes[1:])):
        layers.append((f"dense{i + 1}", Dense(fin, fout, rng=rng)))
        if i < len(sizes) - 2:
            layers.append((f"relu{i + 1}", ReLU()))
    layers.append(("softmax", Softmax()))
    return Sequential(layers, descriptor or {"kind": "toy-mlp", "hidden": list(hidden)})


def test_shallow_parameter_count():
    assert parameter_count(_shallow()) == 85 * 50 + 50 + 50 * 30 + 30 + 30 * 13 + 13 == 6233


def test_sequential_rows_sum_to_one():
    net = _shallow()
    x = (np.random.default_rng(1).random((4, 85)) > 0.8).astype(np.float32)
    assert_allclose(net.forward(x).sum(axis=1), 1.0, atol=1e-6)


def test_sequential_rejects_non_finite_input():
    net = _shallow()
    x = np.zeros((2, 85), dtype=np.float32)
    x[1, 3] = np.nan
    with pytest.raises(ops.NonFiniteError, match="forward output"):
        net.forward(x)
    with pytest.raises(ops.NonFiniteError, match="logits"):
        net.forward_logits(x, training=True)


def test_sequential_rejects_non_finite_gradient():
    net = _shallow()
    net.forward_logits(np.ones((2, 85), dtype=np.float32), training=True)
    dlogits = np.zeros((2, 13), dtype=np.float32)
    dlogits[0, 0] = np.inf
    with pytest.raises(ops.NonFiniteError, match="input gradient"):
        net.backward_logits(dlogits)


def test_sequential_rejects_duplicate_names():
    with pytest.raises(ValueError):
        Sequential([("a", ReLU()), ("a", ReLU())], {"kind": "x"})


# ---------------------------------------------------------------------------
# optimizers
# ---------------------------------------------------------------------------

def test_sgd_single_step():
    params = {"p": np.array([1.0], dtype=np.float32)}
    sgd_step(params, {"p": np.array([1.0], dtype=np.float32)}, lr=0.01, decay=0.0, step=0)
    assert_allclose(params["p"], [0.99], rtol=1e-6)


def test_decayed_lr_at_step_ten_thousand():
    assert decayed_lr(0.01, 1e-4, 10000) == pytest.approx(0.005)


def test_zero_gradient_leaves_parameters_unchanged():
    before = np.random.default_rng(0).standard_normal((3, 4))
    params = {"w": before.copy()}
    sgd_step(params, {"w": np.zeros((3, 4))}, lr=0.1, decay=1e-4, step=7)
    assert_array_equal(params["w"], before)

    state = AdamState()
    adam_step(params, {"w": np.zeros((3, 4))}, state)
    assert_array_equal(params["w"], before)


def test_sgd_rejects_non_positive_lr():
    with pytest.raises(ValueError):
        sgd_step({"p": np.ones(1)}, {"p": np.ones(1)}, lr=0.0)


def test_sgd_momentum_accumulates_velocity():
    params = {"p": np.array([1.0])}
    velocity = {}
    sgd_step(params, {"p": np.array([1.0])}, lr=0.1, momentum=0.9, velocity=velocity)
    sgd_step(params, {"p": np.array([1.0])}, lr=0.1, momentum=0.9, velocity=velocity)
    # v1 = -0.1, v2 = 0.9 * -0.1 - 0.1 = -0.19
    assert_allclose(params["p"], [1.0 - 0.1 - 0.19])


def test_adam_first_step_moves_by_learning_rate():
    params = {"p": np.array([1.0, 1.0])}
    state = AdamState()
    adam_step(params, {"p": np.array([0.5, -2.0])}, state, lr=0.001)
    assert state.step == 1
    assert_allclose(params["p"], [0.999, 1.001], atol=1e-6)


def test_non_finite_gradient_aborts_with_step():
    params = {"p": np.ones(2)}
    with pytest.raises(TrainingDivergedError) as exc:
        sgd_step(params, {"p": np.array([1.0, np.nan])}, lr=0.01, step=12)
    assert exc.value.step == 12
    assert "step 12" in str(exc.value)
    assert_array_equal(params["p"], 1.0)


def test_clip_by_global_norm():
    grads = {"a": np.array([3.0]), "b": np.array([4.0])}
    norm = clip_by_global_norm(grads, 1.0)
    assert norm == pytest.approx(5.0)
    assert_allclose([grads["a"][0], grads["b"][0]], [0.6, 0.8])


# ---------------------------------------------------------------------------
# model files
# ---------------------------------------------------------------------------

register_architecture("toy-mlp", lambda descriptor: _shallow(tuple(descriptor["hidden"]), descriptor=descriptor))


def test_save_then_load_is_bit_identical(tmp_path):
    net = _shallow(rng=np.random.default_rng(11))
    path = tmp_path / "toy.dkrt"
    size = save_model(net, path)
    assert size == path.stat().st_size
    assert size > 6233 * 4

    loaded = load_model(path)
    assert loaded.descriptor() == net.descriptor()
    original = net.parameters()
    for name, tensor in loaded.parameters().items():
        assert tensor.dtype == np.float32
        assert_array_equal(tensor, original[name])


def test_read_model_file_starts_with_magic(tmp_path):
    path = tmp_path / "toy.dkrt"
    save_model(_shallow(), path)
    assert path.read_bytes()[:4] == b"DKRT"
    descriptor, tensors = read_model_file(path)
    assert descriptor["kind"] == "toy-mlp"
    assert tensors["dense1.w"].shape == (85, 50)


def test_corrupted_magic_is_a_version_error(tmp_path):
    path = tmp_path / "toy.dkrt"
    save_model(_shallow(), path)
    data = bytearray(path.read_bytes())
    data[0:4] = b"XXXX"
    path.write_bytes(bytes(data))
    with pytest.raises(ModelVersionError):
        load_model(path)


def test_unsupported_version_is_a_version_error(tmp_path):
    path = tmp_path / "toy.dkrt"
    save_model(_shallow(), path)
    data = bytearray(path.read_bytes())
    data[4:6] = (99).to_bytes(2, "little")
    path.write_bytes(bytes(data))
    with pytest.raises(ModelVersionError):
        load_model(path)


def test_truncated_file(tmp_path):
    path = tmp_path / "toy.dkrt"
    save_model(_shallow(), path)
    path.write_bytes(path.read_bytes()[:-10])
    with pytest.raises(ModelTruncatedError):
        load_model(path)


def test_shape_disagreement(tmp_path):
    # weights for hidden sizes (50, 30) under a descriptor that claims (40, 30)
    net = _shallow(descriptor={"kind": "toy-mlp", "hidden": [40, 30]})
    path = tmp_path / "toy.dkrt"
    save_model(net, path)
    with pytest.raises(ModelShapeError):
        load_model(path)


def test_missing_model_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_model(tmp_path / "absent.dkrt")
