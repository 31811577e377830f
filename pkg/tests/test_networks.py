import numpy as np
import pytest

from isacsim import autodiff as ad
from isacsim.networks import (
    CHECKPOINT_MAGIC,
    SIGMA_FLOOR,
    Mlp,
    adam_init,
    adam_step,
    detach_parameters,
    forward,
    init,
    lift_parameters,
    param_count,
    parameters,
    read_checkpoint,
    write_checkpoint,
)
from isacsim.rng import Rng


def test_param_count_formula():
    assert param_count([4, 16, 16, 32, 32]) == (
        4 * 16 + 16 + 16 * 16 + 16 + 16 * 32 + 32 + 32 * 32 + 32
    )
    assert param_count([4, 16, 16, 32, 32]) == 1952
    assert param_count([3, 2]) == 8
    assert param_count([2, 3, 1]) == 13


def test_init_shapes_and_glorot_bounds():
    net = init(Rng(0), (4, 16, 8), "linear")
    assert [w.shape for w in net.weights] == [(4, 16), (16, 8)]
    assert [b.shape for b in net.biases] == [(16,), (8,)]
    assert all(np.all(b == 0.0) for b in net.biases)
    for w, (d_in, d_out) in zip(net.weights, [(4, 16), (16, 8)]):
        limit = np.sqrt(6.0 / (d_in + d_out))
        assert np.all(np.abs(w) <= limit)
    # uniform over +-limit: sample variance close to limit^2/3
    wide = init(Rng(1), (256, 256), "linear").weights[0]
    limit = np.sqrt(6.0 / 512)
    assert abs(np.var(wide) - limit**2 / 3) < 0.05 * limit**2 / 3


def test_init_is_deterministic_per_stream():
    a = init(Rng(3), (4, 8, 2))
    b = init(Rng(3), (4, 8, 2))
    assert all(np.array_equal(x, y) for x, y in zip(a.weights, b.weights))
    c = init(Rng(4), (4, 8, 2))
    assert not np.array_equal(a.weights[0], c.weights[0])


def test_mlp_validation():
    with pytest.raises(ValueError):
        Mlp((4,), [], [], "linear")
    with pytest.raises(ValueError):
        init(Rng(0), (4, 8), "swish")
    net = init(Rng(0), (4, 8), "linear")
    with pytest.raises(ValueError):
        forward(net, np.zeros((2, 5)))


def test_forward_zero_weights_hits_activation_fixed_points():
    dims = (6, 8, 4)
    x = np.random.default_rng(0).normal(size=(10, 6))

    def zeroed(act):
        net = init(Rng(0), dims, act)
        net.weights = [np.zeros_like(w) for w in net.weights]
        return net

    assert np.allclose(forward(zeroed("linear"), x), 0.0)
    assert np.allclose(forward(zeroed("sigmoid"), x), 0.5)
    assert np.allclose(forward(zeroed("softmax"), x), 0.25)
    assert np.allclose(forward(zeroed("scaled-tanh"), x), 0.0)
    assert np.allclose(forward(zeroed("relu-floor"), x), SIGMA_FLOOR)


def test_forward_output_ranges():
    x = np.random.default_rng(1).normal(size=(50, 4)) * 5
    assert np.all(np.abs(forward(init(Rng(2), (4, 8, 3), "scaled-tanh"), x)) <= np.pi / 2)
    s = forward(init(Rng(2), (4, 8, 3), "sigmoid"), x)
    assert np.all((s > 0) & (s < 1))
    u = forward(init(Rng(2), (4, 8, 1), "relu-floor"), x)
    assert np.all(u >= SIGMA_FLOOR)
    p = forward(init(Rng(2), (4, 8, 5), "softmax"), x)
    np.testing.assert_allclose(p.sum(axis=-1), 1.0, rtol=1e-12)


def test_forward_single_hidden_relu():
    # hand-computed two-layer net
    net = Mlp(
        (1, 2, 1),
        [np.array([[1.0, -1.0]]), np.array([[1.0], [1.0]])],
        [np.zeros(2), np.zeros(1)],
        "linear",
    )
    # x>0: relu([x,-x]) = [x,0] -> x;   x<0: [0,-x] -> -x; net computes |x|
    x = np.array([[2.0], [-3.0], [0.5]])
    np.testing.assert_allclose(forward(net, x), [[2.0], [3.0], [0.5]])


@pytest.mark.parametrize("act", ["linear", "sigmoid", "scaled-tanh", "relu-floor", "softmax"])
def test_forward_gradients_match_finite_differences(act):
    d_out = 1 if act in ("sigmoid", "relu-floor") else 3
    net = init(Rng(7), (4, 6, d_out), act)
    x = np.random.default_rng(7).normal(size=(5, 4))
    w = np.random.default_rng(8).normal(size=(5, d_out))

    def loss_value():
        return float(np.sum(forward(net, x) * w))

    params = lift_parameters([net])
    loss = ad.tsum(ad.mul(forward(net, x), w))
    loss.backward()
    grads = [p.grad.copy() if p.grad is not None else np.zeros_like(p.data) for p in params]
    detach_parameters([net])

    h = 1e-5
    for p, g in zip(parameters(net), grads):
        flat = p.reshape(-1)
        for i in range(0, flat.size, max(1, flat.size // 7)):
            orig = flat[i]
            flat[i] = orig + h
            up = loss_value()
            flat[i] = orig - h
            dn = loss_value()
            flat[i] = orig
            fd = (up - dn) / (2 * h)
            assert abs(g.reshape(-1)[i] - fd) <= 1e-5 * max(1.0, abs(fd))


def test_lift_and_detach_roundtrip():
    net = init(Rng(9), (3, 5, 2))
    raw = [w.copy() for w in net.weights]
    params = lift_parameters([net])
    assert all(isinstance(p, ad.Tensor) and p.requires_grad for p in params)
    # idempotent
    again = lift_parameters([net])
    assert all(a is b for a, b in zip(params, again))
    detach_parameters([net])
    assert all(isinstance(w, np.ndarray) for w in net.weights)
    assert all(np.array_equal(a, b) for a, b in zip(net.weights, raw))


def test_adam_first_step_magnitude():
    # bias correction makes the first step lr * g / (|g| + eps)
    p = np.array([0.0, 0.0])
    state = adam_init([p], learning_rate=0.01)
    adam_step(state, [p], [np.array([1.0, -3.0])])
    np.testing.assert_allclose(
        p, [-0.01 / (1.0 + 1e-8), 0.01 * 3.0 / (3.0 + 1e-8)], rtol=1e-12
    )
    assert state.step_count == 1


def test_adam_none_gradient_is_noop_for_that_param():
    p = np.array([1.0])
    q = np.array([1.0])
    state = adam_init([p, q])
    adam_step(state, [p, q], [None, np.array([1.0])])
    assert p[0] == 1.0
    assert q[0] != 1.0


def test_adam_shape_and_count_checks():
    p = np.zeros(3)
    state = adam_init([p])
    with pytest.raises(ValueError):
        adam_step(state, [p], [np.zeros(2)])
    with pytest.raises(ValueError):
        adam_step(state, [p, p], [np.zeros(3), np.zeros(3)])


def test_adam_minimizes_quadratic_bowl():
    target = np.array([1.5, -0.7, 0.3])
    p = np.zeros(3)
    state = adam_init([p], learning_rate=0.01)
    for _ in range(500):
        adam_step(state, [p], [2.0 * (p - target)])
    assert np.max(np.abs(p - target)) < 1e-3


def test_adam_updates_lifted_tensors_in_place():
    net = init(Rng(11), (2, 3, 1))
    params = lift_parameters([net])
    state = adam_init(params)
    before = params[0].data.copy()
    x = np.ones((4, 2))
    loss = ad.tsum(forward(net, x))
    loss.backward()
    adam_step(state, params, [p.grad for p in params])
    assert not np.array_equal(params[0].data, before)
    detach_parameters([net])
    assert not np.array_equal(net.weights[0], before)


def test_checkpoint_roundtrip_is_byte_exact(tmp_path):
    nets = [
        init(Rng(20), (4, 16, 16, 32, 2), "linear"),
        init(Rng(21), (32, 32, 32, 16, 1), "sigmoid"),
    ]
    path = tmp_path / "model.ckpt"
    write_checkpoint(path, nets)
    back = read_checkpoint(path, ["linear", "sigmoid"])
    for a, b in zip(nets, back):
        assert a.layer_dims == b.layer_dims
        assert a.output_activation == b.output_activation
        for wa, wb in zip(a.weights, b.weights):
            assert wa.tobytes() == wb.tobytes()
        for ba, bb in zip(a.biases, b.biases):
            assert ba.tobytes() == bb.tobytes()
    # rewriting the loaded nets reproduces the identical file
    path2 = tmp_path / "model2.ckpt"
    write_checkpoint(path2, back)
    assert path.read_bytes() == path2.read_bytes()


def test_checkpoint_header_layout(tmp_path):
    net = init(Rng(22), (3, 5, 2), "linear")
    path = tmp_path / "one.ckpt"
    write_checkpoint(path, [net])
    raw = path.read_bytes()
    assert raw[:8] == CHECKPOINT_MAGIC
    assert raw[8:12] == (2).to_bytes(4, "little")       # two weight layers
    assert raw[12:24] == b"".join(d.to_bytes(4, "little") for d in (3, 5, 2))
    assert len(raw) == 8 + 4 + 12 + 8 * (3 * 5 + 5 + 5 * 2 + 2)


def test_checkpoint_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.ckpt"
    path.write_bytes(b"NOTMAGIC" + b"\x00" * 64)
    with pytest.raises(ValueError, match="not a model checkpoint"):
        read_checkpoint(path, ["linear"])


def test_checkpoint_rejects_truncation_and_trailing(tmp_path):
    net = init(Rng(23), (3, 5, 2), "linear")
    path = tmp_path / "full.ckpt"
    write_checkpoint(path, [net])
    raw = path.read_bytes()

    cut = tmp_path / "cut.ckpt"
    cut.write_bytes(raw[:-9])
    with pytest.raises(ValueError, match="truncated"):
        read_checkpoint(cut, ["linear"])

    pad = tmp_path / "pad.ckpt"
    pad.write_bytes(raw + b"\x00")
    with pytest.raises(ValueError, match="trailing"):
        read_checkpoint(pad, ["linear"])
