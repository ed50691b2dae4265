import json

import numpy as np
import pytest

from errors import InputError, NumericError
from lipbounds import relu_activation_envelope
from network import (
    evaluate,
    evaluate_batch,
    evaluate_shallow,
    flatten,
    hidden_sup,
    load_net,
    omega_grid,
    param_count,
    random_params,
    save_net,
    split_params,
    sup_distance,
    unflatten,
)
from schema import Activation, AffineLayer, FeedForwardNet

RELU = Activation(kind="relu")


def small_net() -> FeedForwardNet:
    return FeedForwardNet(
        d=1, W=1, n=1,
        layers=[AffineLayer(matrix=[[2.0]], bias=[-1.0]), AffineLayer(matrix=[[3.0]], bias=[0.5])],
        activation=[[RELU]],
        param_bound=3.0,
    )


def test_param_count():
    assert param_count(1, 2, 1) == 7
    assert param_count(2, 3, 2) == 25


def test_flatten_inverts_unflatten():
    rng = np.random.default_rng(0)
    values = random_params((1, 3, 2), 1.0, rng)
    net = unflatten(values, RELU, layout=(1, 3, 2), bound=1.0)
    assert np.array_equal(flatten(net).values, values)


def test_evaluate_known_network():
    net = small_net()
    assert evaluate(net, 1.0) == pytest.approx(3.5)
    assert evaluate(net, 0.0) == pytest.approx(0.5)
    out = evaluate(net, np.array([0.0, 0.25, 1.0]))
    assert out.shape == (3,)


def test_evaluate_batch_keeps_array_shape():
    out = evaluate_batch(small_net(), [1.0])
    assert isinstance(out, np.ndarray)
    assert out.shape == (1,)


def test_overflow_reports_layer():
    huge = 1e300
    net = FeedForwardNet(
        d=1, W=1, n=2,
        layers=[AffineLayer(matrix=[[huge]], bias=[0.0]), AffineLayer(matrix=[[huge]], bias=[0.0]),
                AffineLayer(matrix=[[1.0]], bias=[0.0])],
        activation=[[RELU], [RELU]],
        param_bound=huge,
    )
    with pytest.raises(NumericError) as info:
        evaluate(net, 1.0)
    assert info.value.layer == 1


def test_split_params_checks_length():
    with pytest.raises(InputError):
        split_params(np.zeros(6), (1, 2, 1))


def test_raw_vector_needs_layout():
    with pytest.raises(InputError):
        unflatten(np.zeros(7), RELU)


def test_shallow_absolute_value():
    layers = (AffineLayer(matrix=[[1.0], [-1.0]], bias=[0.0, 0.0]), AffineLayer(matrix=[[1.0, 1.0]], bias=[0.0]))
    assert evaluate_shallow(2, layers, RELU, 0.5) == pytest.approx(0.5)


def test_grid_and_sup_distance():
    grid = omega_grid(2, 3)
    assert grid.shape == (9, 2)
    net = small_net()
    assert sup_distance(net, net, omega_grid(1, 5)) == 0.0


def test_hidden_values_stay_in_envelope():
    rng = np.random.default_rng(11)
    d, W, n, w = 1, 3, 3, 1.0
    net = unflatten(random_params((d, W, n), w, rng), RELU, layout=(d, W, n), bound=w)
    sups = hidden_sup(net, omega_grid(d, 65))
    for j, value in enumerate(sups):
        assert value <= relu_activation_envelope(d, W, w, j)


def test_save_and_load_restore_exact_weights(tmp_path):
    rng = np.random.default_rng(5)
    net = unflatten(random_params((2, 3, 2), 0.75, rng), Activation(kind="sigmoidal"), layout=(2, 3, 2), bound=0.75)
    path = str(tmp_path / "net.json")
    text = save_net(net, path)
    assert set(json.loads(text)) == {"d", "W", "n", "activation", "layers", "param_bound"}
    back = load_net(path)
    assert np.array_equal(flatten(back).values, flatten(net).values)
    assert back.channel_activations == net.channel_activations
    grid = omega_grid(2, 9)
    assert np.array_equal(evaluate(back, grid), evaluate(net, grid))


@pytest.mark.parametrize("act", [RELU, Activation(kind="sigmoidal")])
def test_output_layer_is_affine(act):
    rng = np.random.default_rng(17)
    layout, w = (1, 3, 3), 1.0
    net = unflatten(random_params(layout, w, rng), act, layout=layout, bound=w)
    grid = omega_grid(1, 65)
    base = evaluate(net, grid)
    for lam in (2.0, -0.5, 0.25, 3.0):
        last = net.layers[-1]
        scaled = net.model_copy(update={
            "layers": net.layers[:-1] + [AffineLayer(matrix=lam * last.matrix, bias=lam * last.bias)],
            "param_bound": w * max(1.0, abs(lam)),
        })
        assert np.allclose(evaluate(scaled, grid), lam * base, rtol=1e-13, atol=1e-13)


def test_sigmoidal_hidden_values_stay_in_unit_interval():
    rng = np.random.default_rng(23)
    sigmoidal = Activation(kind="sigmoidal")
    for _ in range(20):
        layout = (2, int(rng.integers(1, 6)), int(rng.integers(1, 5)))
        net = unflatten(random_params(layout, 8.0, rng), sigmoidal, layout=layout, bound=8.0)
        assert all(value <= 1.0 for value in hidden_sup(net, omega_grid(2, 17)))
