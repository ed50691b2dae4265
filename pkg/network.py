"""Deep and shallow feed-forward maps y -> Phi(y) built from affine layers."""
import json
import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from errors import InputError, NumericError
from schema import Activation, AffineLayer, FeedForwardNet, ParamVector
from utils import dumps_json

logger = logging.getLogger(__name__)

ActivationSpec = Union[Activation, Sequence[Sequence[Activation]]]
Layout = Tuple[int, int, int]


def param_count(d: int, W: int, n: int) -> int:
    """Exact number of parameters of a (d, W, n) network."""
    return ParamVector.expected_length(d, W, n)


def _layer_shapes(d: int, W: int, n: int) -> List[Tuple[int, int]]:
    return [(W, d)] + [(W, W)] * (n - 1) + [(1, W)]


def expand_activations(act: ActivationSpec, W: int, n: int) -> List[List[Activation]]:
    if isinstance(act, Activation):
        return [[act] * W for _ in range(n)]
    return [list(stage) for stage in act]


def split_params(values: np.ndarray, layout: Layout) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Cut a flat parameter vector into (matrix, bias) pairs: row-major matrix, then bias."""
    values = np.asarray(values, dtype=float)
    expected = param_count(*layout)
    if values.shape != (expected,):
        raise InputError(f"Layout {layout} needs {expected} parameters, got {values.size}")
    out = []
    pos = 0
    for rows, cols in _layer_shapes(*layout):
        matrix = values[pos:pos + rows * cols].reshape(rows, cols)
        pos += rows * cols
        bias = values[pos:pos + rows]
        pos += rows
        out.append((matrix, bias))
    return out


def flatten(net: FeedForwardNet) -> ParamVector:
    parts = []
    for layer in net.layers:
        parts.append(layer.matrix.ravel())
        parts.append(layer.bias)
    return ParamVector(values=np.concatenate(parts), bound=net.param_bound, layout=(net.d, net.W, net.n))


def unflatten(
    y: Union[ParamVector, Sequence[float]],
    act: ActivationSpec,
    layout: Optional[Layout] = None,
    bound: Optional[float] = None,
) -> FeedForwardNet:
    """Inverse of flatten; raw vectors need an explicit layout and bound."""
    if not isinstance(y, ParamVector):
        if layout is None or bound is None:
            raise InputError("A raw parameter vector needs a layout and a bound")
        values = np.asarray(y, dtype=float)
        if values.size != param_count(*layout):
            raise InputError(f"Layout {layout} needs {param_count(*layout)} parameters, got {values.size}")
        y = ParamVector(values=values, bound=bound, layout=layout)
    d, W, n = y.layout
    layers = [AffineLayer(matrix=m, bias=b) for m, b in split_params(y.values, y.layout)]
    return FeedForwardNet(
        d=d, W=W, n=n,
        layers=layers,
        channel_activations=expand_activations(act, W, n),
        param_bound=y.bound,
    )


def _activate(z: np.ndarray, acts: Sequence[Activation]) -> np.ndarray:
    out = np.empty_like(z)
    for j, act in enumerate(acts):
        out[:, j] = act(z[:, j])
    return out


def forward(
    layers: Sequence[Tuple[np.ndarray, np.ndarray]],
    stages: Sequence[Sequence[Activation]],
    x: np.ndarray,
) -> np.ndarray:
    """Forward pass on an (N, d) batch; returns the (N,) outputs."""
    z = x
    last = len(layers) - 1
    for ell, (matrix, bias) in enumerate(layers):
        z = z @ matrix.T + bias
        if not np.all(np.isfinite(z)):
            raise NumericError(f"Non-finite value after layer {ell}", layer=ell)
        if ell < last:
            z = _activate(z, stages[ell])
    return z[:, 0]


def _as_batch(x, d: int) -> Tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 0 or (arr.ndim == 1 and d > 1)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1) if d == 1 else arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != d:
        raise InputError(f"Input of shape {np.shape(x)} does not match d={d}")
    if np.any(arr < 0) or np.any(arr > 1):
        logger.warning("Evaluating outside Omega = [0, 1]^d")
    return arr, single


def evaluate(net: FeedForwardNet, x) -> Union[float, np.ndarray]:
    """
    Exact forward pass A^(n) o sigma o A^(n-1) o ... o sigma o A^(0).

    Args:
        net: the network
        x: one point of R^d, or an (N, d) batch (for d = 1 a flat array is a batch)

    Returns:
        float for a single point, otherwise an (N,) array
    """
    batch, single = _as_batch(x, net.d)
    layers = [(layer.matrix, layer.bias) for layer in net.layers]
    out = forward(layers, net.channel_activations, batch)
    return float(out[0]) if single else out


def evaluate_batch(net: FeedForwardNet, xs) -> np.ndarray:
    """Outputs on an (N, d) batch, always as an (N,) array."""
    arr = np.asarray(xs, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, net.d) if net.d > 1 else arr.reshape(-1, 1)
    batch, _ = _as_batch(arr, net.d)
    layers = [(layer.matrix, layer.bias) for layer in net.layers]
    return forward(layers, net.channel_activations, batch)


def evaluate_shallow(
    W: int,
    layers: Tuple[AffineLayer, AffineLayer],
    act: Activation,
    x,
) -> Union[float, np.ndarray]:
    """One hidden layer of width W: A^(1) o sigma o A^(0)."""
    first, second = layers
    if first.matrix.shape[0] != W:
        raise InputError(f"First layer has {first.matrix.shape[0]} rows, expected W={W}")
    largest = max(max(float(np.max(np.abs(l.matrix))), float(np.max(np.abs(l.bias)))) for l in layers)
    net = FeedForwardNet(
        d=first.matrix.shape[1], W=W, n=1,
        layers=[first, second],
        channel_activations=[[act] * W],
        param_bound=max(largest, 1.0),
    )
    return evaluate(net, x)


def omega_grid(d: int, points_per_axis: int) -> np.ndarray:
    """Uniform grid of [0, 1]^d as an (M, d) array."""
    axis = np.linspace(0.0, 1.0, points_per_axis)
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def sup_distance(net: FeedForwardNet, other: FeedForwardNet, grid: np.ndarray) -> float:
    return float(np.max(np.abs(evaluate(net, grid) - evaluate(other, grid))))


def hidden_sup(net: FeedForwardNet, grid: np.ndarray) -> List[float]:
    """Sup over the grid of |channel values| after each activation stage."""
    z = np.asarray(grid, dtype=float)
    sups = []
    for ell, layer in enumerate(net.layers[:-1]):
        z = _activate(z @ layer.matrix.T + layer.bias, net.channel_activations[ell])
        sups.append(float(np.max(np.abs(z))))
    return sups


def random_params(layout: Layout, w: float, rng: np.random.Generator) -> np.ndarray:
    """Uniform draw from the l_inf ball of radius w."""
    return rng.uniform(-w, w, size=param_count(*layout))


def save_net(net: FeedForwardNet, path: Optional[str] = None) -> str:
    """
    JSON with keys d, W, n, activation, layers and param_bound.

    Every float keeps 17 significant digits, so load_net restores the exact weights.
    """
    text = dumps_json(net)
    if path:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    return text


def load_net(path: str) -> FeedForwardNet:
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    return FeedForwardNet(**data)
