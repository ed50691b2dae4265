"""Hat-function iterates, Takagi-class sums and the network that realizes them."""
import logging
import math
from typing import Optional, Tuple, Union

import numpy as np
import pandas as pd

from config import LIPWIDTH_CONFIG
from errors import DomainError, InputError
from network import evaluate
from schema import (
    Activation,
    AffineLayer,
    FeedForwardNet,
    LipschitzParametrization,
    Norm,
    PointCloudSet,
    TakagiSpec,
)

logger = logging.getLogger(__name__)

Scalar = Union[float, np.ndarray]

RELU = Activation(kind="relu")
IDENTITY = Activation(kind="identity")


def hat(t: Scalar) -> Scalar:
    """H(t) = 2 (t)_+ - 4 (t - 1/2)_+"""
    t = np.asarray(t, dtype=float)
    out = 2.0 * np.maximum(t, 0.0) - 4.0 * np.maximum(t - 0.5, 0.0)
    return float(out) if out.ndim == 0 else out


def hat_iterate(k: int, t: Scalar) -> Scalar:
    """H composed with itself k times."""
    if k < 1:
        raise InputError(f"hat_iterate needs k >= 1, got {k}")
    u = t
    for _ in range(k):
        u = hat(u)
    return u


def _hat_table(n_terms: int, t: np.ndarray) -> np.ndarray:
    rows = []
    u = np.asarray(t, dtype=float)
    for _ in range(n_terms):
        u = hat(u)
        rows.append(np.atleast_1d(u))
    return np.vstack(rows) if rows else np.zeros((0, np.atleast_1d(t).size))


def psi(spec: TakagiSpec, t: Scalar) -> Scalar:
    """psi_n(t) = sum_k c_k H^k(t), summed in increasing k."""
    arr = np.asarray(t, dtype=float)
    total = np.zeros_like(arr)
    u = arr
    for c in spec.coefficients:
        u = np.asarray(hat(u))
        total = total + c * u
    return float(total) if total.ndim == 0 else total


def build_takagi_network(spec: TakagiSpec) -> Tuple[FeedForwardNet, float]:
    """
    Width-4 network of depth n with output psi_n.

    Channels: input passthrough (identity), (u)_+ and (u - 1/2)_+ (ReLU)
    for the current iterate u, and the running sum (identity). Stage j feeds
    u = H^j(t) = 2 ch1 - 4 ch2 into the next pair of ReLU channels and adds
    c_j u to the accumulator.

    Returns:
        (net, w): the network and its parameter bound max(4, 4 max|c_k|)
    """
    c = list(spec.coefficients)
    n = len(c)
    if n < 1:
        raise InputError("The Takagi network needs at least one term")
    w = max(4.0, 4.0 * max(abs(x) for x in c))
    layers = [AffineLayer(matrix=[[1.0], [1.0], [1.0], [0.0]], bias=[0.0, 0.0, -0.5, 0.0])]
    for j in range(n - 1):
        layers.append(AffineLayer(
            matrix=[
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 2.0, -4.0, 0.0],
                [0.0, 2.0, -4.0, 0.0],
                [0.0, 2.0 * c[j], -4.0 * c[j], 1.0],
            ],
            bias=[0.0, 0.0, -0.5, 0.0],
        ))
    layers.append(AffineLayer(matrix=[[0.0, 2.0 * c[-1], -4.0 * c[-1], 1.0]], bias=[0.0]))
    net = FeedForwardNet(
        d=1, W=4, n=n,
        layers=layers,
        channel_activations=[[IDENTITY, RELU, RELU, IDENTITY] for _ in range(n)],
        param_bound=w,
    )
    return net, w


def tail_bound(lam: float, n: int) -> float:
    """sum_{k > n} |lam|^-k, a sup-norm bound on f_lam - psi_n since ||H^k|| = 1."""
    if abs(lam) <= 1:
        raise DomainError(f"The tail bound needs |lambda| > 1, got {lam}")
    a = abs(lam)
    return a ** (-n) / (a - 1.0)


def _reference_terms(lam: float) -> int:
    # smallest N with tail_bound(lam, N) below the double resolution of psi
    a = abs(lam)
    return max(1, math.ceil((math.log2(1.0 / (a - 1.0)) + 60.0) / math.log2(a)))


def error_curve(lam: float, n_max: int, points: int = 4097) -> pd.DataFrame:
    """
    Sup-grid error of psi_n against f_lam for n = 1 .. n_max.

    lam = 4 is compared with t(1 - t); other values with psi_N for an N whose
    tail is below double precision. The slack column bounds the rounding of the
    partial sums.
    """
    if n_max < 1:
        raise InputError(f"n_max must be at least 1, got {n_max}")
    tail_bound(lam, n_max)
    t = np.linspace(0.0, 1.0, points)
    if lam == 4:
        reference = t * (1.0 - t)
    else:
        reference = psi(TakagiSpec(lam=lam, n_terms=max(n_max, _reference_terms(lam))), t)
    slack = 16.0 * np.finfo(float).eps * float(np.max(np.abs(reference)))
    data = []
    for n in range(1, n_max + 1):
        approx = psi(TakagiSpec(lam=lam, n_terms=n), t)
        data.append({
            'n': n,
            'sup_error': float(np.max(np.abs(approx - reference))),
            'tail_bound': tail_bound(lam, n),
            'slack': slack,
        })
    return pd.DataFrame(data, columns=['n', 'sup_error', 'tail_bound', 'slack'])


def values_table(spec: TakagiSpec, points: int = 4097) -> pd.DataFrame:
    """psi_n and the network output on a uniform grid of [0, 1]."""
    t = np.linspace(0.0, 1.0, points)
    net, _ = build_takagi_network(spec)
    return pd.DataFrame({'t': t, 'psi': psi(spec, t), 'network': evaluate(net, t)})


def coefficient_family(n_terms: int, grid_points: Optional[int] = None) -> LipschitzParametrization:
    """
    y -> sum_k y_k H^k sampled on a uniform grid, from B_{l_inf^n}(1).

    |sum_k (y_k - y'_k) H^k(t)| <= n ||y - y'||_inf, so gamma = n.
    """
    if n_terms < 1:
        raise InputError(f"n_terms must be at least 1, got {n_terms}")
    grid_points = grid_points or LIPWIDTH_CONFIG["grid_points_per_axis"]
    nrm = Norm.uniform_grid(grid_points)
    table = _hat_table(n_terms, nrm.grid_nodes()[:, 0])

    def images(ys: np.ndarray) -> np.ndarray:
        return np.atleast_2d(ys) @ table

    return LipschitzParametrization(
        param_dim=n_terms,
        radius=1.0,
        lipschitz_constant=float(n_terms),
        map=images,
        norm=nrm,
        batched=True,
        description=f"Takagi coefficients c_1..c_{n_terms} on a {grid_points}-point grid",
        id=f"takagi_{n_terms}",
    )


def takagi_cloud(n_terms: int, size: int, grid_points: Optional[int] = None, seed: Optional[int] = None) -> PointCloudSet:
    """Seeded sample of the coefficient family's image: psi_y for y uniform in [-1, 1]^n."""
    par = coefficient_family(n_terms, grid_points)
    rng = np.random.default_rng(LIPWIDTH_CONFIG["seed"] if seed is None else seed)
    ys = rng.uniform(-1.0, 1.0, size=(size, n_terms))
    return PointCloudSet(points=par.images(ys), norm=par.norm, label=f"takagi_{n_terms}_{size}")

