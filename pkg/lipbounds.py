"""Certified Lipschitz constants of y -> Phi(y) and a sampled lower estimate."""
import logging
import math
from typing import Iterable, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np

from config import LIPWIDTH_CONFIG
from errors import DomainError, InputError
from network import Layout, forward, omega_grid, random_params, split_params, expand_activations
from schema import Activation, BoundFamily, GrowthFunction, LipschitzCertificate, PhiGamma
from utils import parallel_map

logger = logging.getLogger(__name__)


def _embedding(c0: Optional[float]) -> float:
    return LIPWIDTH_CONFIG["embedding_constant"] if c0 is None else c0


def _check_positive(**values):
    for name, value in values.items():
        if not value > 0:
            raise InputError(f"{name} must be positive, got {value}")


def deep_bound_sigmoidal(d: int, W: int, L: float, w: float, n: int, c0: Optional[float] = None) -> LipschitzCertificate:
    """
    Lipschitz constant of y -> Phi(y) for a sigmoidal network.

    Recursion C_0 = L(d+1), C_j = LWw C_{j-1} + LW + L; the closed form
    2L(max(W, d) + 1)(LWw)^n dominates it whenever LWw >= 2.
    """
    _check_positive(d=d, W=W, n=n, L=L, w=w)
    c0 = _embedding(c0)
    A = L * W * w
    B = L * W + L
    trace = [L * (d + 1)]
    for _ in range(n):
        trace.append(A * trace[-1] + B)
    closed = 2 * L * (max(W, d) + 1) * A ** n
    holds = A >= 2
    if not holds:
        logger.warning(f"LWw = {A:g} < 2: the closed form is not certified")
    return LipschitzCertificate(
        value=c0 * trace[-1],
        recursion_trace=trace,
        closed_form=c0 * closed,
        regime="deep_sigmoidal",
        hypothesis_holds=holds,
        params={"d": d, "W": W, "L": L, "w": w, "n": n, "c0": c0},
    )


def relu_activation_envelope(d: int, W: int, w: float, j: int) -> float:
    """Bound (d+2) w (Ww)^j on the hidden values of stage j over Omega."""
    return (d + 2) * w * (W * w) ** j


def deep_bound_relu(d: int, W: int, w: float, n: int, c0: Optional[float] = None) -> LipschitzCertificate:
    """
    Lipschitz constant for ReLU networks, identity channels included.

    D_0 = d+1, D_j = Ww D_{j-1} + (d+2) w (Ww)^j + 1, closed form (d+2) n (Ww)^{n+1}.
    """
    _check_positive(d=d, W=W, n=n, w=w)
    if W * w < 2:
        raise DomainError(f"The ReLU bound needs LWw >= 2 with L = 1, got Ww = {W * w:g}")
    c0 = _embedding(c0)
    A = W * w
    trace = [float(d + 1)]
    for j in range(1, n + 1):
        trace.append(A * trace[-1] + relu_activation_envelope(d, W, w, j) + 1)
    closed = (d + 2) * n * A ** (n + 1)
    holds = W >= 2 and w >= 1
    if not holds:
        logger.warning(f"W = {W}, w = {w:g}: the ReLU envelope needs W >= 2 and w >= 1")
    return LipschitzCertificate(
        value=c0 * trace[-1],
        recursion_trace=trace,
        closed_form=c0 * closed,
        regime="deep_relu",
        hypothesis_holds=holds,
        params={"d": d, "W": W, "w": w, "n": n, "c0": c0},
    )


def shallow_bound(
    d: int,
    W: int,
    L: float,
    w: float,
    act_kind: Literal["sigmoidal", "relu", "identity"],
    c0: Optional[float] = None,
) -> LipschitzCertificate:
    """One hidden layer: one recursion step against c0(L(d+1)+2L)Ww or 3c0(d+2)Ww^2."""
    _check_positive(d=d, W=W, L=L, w=w)
    if w < 1:
        raise DomainError(f"The shallow bound needs w >= 1, got {w}")
    c0 = _embedding(c0)
    if act_kind == "sigmoidal":
        trace = [L * (d + 1), L * W * w * (d + 1) + L * W + L]
        closed = (L * (d + 1) + 2 * L) * W * w
        regime = "shallow_sigmoidal"
    elif act_kind in ("relu", "identity"):
        trace = [float(d + 1), W * w * (d + 1) + (d + 2) * W * w ** 2 + 1]
        closed = 3 * (d + 2) * W * w ** 2
        regime = "shallow_relu"
    else:
        raise InputError(f"Unsupported activation kind: {act_kind}")
    return LipschitzCertificate(
        value=c0 * trace[-1],
        recursion_trace=trace,
        closed_form=c0 * closed,
        regime=regime,
        params={"d": d, "W": W, "L": L, "w": w, "c0": c0},
    )


def certificate_for(act: Activation, d: int, W: int, w: float, n: int, c0: Optional[float] = None) -> LipschitzCertificate:
    """Deep certificate matching the activation kind."""
    if act.kind == "sigmoidal":
        return deep_bound_sigmoidal(d, W, act.L, w, n, c0)
    return deep_bound_relu(d, W, w, n, c0)


def empirical_lipschitz(
    layout: Layout,
    act: Activation,
    w: float,
    trials: int,
    grid: Union[int, np.ndarray, None] = None,
    seed: Optional[int] = None,
    pairs: Optional[Sequence[Tuple[np.ndarray, np.ndarray]]] = None,
) -> float:
    """
    Sampled lower estimate of the Lipschitz constant of y -> Phi(y).

    Half of the pairs are independent draws from B_{l_inf}(w), the other half
    small perturbations of a draw. Pairs with y = y' are skipped.

    Args:
        layout: (d, W, n)
        act: activation applied on every channel
        w: parameter bound
        trials: number of sampled pairs
        grid: points per axis of the Omega grid, or the grid itself
        seed: generator seed, defaults to the configured one
        pairs: explicit (y, y') pairs instead of sampling

    Returns:
        float: max over pairs of sup_grid |Phi(y) - Phi(y')| / ||y - y'||_inf
    """
    d, W, n = layout
    if pairs is None:
        if trials < 1:
            raise InputError(f"trials must be at least 1, got {trials}")
        rng = np.random.default_rng(LIPWIDTH_CONFIG["seed"] if seed is None else seed)
        pairs = []
        for t in range(trials):
            y = random_params(layout, w, rng)
            if t % 2 == 0:
                y2 = random_params(layout, w, rng)
            else:
                step = rng.uniform(-1e-3 * w, 1e-3 * w, size=y.shape)
                y2 = np.clip(y + step, -w, w)
            pairs.append((y, y2))
    if grid is None:
        grid = LIPWIDTH_CONFIG["lipschitz_grid_points"]
    points = omega_grid(d, grid) if isinstance(grid, int) else np.asarray(grid, dtype=float)
    stages = expand_activations(act, W, n)

    def ratio(pair) -> Optional[float]:
        y, y2 = (np.asarray(v, dtype=float) for v in pair)
        gap = float(np.max(np.abs(y - y2)))
        if gap == 0:
            return None
        out = forward(split_params(y, layout), stages, points)
        out2 = forward(split_params(y2, layout), stages, points)
        return float(np.max(np.abs(out - out2))) / gap

    ratios = [r for r in parallel_map(ratio, pairs) if r is not None]
    if not ratios:
        raise InputError("Every sampled pair was degenerate (y = y')")
    return max(ratios)


def growth_class(wfam: BoundFamily, regime: Literal["deep", "shallow"], c: Optional[float] = None) -> GrowthFunction:
    """Asymptotic class of phi for the given bound family."""
    c = LIPWIDTH_CONFIG["gamma_constant"] if c is None else c
    if regime == "deep":
        if wfam.kind == "constant":
            return GrowthFunction(kind="linear", c=c * (1 + math.log2(wfam.C)))
        if wfam.kind == "polynomial":
            return GrowthFunction(kind="nlogn", c=c * wfam.delta)
        if wfam.nu == 0:
            return GrowthFunction(kind="linear", c=c * (1 + math.log2(wfam.C) + wfam.c))
        return GrowthFunction(kind="power", c=c * wfam.c, p=wfam.nu + 1, q=0.0)
    if regime != "shallow":
        raise InputError(f"Unsupported regime: {regime}")
    if wfam.kind == "constant" or (wfam.kind == "exponential" and wfam.nu == 0):
        return GrowthFunction(kind="power", c=c, p=0.0, q=1.0)
    if wfam.kind == "polynomial":
        return GrowthFunction(kind="power", c=c * (1 + wfam.delta), p=0.0, q=1.0)
    return GrowthFunction(kind="power", c=c * wfam.c, p=wfam.nu, q=0.0)


def phi_gamma_of(wfam: BoundFamily, n: int, regime: Literal["deep", "shallow"], c: Optional[float] = None) -> PhiGamma:
    """
    phi(n) and gamma_n = 2^phi(n) for a parameter bound family.

    deep: phi(n) = c n (1 + log2 w(n)); shallow (n is the width W):
    phi(W) = c (log2 W + log2 w(W)).
    """
    if n < 2:
        raise InputError(f"phi_gamma_of needs n >= 2, got {n}")
    c = LIPWIDTH_CONFIG["gamma_constant"] if c is None else c
    if regime == "deep":
        phi = c * n * (1 + wfam.log2_value(n))
    elif regime == "shallow":
        phi = c * (math.log2(n) + wfam.log2_value(n))
    else:
        raise InputError(f"Unsupported regime: {regime}")
    try:
        gamma = 2.0 ** phi
    except OverflowError:
        gamma = math.inf
    return PhiGamma(phi=phi, log2_gamma=phi, gamma=gamma, growth=growth_class(wfam, regime, c), regime=regime)


def lipschitz_exponent_bracket(
    act: Activation,
    d: int,
    W: int,
    w_values: Iterable[float],
    n_values: Iterable[int],
) -> Tuple[float, float]:
    """Fitted (c1, c2) with 2^{c1 n (1+log2 w)} < L_n < 2^{c2 n (1+log2 w)} on the given grid."""
    exponents: List[float] = []
    for w in w_values:
        for n in n_values:
            cert = certificate_for(act, d, W, w, n)
            exponents.append(math.log2(cert.value) / (n * (1 + math.log2(w))))
    low, high = min(exponents), max(exponents)
    return low * (1 - 1e-9), high * (1 + 1e-9)
