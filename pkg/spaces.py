"""Normed ambient spaces and finite stand-ins for compact sets."""
import itertools
import json
import logging
import math
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from config import LIPWIDTH_CONFIG
from errors import CapacityError, InputError
from schema import ChebyshevResult, Norm, PointCloudSet, SigmaExampleSet
from utils import dumps_json

logger = logging.getLogger(__name__)


def distance(x: Sequence[float], y: Sequence[float], nrm: Norm) -> float:
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape or x.shape[0] != nrm.dimension:
        raise InputError(
            f"Dimension mismatch: {x.shape[0]} and {y.shape[0]} under a norm of dimension {nrm.dimension}"
        )
    return float(nrm.measure(x - y))


def distances_to(points: np.ndarray, center: np.ndarray, nrm: Norm) -> np.ndarray:
    return nrm.measure(points - center[None, :])


def pairwise_distances(a: np.ndarray, b: np.ndarray, nrm: Norm) -> np.ndarray:
    """Distance matrix between the rows of a and b, computed in row chunks."""
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    # keep each broadcast block near 4M floats
    chunk = max(1, 4_000_000 // max(1, b.shape[0] * a.shape[1]))
    out = np.empty((a.shape[0], b.shape[0]))
    for start in range(0, a.shape[0], chunk):
        block = a[start:start + chunk]
        out[start:start + chunk] = nrm.measure(block[:, None, :] - b[None, :, :])
    return out


def nearest_distances(a: np.ndarray, b: np.ndarray, nrm: Norm, chunk: int = 64) -> np.ndarray:
    """For every row of a, the distance to the closest row of b."""
    a = np.atleast_2d(a)
    best = np.full(a.shape[0], np.inf)
    for start in range(0, b.shape[0], chunk):
        block = pairwise_distances(a, b[start:start + chunk], nrm)
        best = np.minimum(best, block.min(axis=1))
    return best


def diameter(K: PointCloudSet) -> float:
    pts = K.points
    if K.size == 1:
        return 0.0
    if K.norm.is_sup:
        # the l_inf diameter is the widest coordinate range
        return float(np.max(pts.max(axis=0) - pts.min(axis=0)))
    best = 0.0
    for start in range(0, K.size, 256):
        best = max(best, float(pairwise_distances(pts[start:start + 256], pts, K.norm).max()))
    return best


def midpoints(pts: np.ndarray) -> np.ndarray:
    """Pairwise midpoints (x_i + x_j) / 2 for i < j."""
    i, j = np.triu_indices(pts.shape[0], k=1)
    return (pts[i] + pts[j]) / 2.0


def chebyshev_radius(K: PointCloudSet) -> ChebyshevResult:
    """
    Chebyshev radius rad(K) = inf_g sup_{f in K} ||g - f||.

    Exact for sup norms (coordinate midpoints). For other norms the best
    center among the points and their pairwise midpoints is returned together
    with the certified bracket [diam/2, radius].
    """
    pts = K.points
    diam = diameter(K)
    if K.norm.is_sup:
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        center = (lo + hi) / 2.0
        radius = float(np.max(distances_to(pts, center, K.norm)))
        return ChebyshevResult(radius=radius, center=center, lower=diam / 2.0, upper=radius, exact=True)

    candidates = pts
    if K.size <= LIPWIDTH_CONFIG["midpoint_candidate_cap"]:
        candidates = np.vstack([pts, midpoints(pts)]) if K.size > 1 else pts
    worst = np.array([np.max(distances_to(pts, c, K.norm)) for c in candidates])
    best = int(np.argmin(worst))
    radius = float(worst[best])
    return ChebyshevResult(
        radius=radius,
        center=candidates[best],
        lower=diam / 2.0,
        upper=min(radius, diam),
        exact=False,
    )


def sigma_set(J: int) -> PointCloudSet:
    """{sigma_j e_j : j <= J} together with 0, under l_inf on R^J."""
    spec = SigmaExampleSet(J=J)
    points = np.vstack([np.diag(spec.sigmas), np.zeros((1, J))])
    return PointCloudSet(points=points, norm=Norm.lp(math.inf, J), label=f"sigma_J{J}")


def uniform_interval(points: int, label: Optional[str] = None) -> PointCloudSet:
    """Uniform discretization of [0, 1] with its covering resolution."""
    if points < 2:
        raise InputError("uniform interval needs at least 2 points")
    grid = np.linspace(0.0, 1.0, points)[:, None]
    return PointCloudSet(
        points=grid,
        norm=Norm.lp(math.inf, 1),
        label=label or f"interval_{points}",
        resolution=0.5 / (points - 1),
    )


def sample_functions(
    funcs: Iterable[Callable[[np.ndarray], np.ndarray]],
    points_per_axis: Optional[int] = None,
    d: int = 1,
    label: str = "",
) -> PointCloudSet:
    """
    Discretize a finite function class by sup-norm sampling on a uniform grid.

    Args:
        funcs: vectorized callables on [0, 1]^d; for d = 1 they receive a 1-d array
        points_per_axis: grid size per axis, defaults to the configured 2^10 + 1
        d: input dimension

    Returns:
        PointCloudSet: one row per function under the grid sup norm
    """
    points_per_axis = points_per_axis or LIPWIDTH_CONFIG["grid_points_per_axis"]
    nrm = Norm.uniform_grid(points_per_axis, d)
    nodes = nrm.grid_nodes()
    arg = nodes[:, 0] if d == 1 else nodes
    rows = [np.broadcast_to(np.asarray(f(arg), dtype=float), (nodes.shape[0],)) for f in funcs]
    if not rows:
        raise InputError("no functions to sample")
    logger.debug(f"Sampled {len(rows)} functions on a grid with spacing {nrm.grid_spacing():.3g}")
    return PointCloudSet(points=np.vstack(rows), norm=nrm, label=label)


def linf_ball_lattice(n: int, delta: float) -> np.ndarray:
    """
    Axis-aligned lattice of B_{l_inf^n}(1) with spacing 2*delta.

    Every point of the ball is within delta (in l_inf) of a lattice point.
    Per axis the points are -1, -1 + 2 delta, ... with the last one clipped
    to 1, so there are ceil(1/delta) + 1 of them.
    """
    if n < 1 or delta <= 0:
        raise InputError(f"Lattice needs n >= 1 and delta > 0, got n={n}, delta={delta}")
    steps = math.ceil(1.0 / delta - 1e-12)
    axis = np.minimum(-1.0 + 2.0 * delta * np.arange(steps + 1), 1.0)
    total = axis.size ** n
    if total > LIPWIDTH_CONFIG["lattice_cap"]:
        raise CapacityError(f"Lattice of {total} points exceeds the cap {LIPWIDTH_CONFIG['lattice_cap']}")
    return np.array(list(itertools.product(axis, repeat=n)), dtype=float).reshape(-1, n)


def load_point_cloud(path: str) -> PointCloudSet:
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    return PointCloudSet(**data)


def save_point_cloud(K: PointCloudSet, path: Optional[str] = None) -> str:
    payload = {"norm": K.norm, "points": K.points, "label": K.label}
    if K.resolution:
        payload["resolution"] = K.resolution
    text = dumps_json(payload)
    if path:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    return text
