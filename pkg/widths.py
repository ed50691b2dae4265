"""Lipschitz-width upper bounds from explicit parametrizations of the unit ball."""
import json
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from errors import InputError
from schema import AffineFamilySpec, LipschitzParametrization, Norm, PointCloudSet, WidthEstimate
from spaces import linf_ball_lattice, nearest_distances
from utils import parallel_map

logger = logging.getLogger(__name__)


def rescale(par: LipschitzParametrization) -> LipschitzParametrization:
    """
    Move a parametrization of B(r) onto B(1) through y -> r y.

    The image set is unchanged and the constant becomes (gamma / r) * r = gamma.
    """
    if par.radius == 1.0:
        return par
    r = par.radius
    fn = par.map

    def scaled(ys):
        return fn(r * np.asarray(ys, dtype=float))

    return LipschitzParametrization(
        param_dim=par.param_dim,
        radius=1.0,
        lipschitz_constant=par.lipschitz_constant * r,
        map=scaled,
        norm=par.norm,
        batched=par.batched,
        description=par.description,
        id=par.id,
    )


def restrict_to_gamma(par: LipschitzParametrization, gamma: float) -> LipschitzParametrization:
    """
    Unit-ball parametrization with constant gamma built from par.

    Above par.gamma the map is kept and only the claim is raised; below it the
    map is first restricted to the sub-ball of radius gamma / L.
    """
    if not gamma > 0:
        raise InputError(f"gamma must be positive, got {gamma}")
    L = par.lipschitz_constant
    radius = par.radius if L == 0 else min(par.radius, gamma / L)
    restricted = LipschitzParametrization(
        param_dim=par.param_dim,
        radius=radius,
        lipschitz_constant=L,
        map=par.map,
        norm=par.norm,
        batched=par.batched,
        description=par.description,
        id=par.id,
    )
    unit = rescale(restricted)
    return unit.model_copy(update={"lipschitz_constant": gamma})


def linear_family(offset: Sequence[float], basis: np.ndarray, nrm: Norm, id: str = "linear") -> LipschitzParametrization:
    """y -> offset + sum_i y_i b_i on B(1), with constant sum_i ||b_i||."""
    offset = np.asarray(offset, dtype=float).ravel()
    basis = np.atleast_2d(np.asarray(basis, dtype=float))
    if basis.shape[1] != offset.size or offset.size != nrm.dimension:
        raise InputError(
            f"Basis of shape {basis.shape} and offset of size {offset.size} do not fit dimension {nrm.dimension}"
        )
    constant = float(np.sum(nrm.measure(basis)))

    def images(ys):
        return offset + np.atleast_2d(ys) @ basis

    return LipschitzParametrization(
        param_dim=basis.shape[0],
        radius=1.0,
        lipschitz_constant=constant,
        map=images,
        norm=nrm,
        batched=True,
        description=f"affine span of {basis.shape[0]} vectors",
        id=id,
    )


def family_from_spec(spec: AffineFamilySpec, nrm: Norm) -> LipschitzParametrization:
    """
    Unit-ball parametrization of a custom affine family.

    A claimed constant goes through the sampled spot check of
    LipschitzParametrization before the family is rescaled onto B(1).
    """
    base = linear_family(spec.offset, spec.basis, nrm, id=spec.id)
    if spec.radius == 1.0 and spec.lipschitz_constant is None:
        return base
    par = LipschitzParametrization(
        param_dim=base.param_dim,
        radius=spec.radius,
        lipschitz_constant=base.lipschitz_constant if spec.lipschitz_constant is None else spec.lipschitz_constant,
        map=base.map,
        norm=nrm,
        batched=True,
        description=base.description,
        id=spec.id,
    )
    return rescale(par)


def load_family(path: str, nrm: Norm) -> LipschitzParametrization:
    with open(path, "r", encoding="utf-8") as f:
        spec = AffineFamilySpec(**json.load(f))
    return family_from_spec(spec, nrm)


def anchor_family(anchors: np.ndarray, base: Sequence[float], nrm: Norm, id: str = "anchors") -> LipschitzParametrization:
    """
    y -> base + sum_j (y_j + 1) / 2 (a_j - base), constant 1/2 sum_j ||a_j - base||.

    The corner with y_j = 1 and every other coordinate -1 maps to a_j.
    """
    anchors = np.atleast_2d(np.asarray(anchors, dtype=float))
    base = np.asarray(base, dtype=float).ravel()
    half = (anchors - base) / 2.0
    return linear_family(base + half.sum(axis=0), half, nrm, id=id)


def width_upper(
    K: PointCloudSet,
    par: LipschitzParametrization,
    delta: Optional[float] = None,
    search_grid: Optional[np.ndarray] = None,
) -> WidthEstimate:
    """
    Certified upper bound on sup_{f in K} inf_y ||f - L(y)|| over B_{l_inf^n}(1).

    The inf over y is taken on a grid of fineness delta (the l_inf lattice
    with spacing 2 delta by default) and inflated by gamma * delta.

    Args:
        K: finite set
        par: parametrization of the unit ball
        delta: l_inf fineness of the grid
        search_grid: explicit grid of parameter vectors with fineness delta

    Returns:
        WidthEstimate: upper = raw + gamma * delta
    """
    if par.radius != 1.0:
        raise InputError(f"width_upper needs a unit-ball parametrization, got radius {par.radius}; rescale first")
    if par.norm.dimension != K.norm.dimension:
        raise InputError(f"Parametrization lives in dimension {par.norm.dimension}, K in {K.norm.dimension}")
    if delta is None or not delta > 0:
        raise InputError(f"delta must be positive, got {delta}")
    if search_grid is None:
        search_grid = linf_ball_lattice(par.param_dim, delta)
    grid = np.atleast_2d(np.asarray(search_grid, dtype=float))
    if grid.size == 0:
        raise InputError("Empty search grid")
    if grid.shape[1] != par.param_dim:
        raise InputError(f"Search grid has {grid.shape[1]} coordinates, parametrization has {par.param_dim}")
    images = par.images(grid)
    blocks = [K.points[start:start + 256] for start in range(0, K.size, 256)]
    raw = max(parallel_map(lambda b: float(np.max(nearest_distances(b, images, K.norm))), blocks))
    upper = raw + par.gamma * delta
    logger.debug(f"width of {K.label} against {par.id}: raw {raw:.6g}, upper {upper:.6g}")
    return WidthEstimate(
        n=par.param_dim,
        gamma=par.gamma,
        upper=upper,
        raw=raw,
        delta=delta,
        witness=par.id,
        grid_size=grid.shape[0],
    )


def width_upper_profile(
    K: PointCloudSet,
    par: LipschitzParametrization,
    gammas: Sequence[float],
    delta: float,
) -> List[WidthEstimate]:
    """
    Estimates for increasing gamma, kept nonincreasing.

    d_n^{gamma_2} <= d_n^{gamma_1} when gamma_1 <= gamma_2, so an estimate at a
    smaller gamma also bounds every larger one.
    """
    out: List[WidthEstimate] = []
    for gamma in sorted(gammas):
        est = width_upper(K, restrict_to_gamma(par, gamma), delta)
        if out and out[-1].upper < est.upper:
            best = out[-1]
            est = est.model_copy(update={
                "upper": best.upper,
                "raw": best.raw,
                "delta": best.delta,
                "witness": f"{best.witness}@gamma={best.gamma:g}",
            })
        out.append(est)
    return out


def norm_change_penalty(n: int, gamma: Optional[float] = None) -> Tuple[float, float]:
    """Lipschitz-constant factors (2n + 1) and (2 sqrt(n) + 1) for moving to l_inf^n parameters."""
    if n < 1:
        raise InputError(f"n must be at least 1, got {n}")
    factors = (2.0 * n + 1.0, 2.0 * math.sqrt(n) + 1.0)
    if gamma is None:
        return factors
    return factors[0] * gamma, factors[1] * gamma
