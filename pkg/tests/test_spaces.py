import math

import numpy as np
import pytest

from errors import CapacityError, InputError
from schema import Norm, PointCloudSet
from spaces import (
    chebyshev_radius,
    diameter,
    distance,
    linf_ball_lattice,
    load_point_cloud,
    nearest_distances,
    pairwise_distances,
    sample_functions,
    save_point_cloud,
    sigma_set,
    uniform_interval,
)


def test_distance_in_each_lp_norm():
    assert distance([0, 0], [3, -4], Norm.lp(math.inf, 2)) == 4
    assert distance([0, 0], [3, -4], Norm.lp(2, 2)) == 5
    assert distance([0, 0], [3, -4], Norm.lp(1, 2)) == 7


def test_distance_rejects_mismatched_dimensions():
    with pytest.raises(InputError):
        distance([0, 0], [1, 2, 3], Norm.lp(2, 2))


def test_point_cloud_drops_duplicates():
    K = PointCloudSet(points=[[0.0], [0.0], [1.0]], norm=Norm.lp(math.inf, 1))
    assert K.size == 2


def test_sigma_set_shape_and_diameter():
    K = sigma_set(5)
    assert K.size == 6
    assert K.dimension == 5
    assert diameter(K) == pytest.approx(1.0)


def test_chebyshev_radius_of_interval_is_exact():
    cheb = chebyshev_radius(uniform_interval(5))
    assert cheb.exact
    assert cheb.radius == pytest.approx(0.5)
    assert cheb.center[0] == pytest.approx(0.5)


def test_chebyshev_bracket_for_euclidean_triangle():
    K = PointCloudSet(points=[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], norm=Norm.lp(2, 2))
    cheb = chebyshev_radius(K)
    assert cheb.lower <= cheb.radius
    assert cheb.lower == pytest.approx(math.sqrt(2) / 2)


def test_uniform_interval_resolution():
    K = uniform_interval(17)
    assert K.resolution == pytest.approx(1 / 32)


def test_lattice_is_a_delta_net():
    lattice = linf_ball_lattice(2, 0.5)
    assert lattice.shape == (9, 2)
    rng = np.random.default_rng(3)
    ys = rng.uniform(-1, 1, size=(200, 2))
    assert np.max(nearest_distances(ys, lattice, Norm.lp(math.inf, 2))) <= 0.5


def test_lattice_clips_last_point():
    axis = linf_ball_lattice(1, 0.3)[:, 0]
    assert axis.size == 5
    assert axis[-1] == 1.0
    assert np.all(np.diff(axis) <= 0.6 + 1e-12)


def test_lattice_cap():
    with pytest.raises(CapacityError):
        linf_ball_lattice(10, 0.01)


def test_sample_functions_on_grid():
    K = sample_functions([np.sin, lambda t: t, lambda t: 1.0], 9, label="three")
    assert K.size == 3
    assert K.norm.kind == "sup_grid"
    assert K.dimension == 9


def test_point_cloud_file(tmp_path):
    path = str(tmp_path / "sigma.json")
    save_point_cloud(sigma_set(3), path)
    loaded = load_point_cloud(path)
    assert loaded.label == "sigma_J3"
    assert np.array_equal(loaded.points, sigma_set(3).points)
    assert math.isinf(loaded.norm.p)


@pytest.mark.parametrize("nrm", [
    Norm.lp(1, 4),
    Norm.lp(2, 4),
    Norm.lp(3.5, 4),
    Norm.lp(math.inf, 4),
    Norm.uniform_grid(9),
    Norm.uniform_grid(3, d=2),
])
def test_triangle_inequality(nrm):
    rng = np.random.default_rng(2024)
    x, y, z = (rng.normal(size=(10_000, nrm.dimension)) for _ in range(3))
    direct = nrm.measure(x - z)
    detour = nrm.measure(x - y) + nrm.measure(y - z)
    assert np.all(direct <= detour * (1 + 1e-12))


def test_sigma_set_distances_are_the_larger_sigma():
    J = 12
    K = sigma_set(J)
    sigmas = 1.0 / np.log2(np.arange(1, J + 1) + 1.0)
    dist = pairwise_distances(K.points, K.points, K.norm)
    for j in range(J):
        assert dist[j, J] == sigmas[j]
        for k in range(J):
            expected = 0.0 if j == k else sigmas[min(j, k)]
            assert dist[j, k] == expected
