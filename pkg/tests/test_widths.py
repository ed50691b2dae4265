import json
import math

import numpy as np
import pytest

from errors import InputError
from schema import AffineFamilySpec, LipschitzParametrization, Norm
from spaces import sigma_set, uniform_interval
from widths import (
    anchor_family,
    family_from_spec,
    linear_family,
    load_family,
    norm_change_penalty,
    rescale,
    restrict_to_gamma,
    width_upper,
    width_upper_profile,
)

LINE = Norm.lp(math.inf, 1)


def segment():
    return linear_family([0.5], [[0.5]], LINE, id="segment")


def test_linear_family_constant():
    par = linear_family([0.0, 0.0], [[1.0, 0.0], [0.0, 2.0]], Norm.lp(math.inf, 2))
    assert par.lipschitz_constant == 3.0
    assert par.param_dim == 2


def test_segment_width():
    est = width_upper(uniform_interval(9), segment(), 0.25)
    assert est.raw == pytest.approx(0.125)
    assert est.upper == pytest.approx(0.25)
    assert est.witness == "segment"


def test_width_needs_unit_ball():
    par = LipschitzParametrization(
        param_dim=1, radius=2.0, lipschitz_constant=0.25,
        map=lambda y: np.atleast_2d(y) * 0.25, norm=LINE, batched=True,
    )
    with pytest.raises(InputError):
        width_upper(uniform_interval(9), par, 0.25)
    unit = rescale(par)
    assert unit.radius == 1.0
    assert unit.lipschitz_constant == 0.5
    assert unit.gamma == par.gamma


def test_width_input_checks():
    with pytest.raises(InputError):
        width_upper(uniform_interval(9), segment(), 0.0)
    with pytest.raises(InputError):
        width_upper(sigma_set(3), segment(), 0.25)
    with pytest.raises(InputError):
        width_upper(uniform_interval(9), segment(), 0.25, search_grid=np.zeros((4, 2)))


def test_restrict_to_smaller_gamma():
    par = restrict_to_gamma(segment(), 0.25)
    assert par.gamma == pytest.approx(0.25)
    images = par.images(np.array([[-1.0], [1.0]]))[:, 0]
    assert images == pytest.approx([0.25, 0.75])


def test_profile_is_nonincreasing_in_gamma():
    estimates = width_upper_profile(uniform_interval(33), segment(), [0.125, 0.25, 0.5, 1.0], 0.125)
    uppers = [e.upper for e in estimates]
    assert uppers == sorted(uppers, reverse=True)
    assert [e.gamma for e in estimates] == [0.125, 0.25, 0.5, 1.0]


def test_anchor_corners_hit_anchors():
    K = sigma_set(4)
    par = anchor_family(K.points[:2], np.zeros(4), K.norm)
    images = par.images(np.array([[1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]]))
    assert images[0] == pytest.approx(K.points[0])
    assert images[1] == pytest.approx(K.points[1])
    assert images[2] == pytest.approx(np.zeros(4))


def test_norm_change_penalty():
    assert norm_change_penalty(4) == (9.0, 5.0)
    assert norm_change_penalty(4, 2.0) == (18.0, 10.0)


def wavy(radius: float) -> LipschitzParametrization:
    B = np.array([[0.5, -0.25, 1.0], [0.25, 0.5, -0.5]])
    return LipschitzParametrization(
        param_dim=2, radius=radius, lipschitz_constant=float(np.max(np.abs(B).sum(axis=0))),
        map=lambda ys: np.sin(np.atleast_2d(ys) @ B), norm=Norm.lp(math.inf, 3), batched=True,
    )


@pytest.mark.parametrize("radius", [0.5, 2.0, 4.0])
def test_rescale_keeps_the_image_set(radius):
    par = wavy(radius)
    unit = rescale(par)
    assert unit.radius == 1.0
    assert unit.gamma == par.gamma
    rng = np.random.default_rng(3)
    ys = rng.uniform(-1.0, 1.0, size=(2000, 2))
    assert np.array_equal(unit.images(ys), par.images(radius * ys))
    zs = rng.uniform(-radius, radius, size=(2000, 2))
    assert np.array_equal(par.images(zs), unit.images(zs / radius))


@pytest.mark.parametrize("K, par", [
    (uniform_interval(33), segment()),
    (sigma_set(4), anchor_family(sigma_set(4).points[:2], np.zeros(4), sigma_set(4).norm)),
])
def test_width_upper_nonincreasing_when_delta_halves(K, par):
    uppers = [width_upper(K, par, 2.0 ** -k).upper for k in range(1, 6)]
    assert all(later <= earlier for earlier, later in zip(uppers, uppers[1:]))


def test_family_from_spec_rescales_radius():
    spec = AffineFamilySpec(offset=[0.5], basis=[[0.25]], radius=2.0, id="half")
    par = family_from_spec(spec, LINE)
    assert par.radius == 1.0
    assert par.gamma == pytest.approx(0.5)
    assert par.images(np.array([[-1.0], [1.0]]))[:, 0] == pytest.approx([0.0, 1.0])
    assert par.id == "half"
    claimed = family_from_spec(spec.model_copy(update={"lipschitz_constant": 1.0}), LINE)
    assert claimed.gamma == pytest.approx(2.0)


def test_family_from_spec_rejects_false_constant():
    spec = AffineFamilySpec(offset=[0.5], basis=[[0.25]], radius=2.0, lipschitz_constant=0.1)
    with pytest.raises(ValueError):
        family_from_spec(spec, LINE)


def test_load_family(tmp_path):
    path = tmp_path / "family.json"
    path.write_text(json.dumps({"offset": [0.5], "basis": [[0.5]], "id": "segment"}))
    par = load_family(str(path), LINE)
    assert par.lipschitz_constant == 0.5
    est = width_upper(uniform_interval(9), par, 0.25)
    assert est.raw == pytest.approx(0.125)
    with pytest.raises(InputError):
        load_family(str(path), Norm.lp(math.inf, 2))
