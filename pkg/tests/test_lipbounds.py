import itertools
import math

import numpy as np
import pytest

from errors import DomainError, InputError
from lipbounds import (
    deep_bound_relu,
    deep_bound_sigmoidal,
    empirical_lipschitz,
    growth_class,
    lipschitz_exponent_bracket,
    phi_gamma_of,
    shallow_bound,
)
from schema import Activation, BoundFamily


def test_relu_recursion_values():
    cert = deep_bound_relu(1, 2, 1.0, 3)
    assert cert.recursion_trace == [2.0, 11.0, 35.0, 95.0]
    assert cert.value == 95.0
    assert cert.closed_form == 144.0


def test_relu_needs_ww_at_least_two():
    with pytest.raises(DomainError):
        deep_bound_relu(1, 1, 1.0, 2)


def test_sigmoidal_recursion_values():
    cert = deep_bound_sigmoidal(1, 2, 1.0, 1.0, 2)
    assert cert.recursion_trace == [2.0, 7.0, 17.0]
    assert cert.closed_form == 24.0


def test_sigmoidal_below_hypothesis_is_flagged():
    cert = deep_bound_sigmoidal(1, 1, 1.0, 1.0, 3)
    assert not cert.hypothesis_holds
    assert cert.value > cert.closed_form


def test_shallow_relu():
    cert = shallow_bound(1, 2, 1.0, 1.0, "relu")
    assert cert.value == 11.0
    assert cert.closed_form == 18.0
    with pytest.raises(DomainError):
        shallow_bound(1, 2, 1.0, 0.5, "relu")


@pytest.mark.parametrize("kind", ["relu", "sigmoidal"])
def test_empirical_below_certificate(kind):
    act = Activation(kind=kind)
    for W, n, w in [(2, 1, 1.0), (3, 2, 2.0), (2, 3, 1.0)]:
        emp = empirical_lipschitz((1, W, n), act, w, 16, seed=5)
        cert = deep_bound_sigmoidal(1, W, 1.0, w, n) if kind == "sigmoidal" else deep_bound_relu(1, W, w, n)
        assert emp <= cert.value


def test_empirical_is_seeded():
    act = Activation(kind="relu")
    assert empirical_lipschitz((1, 2, 2), act, 1.0, 8, seed=1) == empirical_lipschitz((1, 2, 2), act, 1.0, 8, seed=1)


def test_empirical_rejects_degenerate_pairs():
    y = np.zeros(7)
    with pytest.raises(InputError):
        empirical_lipschitz((1, 2, 1), Activation(kind="relu"), 1.0, 1, pairs=[(y, y)])


def test_growth_classes():
    assert growth_class(BoundFamily(kind="constant", C=1.0), "deep").exponents == (1.0, 0.0)
    assert growth_class(BoundFamily(kind="polynomial", C=1.0, delta=2.0), "deep").exponents == (1.0, 1.0)
    assert growth_class(BoundFamily(kind="exponential", C=1.0, c=1.0, nu=1.0), "deep").exponents == (2.0, 0.0)
    assert growth_class(BoundFamily(kind="exponential", C=1.0, c=1.0, nu=0.0), "deep").kind == "linear"
    assert growth_class(BoundFamily(kind="constant", C=1.0), "shallow").exponents == (0.0, 1.0)
    assert growth_class(BoundFamily(kind="exponential", C=1.0, c=1.0, nu=2.0), "shallow").exponents == (2.0, 0.0)


def test_phi_gamma_values():
    deep = phi_gamma_of(BoundFamily(kind="constant", C=1.0), 4, "deep", c=1.0)
    assert deep.phi == pytest.approx(4.0)
    assert deep.gamma == pytest.approx(16.0)
    shallow = phi_gamma_of(BoundFamily(kind="polynomial", C=1.0, delta=1.0), 4, "shallow", c=1.0)
    assert shallow.phi == pytest.approx(4.0)
    with pytest.raises(InputError):
        phi_gamma_of(BoundFamily(kind="constant", C=1.0), 1, "deep")


def test_huge_phi_overflows_to_inf():
    pg = phi_gamma_of(BoundFamily(kind="exponential", C=1.0, c=1.0, nu=1.0), 64, "deep")
    assert math.isinf(pg.gamma)


def test_exponent_bracket_is_ordered():
    low, high = lipschitz_exponent_bracket(Activation(kind="relu"), 1, 2, [2.0, 4.0], [2, 4, 8])
    assert 0 < low <= high


AXES = {"d": [1, 2, 4], "W": [2, 3, 5], "L": [1.0, 1.5], "w": [1.0, 2.0], "n": list(range(1, 9))}


def _deep(kind, d, W, L, w, n):
    if kind == "sigmoidal":
        return deep_bound_sigmoidal(d, W, L, w, n).value
    return deep_bound_relu(d, W, w, n).value


@pytest.mark.parametrize("kind", ["sigmoidal", "relu"])
@pytest.mark.parametrize("axis", list(AXES))
def test_deep_bound_nondecreasing_along_each_axis(kind, axis):
    others = [name for name in AXES if name != axis]
    for fixed in itertools.product(*(AXES[name] for name in others)):
        point = dict(zip(others, fixed))
        values = [_deep(kind, **{**point, axis: v}) for v in AXES[axis]]
        assert all(b >= a for a, b in zip(values, values[1:])), (axis, point)


@pytest.mark.parametrize("kind", ["sigmoidal", "relu"])
@pytest.mark.parametrize("axis", ["d", "W", "L", "w"])
def test_shallow_bound_nondecreasing_along_each_axis(kind, axis):
    others = [name for name in ("d", "W", "L", "w") if name != axis]
    for fixed in itertools.product(*(AXES[name] for name in others)):
        point = dict(zip(others, fixed))
        values = [shallow_bound(act_kind=kind, **{**point, axis: v}).value for v in AXES[axis]]
        assert all(b >= a for a, b in zip(values, values[1:])), (axis, point)
