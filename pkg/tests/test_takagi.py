import numpy as np
import pytest

from errors import DomainError, InputError
from network import evaluate
from schema import TakagiSpec
from takagi import (
    build_takagi_network,
    coefficient_family,
    error_curve,
    hat,
    hat_iterate,
    psi,
    tail_bound,
    takagi_cloud,
    values_table,
)


def test_hat_values():
    assert hat(0.0) == 0.0
    assert hat(0.25) == 0.5
    assert hat(0.5) == 1.0
    assert hat(0.75) == 0.5
    assert hat(1.0) == 0.0
    assert hat_iterate(2, 0.25) == 1.0
    with pytest.raises(InputError):
        hat_iterate(0, 0.5)


def test_lambda_form_expands():
    spec = TakagiSpec(**{"lambda": 2.0, "n_terms": 3})
    assert spec.coefficients == [0.5, 0.25, 0.125]
    assert spec.n_terms == 3
    assert spec.in_class
    assert not TakagiSpec(coefficients=[0.8, 0.8]).in_class
    with pytest.raises(ValueError):
        TakagiSpec(lam=1.0, n_terms=2)
    with pytest.raises(ValueError):
        TakagiSpec(coefficients=[0.5], in_class=False)


def test_tail_bound():
    assert tail_bound(2.0, 3) == 0.125
    assert tail_bound(4.0, 1) == pytest.approx(1 / 12)
    with pytest.raises(DomainError):
        tail_bound(1.0, 3)


@pytest.mark.parametrize("n", [1, 2, 5, 10])
def test_parabola_identity(n):
    t = np.linspace(0.0, 1.0, 4097)
    error = np.max(np.abs(psi(TakagiSpec(lam=4.0, n_terms=n), t) - t * (1 - t)))
    assert error <= tail_bound(4.0, n) + 16 * np.finfo(float).eps


def test_error_curve_stays_under_tail():
    df = error_curve(4.0, 6)
    assert list(df.columns) == ['n', 'sup_error', 'tail_bound', 'slack']
    assert len(df) == 6
    assert (df['sup_error'] <= df['tail_bound'] + df['slack']).all()
    other = error_curve(3.0, 4, points=513)
    assert (other['sup_error'] <= other['tail_bound'] + other['slack']).all()


@pytest.mark.parametrize("lam,n", [(2.0, 1), (2.0, 4), (4.0, 6), (-3.0, 3)])
def test_network_realizes_partial_sum(lam, n):
    spec = TakagiSpec(lam=lam, n_terms=n)
    net, w = build_takagi_network(spec)
    assert net.W == 4
    assert net.n == n
    assert w == 4.0
    t = np.linspace(0.0, 1.0, 1025)
    assert np.max(np.abs(evaluate(net, t) - psi(spec, t))) < 1e-12


def test_network_bound_grows_with_large_coefficients():
    _, w = build_takagi_network(TakagiSpec(coefficients=[2.0, -3.0]))
    assert w == 12.0
    with pytest.raises(InputError):
        build_takagi_network(TakagiSpec(coefficients=[]))


def test_values_table():
    df = values_table(TakagiSpec(lam=2.0, n_terms=3), points=33)
    assert list(df.columns) == ['t', 'psi', 'network']
    assert np.allclose(df['psi'], df['network'], atol=1e-12)


def test_coefficient_family():
    par = coefficient_family(2, 17)
    assert par.gamma == 2.0
    images = par.images(np.array([[1.0, 0.0], [0.0, 1.0]]))
    grid = np.linspace(0.0, 1.0, 17)
    assert np.allclose(images[0], hat(grid))
    assert np.allclose(images[1], hat(hat(grid)))


def test_takagi_cloud_is_seeded():
    a = takagi_cloud(2, 10, 17, seed=1)
    b = takagi_cloud(2, 10, 17, seed=1)
    assert a.label == "takagi_2_10"
    assert a.dimension == 17
    assert np.array_equal(a.points, b.points)


@pytest.mark.parametrize("lam", [2.0, -3.0, 4.0])
def test_consecutive_partial_sums_differ_by_next_coefficient(lam):
    for n in range(1, 13):
        t = np.linspace(0.0, 1.0, 2 ** (n + 2) + 1)
        gap = psi(TakagiSpec(lam=lam, n_terms=n + 1), t) - psi(TakagiSpec(lam=lam, n_terms=n), t)
        assert np.max(np.abs(gap)) == pytest.approx(abs(lam) ** -(n + 1), rel=1e-6)
