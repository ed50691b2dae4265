import math

import numpy as np
import pytest

from schema import (
    BoundFamily,
    CorpusEntry,
    CriterionResult,
    EntropyBracket,
    EntropyProfile,
    GrowthFunction,
    LipschitzParametrization,
    Norm,
    PointCloudSet,
    RateFunction,
    SuiteReport,
)


def test_norm_parses_inf():
    nrm = Norm(kind="lp", p="inf", dimension=3)
    assert math.isinf(nrm.p)
    assert nrm.is_sup
    assert nrm.model_dump()["p"] == "inf"
    with pytest.raises(ValueError):
        Norm(kind="lp", p=0.5, dimension=2)


def test_sup_grid_validation():
    nrm = Norm.uniform_grid(3, d=2)
    assert nrm.dimension == 9
    assert nrm.grid_nodes().shape == (9, 2)
    assert nrm.grid_spacing() == 0.5
    with pytest.raises(ValueError):
        Norm(kind="sup_grid", dimension=2, grid_axes=[[0.5, 0.25]])
    with pytest.raises(ValueError):
        Norm(kind="sup_grid", dimension=3, grid_axes=[[0.0, 1.0]])


def test_point_cloud_is_read_only():
    K = PointCloudSet(points=[[0.0], [1.0]], norm=Norm.lp(2, 1))
    with pytest.raises(ValueError):
        K.points[0, 0] = 3.0
    with pytest.raises(ValueError):
        PointCloudSet(points=[[0.0, 1.0]], norm=Norm.lp(2, 1))
    with pytest.raises(ValueError):
        PointCloudSet(points=[[math.nan]], norm=Norm.lp(2, 1))


def test_bound_family_values():
    assert BoundFamily(kind="polynomial", C=2.0, delta=1.0).value(4) == 8.0
    assert BoundFamily(kind="exponential", C=1.0, c=1.0, nu=1.0).value(3) == 8.0
    assert math.isinf(BoundFamily(kind="exponential", C=1.0, c=2000.0).value(1))
    with pytest.raises(ValueError):
        BoundFamily(kind="constant", C=0.5)
    with pytest.raises(ValueError):
        BoundFamily(kind="polynomial", C=1.0)


def test_rate_function():
    rate = RateFunction(kind="polylog", alpha=1.0, beta=1.0)
    assert rate.value(4) == pytest.approx(0.5)
    assert rate.n0() == pytest.approx(math.e)
    assert rate.describe() == "[log2 n]^1 n^-1"
    assert RateFunction(kind="loginv", alpha=2.0).value(16) == pytest.approx(1 / 16)
    assert RateFunction(kind="expo", c=1.0, a=1.0).value(3) == pytest.approx(1 / 8)
    with pytest.raises(ValueError):
        RateFunction(kind="polylog", alpha=0.0)
    with pytest.raises(ValueError):
        rate.value(1)


def test_growth_function():
    assert GrowthFunction(kind="nlogn", c=2.0).value(4) == 16.0
    assert GrowthFunction(kind="power", p=0.0, q=1.0).value(1) == 0.0
    assert GrowthFunction(kind="power", p=0.0, q=1.0).log_hypothesis
    assert not GrowthFunction(kind="const").log_hypothesis
    table = GrowthFunction(kind="tabulated", values=[0.0, 1.0, 3.0])
    assert table.value(3) == 3.0
    assert table.log_hypothesis
    with pytest.raises(ValueError):
        table.value(4)
    with pytest.raises(ValueError):
        table.exponents


def test_entropy_profile_ordering():
    with pytest.raises(ValueError):
        EntropyProfile(brackets=[
            EntropyBracket(n=0, lower=0.1, upper=0.2, method="greedy"),
            EntropyBracket(n=1, lower=0.1, upper=0.3, method="greedy"),
        ])
    with pytest.raises(ValueError):
        EntropyBracket(n=0, lower=0.3, upper=0.2, method="exact")
    profile = EntropyProfile(brackets=[
        EntropyBracket(n=0, lower=0.4, upper=0.5, method="exact"),
        EntropyBracket(n=2, lower=0.3, upper=0.3, method="exact"),
    ])
    assert profile.lower_at(1) == 0.3
    assert profile.upper_at(1) == 0.5
    assert profile.max_index == 2


def test_parametrization_spot_check():
    nrm = Norm.lp(2, 1)
    par = LipschitzParametrization(param_dim=1, radius=1.0, lipschitz_constant=2.0,
                                   map=lambda y: 2.0 * y, norm=nrm)
    assert par.gamma == 2.0
    assert par.images(np.array([[0.5]])).tolist() == [[1.0]]
    with pytest.raises(ValueError):
        LipschitzParametrization(param_dim=1, radius=1.0, lipschitz_constant=1.0,
                                 map=lambda y: 2.0 * y, norm=nrm)


def test_corpus_entry_label():
    K = PointCloudSet(points=[[0.0], [1.0]], norm=Norm.lp(2, 1), label="pair")
    entry = CorpusEntry(cloud=K, n_max=1, delta=0.25)
    assert entry.label == "pair"
    assert entry.gamma_factors == [0.25, 0.5, 1.0]


def test_suite_report_passed():
    ok = CriterionResult(id=1, name="a", passed=True)
    bad = CriterionResult(id=2, name="b", passed=False)
    assert SuiteReport(quick=True, criteria=[ok]).passed
    assert not SuiteReport(quick=True, criteria=[ok, bad]).passed
