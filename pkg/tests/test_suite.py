from config import SUITE_CONFIG
from suite import (
    _load,
    constructive_cover,
    network_matches_sum,
    oracle_equivalence,
    run_acceptance_suite,
    rate_round_trips,
    table_rows,
    takagi_identity,
)

QUICK = SUITE_CONFIG["quick"]


def test_takagi_checks_detect_a_corrupted_coefficient():
    assert takagi_identity(QUICK)[0]
    assert not takagi_identity(QUICK, corrupt=True)[0]
    assert network_matches_sum(QUICK)[0]
    assert not network_matches_sum(QUICK, corrupt=True)[0]


def test_data_driven_checks():
    assert table_rows()[0]
    assert rate_round_trips()[0]


def test_constructive_cover():
    passed, detail = constructive_cover(QUICK)
    assert passed, detail


def test_oracle_equivalence():
    passed, detail = oracle_equivalence({"oracle_clouds": 10}, seed=11)
    assert passed, detail


def test_quick_suite_passes():
    report = run_acceptance_suite(quick=True)
    assert [c.id for c in report.criteria] == list(range(1, 11))
    failed = [(c.id, c.detail) for c in report.criteria if not c.passed]
    assert not failed
    assert report.passed


def test_data_rows_name_their_source():
    rates = _load("nn_entropy_rates.json")["rows"]
    assert {(r["regime"], r["source"]) for r in rates} == {("deep", "NNA"), ("shallow", "NNAs")}
    growth = _load("growth_tables.json")["rows"]
    assert {(r["regime"], r["source"]) for r in growth} == {("deep", "Table 1"), ("shallow", "Table 2")}
