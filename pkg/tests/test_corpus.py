import math

import pytest

from corpus import (
    CORPUS_CONFIG,
    build_corpus,
    check_corpus,
    corpus_profile,
    corpus_widths,
    dyadic_entry,
    sigma_entry,
    takagi_entry,
    write_corpus,
)
from spaces import load_point_cloud


def test_build_quick_corpus():
    entries = build_corpus(quick=True, seed=5)
    labels = [e.label for e in entries]
    assert labels == ["dyadic_interval", "sigma_J20", "takagi_3_64"]
    assert entries[0].cloud.size == 1025
    assert len(build_corpus(quick=False, seed=5)) == 2 + len(CORPUS_CONFIG["sigma_truncations"])


def test_sigma_span_witness_reaches_next_sigma():
    entry = sigma_entry(6)
    assert [w.id for w in entry.witnesses] == ["sigma_span_1", "sigma_span_2", "sigma_span_3"]
    estimates = corpus_widths(entry)
    for m, par in enumerate(entry.witnesses, start=1):
        full = [e for e in estimates if e.witness == par.id and math.isclose(e.gamma, par.gamma)]
        assert full[0].raw == pytest.approx(1.0 / math.log2(m + 2))


def test_dyadic_profile():
    profile = corpus_profile(dyadic_entry(65, 3))
    assert [b.n for b in profile.brackets] == [0, 1, 2, 3]
    for b in profile.brackets:
        assert b.lower <= 2.0 ** (-(b.n + 1)) <= b.upper


def test_small_corpus_is_carl_consistent():
    entries = [dyadic_entry(65, 3), sigma_entry(6), takagi_entry(2, 16, 33, seed=3)]
    reports = check_corpus(entries)
    assert set(reports) == {"dyadic_interval", "sigma_J6", "takagi_2_16"}
    for report in reports.values():
        assert report.ok
        assert report.checked > 0


def test_write_corpus(tmp_path):
    paths = write_corpus(str(tmp_path), quick=True, seed=5)
    assert len(paths) == 3
    cloud = load_point_cloud(paths[1])
    assert cloud.label == "sigma_J20"
    assert cloud.size == 21
