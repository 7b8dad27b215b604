"""Tests for theta_attest suite selection"""

from fractions import Fraction

import pytest

from theta_attest.catalog import load_catalog
from theta_attest.config import RunConfig
from theta_attest.qseries import ThetaPoint
from theta_attest.suites import SUITES, make_samples, parse_filter, run_suites, selected_suites


@pytest.fixture(scope="module")
def catalog():
    return load_catalog()


def test_suite_registry_order():
    assert list(SUITES) == [
        "lemmas", "theorems", "factors", "bridges", "closed-forms",
        "intermediates", "relations", "cfrac", "table", "elliptic",
    ]


def test_parse_filter():
    assert parse_filter(None) == []
    assert parse_filter("D*, S2 ,") == ["D*", "S2"]


def test_selected_suites(catalog):
    assert [s.name for s in selected_suites(catalog, ["D*"])] == ["lemmas"]
    assert [s.name for s in selected_suites(catalog, ["S411"])] == ["theorems"]
    assert [s.name for s in selected_suites(catalog, ["h 3 *"])] == ["closed-forms"]
    assert [s.name for s in selected_suites(catalog, ["h13 *"])] == ["table"]
    assert len(selected_suites(catalog, [])) == len(SUITES)


def test_make_samples():
    even = make_samples(RunConfig(samples=3, q_min=Fraction(1, 10), q_max=Fraction(3, 10)))
    assert even == [ThetaPoint.literal(Fraction(x, 10)) for x in (1, 2, 3)]
    assert make_samples(RunConfig(samples=2, sampler="harmonic")) == [
        ThetaPoint.literal(Fraction(1, 2)),
        ThetaPoint.literal(Fraction(1, 3)),
    ]
    with pytest.raises(ValueError):
        make_samples(RunConfig(sampler="random"))


def test_run_suites_drops_unmatched_checks(catalog):
    config = RunConfig(digits=30, samples=3, filter="D*")
    messages = []
    report = run_suites(config, catalog, messages.append)
    assert [r.name for r in report.results] == ["D3", "D5"]
    assert report.ok
    assert messages == ["suite lemmas: " + SUITES["lemmas"].description]


def test_elliptic_suite(catalog):
    report = run_suites(RunConfig(digits=30, filter="ee11"), catalog)
    assert [r.name for r in report.results] == ["ee11"]
    assert report.results[0].status == "verified"
    assert len(report.results[0].samples) == 3
