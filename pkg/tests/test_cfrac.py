"""Tests for theta_attest continued fraction routes"""

from fractions import Fraction

import pytest

from theta_attest.catalog import load_catalog
from theta_attest.cfrac import (
    CF_POINTS,
    cf_state,
    h_cf_prefix,
    h_from_param,
    h_product,
    h_theta,
    in_cf_window,
    table_from_catalog,
    table_lines,
    verify_routes,
    verify_table,
)
from theta_attest.mparith import DomainError, Precision, make
from theta_attest.qseries import ThetaPoint, sample_points

PREC = Precision(40)
TOL = PREC.tolerance()


@pytest.mark.parametrize("q", ["0.05", "0.3", "0.6"])
def test_theta_route_matches_product(q):
    assert abs(h_theta(q, PREC) - h_product(q, PREC)) < TOL


def test_product_at_zero_and_outside_disc():
    assert h_product(0, PREC) == 0
    with pytest.raises(DomainError):
        h_product(1, PREC)


def test_theta_route_direct_summation():
    """(1.2002000020 - 1.0020000000) / (1.2002000020 + 1.0020000000)"""
    assert abs(h_theta("0.1", PREC) - Fraction(9000091, 10 ** 8)) < Fraction(1, 10 ** 9)


def test_small_nome_leading_term():
    """H(q) = q + O(q^2)"""
    q = Fraction(1, 1000)
    assert abs(h_theta(q, PREC) - q) < Fraction(2, 10 ** 6)


@pytest.mark.parametrize("q", CF_POINTS)
def test_prefix_within_q8(q):
    delta = abs(h_theta(q, PREC) - h_cf_prefix(q, PREC))
    assert delta < make(q, PREC) ** 8


@pytest.mark.parametrize("digits", [15, 40])
def test_prefix_window_includes_its_boundary(digits):
    prec = Precision(digits)
    assert in_cf_window(make("0.15", prec))
    assert not in_cf_window(make("0.1500000000001", prec))
    assert h_cf_prefix("0.15", prec) > 0
    with pytest.raises(DomainError):
        h_cf_prefix("0.1500000000001", prec)


def test_prefix_outside_window():
    with pytest.raises(DomainError):
        h_cf_prefix(Fraction(1, 5), PREC)
    with pytest.raises(DomainError):
        cf_state(0, PREC)


def test_forward_recurrence_matches_prefix():
    state = cf_state(Fraction(1, 10), PREC)
    assert state.depth == 3
    assert abs(state.value - h_cf_prefix(Fraction(1, 10), PREC)) < TOL


@pytest.mark.parametrize("n", [Fraction(5, 9), Fraction(20, 3)])
def test_bridge_through_parameter(n):
    assert abs(h_from_param(n, PREC) - h_theta(ThetaPoint.nome(n), PREC)) < TOL


def test_bridge_rejects_nonpositive_n():
    with pytest.raises(DomainError):
        h_from_param(0, PREC)


def test_table_lines():
    catalog = load_catalog()
    lines = table_lines(catalog, PREC)
    assert [line.n for line in lines] == [row.n for row in table_from_catalog(catalog)]
    assert len(lines) == 5
    assert sum(line.corrected for line in lines) == 3
    for line in lines:
        assert line.delta < TOL


def test_table_suite():
    report = verify_table(load_catalog(), PREC)
    assert report.total == 10
    assert report.ok, [r.message for r in report.results if not r.passed]


def test_routes_suite():
    report = verify_routes(PREC, sample_points(3))
    assert [r.name for r in report.results] == ["H-product", "H-cf-prefix"]
    assert report.ok
