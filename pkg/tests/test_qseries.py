"""Tests for theta_attest theta functions and elliptic integrals"""

from fractions import Fraction

import mpmath
import pytest

from theta_attest.mparith import DomainError, Precision, make, to_string
from theta_attest.qseries import (
    DenominatorFloorError,
    ThetaPoint,
    _realize,
    _terms_for,
    check_ee11,
    check_l8,
    check_pentagonal,
    elliptic_K,
    elliptic_point,
    euler_product,
    harmonic_points,
    require_floor,
    sample_points,
    theta_fneg,
    theta_general,
    theta_phi,
    theta_psi,
)

PREC = Precision(50)
POINTS = ("0.05", "0.3", "0.6")


def close(value, reference, tol=PREC.tolerance()):
    with mpmath.workdps(80):
        return abs(value.value - reference) < tol


def test_phi_direct_summation():
    """phi(0.1) = 1 + 2(0.1 + 10^-4 + 10^-9 + 10^-16 + ...)"""
    assert to_string(theta_phi("0.1", Precision(15))) == "1.20020000200000"
    assert to_string(theta_phi("-0.1", Precision(12))) == "0.800199998000"


def test_psi_direct_summation():
    """psi(-0.1) = 1 - 0.1 - 10^-3 + 10^-6 + 10^-10 - 10^-15 - ..."""
    assert to_string(theta_psi("0.1", Precision(12))) == "1.10100100010"
    assert to_string(theta_psi("-0.1", Precision(12))) == "0.899001000100"


@pytest.mark.parametrize("q", POINTS + ("-0.4",))
def test_phi_matches_jtheta(q):
    with mpmath.workdps(70):
        reference = mpmath.jtheta(3, 0, mpmath.mpf(q))
    assert close(theta_phi(q, PREC), reference)


@pytest.mark.parametrize("q", POINTS)
def test_psi_matches_jtheta(q):
    """psi(q) = theta_2(0, q^(1/2)) / (2 q^(1/8))"""
    with mpmath.workdps(70):
        x = mpmath.mpf(q)
        reference = mpmath.jtheta(2, 0, mpmath.sqrt(x)) / (2 * mpmath.root(x, 8))
    assert close(theta_psi(q, PREC), reference)


@pytest.mark.parametrize("q", POINTS)
def test_fneg_matches_q_pochhammer(q):
    with mpmath.workdps(70):
        reference = mpmath.qp(mpmath.mpf(q))
    assert close(theta_fneg(q, PREC), reference)
    assert close(euler_product(q, PREC), reference)


def test_general_theta_triple_product():
    """f(a, b) = (-a; ab)(-b; ab)(ab; ab)"""
    with mpmath.workdps(70):
        a, b = mpmath.mpf("0.2"), mpmath.mpf("0.3")
        reference = mpmath.qp(-a, a * b) * mpmath.qp(-b, a * b) * mpmath.qp(a * b, a * b)
    assert close(theta_general(Fraction(1, 5), Fraction(3, 10), PREC), reference)


def test_general_theta_specializes_to_phi():
    value = theta_general(Fraction(1, 4), Fraction(1, 4), PREC)
    assert abs(value - theta_phi(Fraction(1, 4), PREC)) < PREC.tolerance()


def test_general_theta_domain():
    with pytest.raises(DomainError):
        theta_general(1, 1, PREC)


def test_phi_outside_unit_disc():
    with pytest.raises(DomainError):
        theta_phi(1, PREC)
    with pytest.raises(DomainError):
        theta_phi("-1.5", PREC)


def test_euler_product_rejects_negative_nome():
    with pytest.raises(DomainError):
        euler_product("-0.2", PREC)


def test_pentagonal_cross_check():
    for point in sample_points(5):
        assert check_pentagonal(point, PREC) < PREC.tolerance(5)


def test_l8_identities():
    for point in sample_points(5) + [ThetaPoint.nome(Fraction(5, 3))]:
        first, second = check_l8(point, PREC)
        assert first < PREC.tolerance()
        assert second < PREC.tolerance()


def test_elliptic_K_matches_ellipk():
    with mpmath.workdps(70):
        reference = mpmath.ellipk(mpmath.mpf("0.09"))
    assert close(elliptic_K(Fraction(3, 10), PREC), reference)


def test_elliptic_K_domain():
    with pytest.raises(DomainError):
        elliptic_K(0, PREC)
    with pytest.raises(DomainError):
        elliptic_K(1, PREC)


def test_elliptic_point_singular_modulus():
    """k = 1/sqrt(2) is self-complementary, so its nome is e^-pi"""
    k = make(Fraction(1, 2), PREC) ** Fraction(1, 2)
    point = elliptic_point(k, PREC)
    assert abs(point.K - point.Kprime) < PREC.tolerance()
    with mpmath.workdps(70):
        assert close(point.nome().realize(PREC), mpmath.exp(-mpmath.pi))


@pytest.mark.parametrize("k", [Fraction(3, 10), Fraction(9, 10)])
def test_ee11(k):
    assert check_ee11(k, PREC) < PREC.tolerance()


def test_nome_realization():
    point = ThetaPoint.nome(Fraction(5, 9))
    with mpmath.workdps(70):
        assert close(point.realize(PREC), mpmath.exp(-mpmath.pi * mpmath.sqrt(mpmath.mpf(5) / 9)))


def test_nome_power_and_negate():
    point = ThetaPoint.nome(5, 3, -1)
    cube = point.power(3)
    assert cube == ThetaPoint.nome(45, 3, -1)
    assert abs(cube.realize(PREC) - point.realize(PREC) ** 3) < PREC.tolerance()
    assert point.negate() == ThetaPoint.nome(5, 3, 1)
    assert ThetaPoint.literal(Fraction(1, 10)).power(2) == ThetaPoint.literal(Fraction(1, 100))


def test_nome_validation():
    with pytest.raises(DomainError):
        ThetaPoint.nome(0)
    with pytest.raises(DomainError):
        ThetaPoint.nome(1, 1, 2)
    with pytest.raises(DomainError):
        ThetaPoint.literal(1).realize(PREC)


def test_point_rendering():
    assert str(ThetaPoint.literal(Fraction(1, 20))) == "q=1/20"
    assert str(ThetaPoint.nome(Fraction(5, 9))) == "q=exp(-pi*sqrt(5/9))"


def test_sample_points_default_window():
    points = sample_points()
    assert len(points) == 20
    assert points[0] == ThetaPoint.literal(Fraction(1, 20))
    assert points[-1] == ThetaPoint.literal(Fraction(3, 5))


def test_sample_points_validation():
    with pytest.raises(ValueError):
        sample_points(0)
    with pytest.raises(DomainError):
        sample_points(5, Fraction(1, 2), Fraction(1))


def test_harmonic_points():
    assert harmonic_points(3) == [ThetaPoint.literal(Fraction(1, n)) for n in (2, 3, 4)]


def test_require_floor():
    small = make(Fraction(1, 10000), PREC)
    with pytest.raises(DenominatorFloorError) as exc:
        require_floor(small, "phi(q^15)")
    assert "phi(q^15)" in str(exc.value)
    assert require_floor(make(Fraction(1, 2), PREC), "x") == Fraction(1, 2)


@pytest.mark.parametrize("q", POINTS)
def test_doubling_the_term_count_changes_nothing(q):
    """Sums carried to twice the truncation point agree with the truncated series"""
    with mpmath.workdps(80):
        x = mpmath.mpf(q)
        n_phi = 2 * _terms_for(x, lambda n: n * n, PREC.eps() / 2)
        n_psi = 2 * _terms_for(x, lambda n: n * (n + 1) // 2, PREC.eps())
        phi = 1 + 2 * mpmath.fsum(x ** (n * n) for n in range(1, n_phi + 1))
        psi = mpmath.fsum(x ** (n * (n + 1) // 2) for n in range(n_psi + 1))
    assert close(theta_phi(q, PREC), phi)
    assert close(theta_psi(q, PREC), psi)


def test_realizations_are_cached_and_bounded():
    point = ThetaPoint.nome(Fraction(7, 3))
    assert point.realize(PREC) is point.realize(PREC)
    assert point.realize(PREC) is not point.realize(Precision(60))
    assert _realize.cache_info().maxsize is not None
