"""Ramanujan theta functions, the Euler product and complete elliptic integrals"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import mpmath

from .mparith import BigReal, DenominatorFloorError, DomainError, Precision, make, pi

__all__ = [
    "DENOMINATOR_FLOOR",
    "DenominatorFloorError",
    "EllipticPoint",
    "Literal",
    "Nome",
    "ThetaPoint",
    "as_point",
    "check_ee11",
    "check_l8",
    "check_pentagonal",
    "elliptic_K",
    "elliptic_point",
    "euler_product",
    "harmonic_points",
    "require_floor",
    "sample_points",
    "theta_fneg",
    "theta_general",
    "theta_phi",
    "theta_psi",
]

DENOMINATOR_FLOOR = Fraction(1, 1000)
MAX_TERMS = 1_000_000


@dataclass(frozen=True)
class Literal:
    """A nome given by value"""
    q: Fraction | mpmath.mpf


@dataclass(frozen=True)
class Nome:
    """sign * exp(-pi * sqrt(n/k))"""
    n: Fraction
    k: Fraction = Fraction(1)
    sign: int = 1

    def __post_init__(self):
        if self.n <= 0 or self.k <= 0:
            raise DomainError(f"nome needs n > 0 and k > 0, got n={self.n}, k={self.k}")
        if self.sign not in (1, -1):
            raise DomainError(f"nome sign must be +1 or -1, got {self.sign}")


@lru_cache(maxsize=4096)
def _realize(form: Union[Literal, Nome], prec: Precision) -> BigReal:
    if isinstance(form, Literal):
        return make(form.q, prec)
    with prec.context():
        t = mpmath.mpf(form.n.numerator * form.k.denominator) / (form.n.denominator * form.k.numerator)
        return BigReal(form.sign * mpmath.exp(-mpmath.pi * mpmath.sqrt(t)), prec)


@dataclass(frozen=True)
class ThetaPoint:
    """A nome at which theta functions are evaluated; realizations are cached per precision"""
    form: Union[Literal, Nome]

    @classmethod
    def literal(cls, q) -> ThetaPoint:
        if isinstance(q, (int, str, float)):
            q = Fraction(q)
        return cls(Literal(q))

    @classmethod
    def nome(cls, n, k=1, sign: int = 1) -> ThetaPoint:
        return cls(Nome(Fraction(n), Fraction(k), sign))

    def realize(self, prec: Precision) -> BigReal:
        value = _realize(self.form, prec)
        if abs(value.value) >= 1:
            raise DomainError(f"nome {self} has |q| >= 1")
        return value

    def power(self, m: int) -> ThetaPoint:
        """The point for q^m"""
        if m < 1:
            raise DomainError(f"nome power must be a positive integer, got {m}")
        form = self.form
        if isinstance(form, Literal):
            return ThetaPoint(Literal(form.q ** m))
        return ThetaPoint(Nome(form.n * m * m, form.k, form.sign ** m))

    def negate(self) -> ThetaPoint:
        form = self.form
        if isinstance(form, Literal):
            return ThetaPoint(Literal(-form.q))
        return ThetaPoint(Nome(form.n, form.k, -form.sign))

    def __str__(self):
        form = self.form
        if isinstance(form, Literal):
            return f"q={form.q}" if isinstance(form.q, Fraction) else f"q={mpmath.nstr(form.q, 15)}"
        sign = "-" if form.sign < 0 else ""
        return f"q={sign}exp(-pi*sqrt({form.n / form.k}))"


def as_point(q) -> ThetaPoint:
    """Coerce a ThetaPoint, rational, decimal string or mpf into a ThetaPoint"""
    if isinstance(q, ThetaPoint):
        return q
    return ThetaPoint.literal(q)


QArg = Union[ThetaPoint, BigReal, Fraction, int, str]


def _value(q: QArg, prec: Precision) -> mpmath.mpf:
    if isinstance(q, BigReal):
        value = q.value
    else:
        value = as_point(q).realize(prec).value
    if abs(value) >= 1:
        raise DomainError(f"theta functions need |q| < 1, got {mpmath.nstr(value, 10)}")
    return value


def _terms_for(a: mpmath.mpf, growth, eps: mpmath.mpf) -> int:
    """Smallest N with |a|^growth(N+1) / (1 - |a|) below eps"""
    if a == 0:
        return 0
    with mpmath.workdps(20):
        target = mpmath.log(eps * (1 - a)) / mpmath.log(a)
    n = 0
    while growth(n + 1) < target:
        n += 1
        if n > MAX_TERMS:
            raise DomainError(f"series at |q|={mpmath.nstr(a, 10)} needs more than {MAX_TERMS} terms")
    return n


def _side(x: mpmath.mpf, y: mpmath.mpf, eps: mpmath.mpf) -> mpmath.mpf:
    """sum_{n>=0} x^n (xy)^(n(n-1)/2); consecutive term ratio is x (xy)^n"""
    xy = x * y
    total = mpmath.mpf(0)
    term = mpmath.mpf(1)
    ratio = x
    for _ in range(MAX_TERMS):
        total += term
        term *= ratio
        # once ratios are below 1/2 the tail is majorized by 2|next term|
        if abs(ratio) <= 0.5 and 2 * abs(term) < eps:
            return total
        ratio *= xy
    raise DomainError(f"theta series did not converge within {MAX_TERMS} terms")


def theta_general(a, b, prec: Precision) -> BigReal:
    """Ramanujan's f(a, b) = sum over all n of a^(n(n+1)/2) b^(n(n-1)/2)"""
    with prec.context():
        a = make(a, prec).value
        b = make(b, prec).value
        if abs(a * b) >= 1:
            raise DomainError(f"f(a, b) needs |ab| < 1, got {mpmath.nstr(a * b, 10)}")
        eps = prec.eps()
        return BigReal(_side(a, b, eps) + _side(b, a, eps) - 1, prec)


def theta_phi(q: QArg, prec: Precision) -> BigReal:
    """phi(q) = 1 + 2 sum q^(n^2)"""
    with prec.context():
        x = _value(q, prec)
        n_max = _terms_for(abs(x), lambda n: n * n, prec.eps() / 2)
        total = mpmath.mpf(0)
        term = mpmath.mpf(1)
        step = x
        x2 = x * x
        for _ in range(n_max):
            term *= step
            step *= x2
            total += term
        return BigReal(1 + 2 * total, prec)


def theta_psi(q: QArg, prec: Precision) -> BigReal:
    """psi(q) = sum_{n>=0} q^(n(n+1)/2)"""
    with prec.context():
        x = _value(q, prec)
        n_max = _terms_for(abs(x), lambda n: n * (n + 1) // 2, prec.eps())
        total = mpmath.mpf(1)
        term = mpmath.mpf(1)
        for n in range(1, n_max + 1):
            term *= x ** n
            total += term
        return BigReal(total, prec)


def theta_fneg(q: QArg, prec: Precision) -> BigReal:
    """f(-q) = f(-q, -q^2)"""
    with prec.context():
        x = _value(q, prec)
        return theta_general(-x, -x * x, prec)


def euler_product(q: QArg, prec: Precision) -> BigReal:
    """prod_{n>=1} (1 - q^n), truncated on the log-tail bound q^(N+1)/(1-q)^2"""
    with prec.context():
        x = _value(q, prec)
        if x < 0:
            raise DomainError(f"euler_product needs 0 <= q < 1, got {mpmath.nstr(x, 10)}")
        if x == 0:
            return make(1, prec)
        with mpmath.workdps(20):
            target = mpmath.log(prec.eps() * (1 - x) ** 2) / mpmath.log(x)
        n_max = max(1, int(mpmath.ceil(target)))
        if n_max > MAX_TERMS:
            raise DomainError(f"euler_product at q={mpmath.nstr(x, 10)} needs more than {MAX_TERMS} factors")
        total = mpmath.mpf(1)
        power = mpmath.mpf(1)
        for _ in range(n_max):
            power *= x
            total *= 1 - power
        return BigReal(total, prec)


def require_floor(value: BigReal, what: str, floor: Fraction = DENOMINATOR_FLOOR) -> BigReal:
    """Raise DenominatorFloorError when a denominator is too close to zero"""
    if abs(value.value) <= floor.numerator / mpmath.mpf(floor.denominator):
        raise DenominatorFloorError(f"denominator {what} = {mpmath.nstr(value.value, 5)} is below {floor}")
    return value


@dataclass(frozen=True)
class EllipticPoint:
    """Modulus k with its complement and both complete integrals"""
    k: BigReal
    kprime: BigReal
    alpha: BigReal
    K: BigReal
    Kprime: BigReal

    def nome(self) -> ThetaPoint:
        """q = exp(-pi K'/K)"""
        prec = self.K.prec
        with prec.context():
            return ThetaPoint.literal(mpmath.exp(-mpmath.pi * self.Kprime.value / self.K.value))


def elliptic_K(k, prec: Precision) -> BigReal:
    """K(k) = pi / (2 agm(1, sqrt(1 - k^2)))"""
    with prec.context():
        k = make(k, prec).value
        if not 0 < k < 1:
            raise DomainError(f"elliptic_K needs 0 < k < 1, got {mpmath.nstr(k, 10)}")
        return BigReal(mpmath.pi / (2 * mpmath.agm(1, mpmath.sqrt(1 - k * k))), prec)


def elliptic_point(k, prec: Precision) -> EllipticPoint:
    with prec.context():
        k = make(k, prec)
        kprime = BigReal(mpmath.sqrt(1 - k.value ** 2), prec)
        return EllipticPoint(
            k=k,
            kprime=kprime,
            alpha=k * k,
            K=elliptic_K(k, prec),
            Kprime=elliptic_K(kprime, prec),
        )


def check_ee11(k, prec: Precision) -> BigReal:
    """|K(k) - (pi/2) phi(q)^2| at q = exp(-pi K'/K)"""
    point = elliptic_point(k, prec)
    phi = theta_phi(point.nome(), prec)
    return abs(point.K - pi(prec) / 2 * phi * phi)


def check_l8(q: QArg, prec: Precision) -> tuple[BigReal, BigReal]:
    """Residuals of f(-q)^3 = phi(-q)^2 psi(q) and f(-q^2)^3 = phi(-q) psi(q)^2"""
    with prec.context():
        x = _value(q, prec)
        xb = BigReal(x, prec)
        phi_m = theta_phi(BigReal(-x, prec), prec)
        psi = theta_psi(xb, prec)
        f1 = theta_fneg(xb, prec)
        f2 = theta_fneg(BigReal(x * x, prec), prec)
        return abs(f1 ** 3 - phi_m * phi_m * psi), abs(f2 ** 3 - phi_m * psi * psi)


def check_pentagonal(q: QArg, prec: Precision) -> BigReal:
    """|f(-q) - prod (1 - q^n)|"""
    return abs(theta_fneg(q, prec) - euler_product(q, prec))


def sample_points(count: int = 20, q_min=Fraction(1, 20), q_max=Fraction(3, 5)) -> list[ThetaPoint]:
    """Evenly spaced exact rational nomes in [q_min, q_max]"""
    q_min, q_max = Fraction(q_min), Fraction(q_max)
    if count < 1:
        raise ValueError(f"sample count must be >= 1, got {count}")
    if not 0 < q_min <= q_max < 1:
        raise DomainError(f"sampling window must satisfy 0 < q_min <= q_max < 1, got [{q_min}, {q_max}]")
    if count == 1:
        return [ThetaPoint.literal(q_min)]
    step = (q_max - q_min) / (count - 1)
    return [ThetaPoint.literal(q_min + i * step) for i in range(count)]


def harmonic_points(count: int = 20) -> list[ThetaPoint]:
    """q_n = 1/(1+n) for n = 1..count"""
    if count < 1:
        raise ValueError(f"sample count must be >= 1, got {count}")
    return [ThetaPoint.literal(Fraction(1, 1 + n)) for n in range(1, count + 1)]
