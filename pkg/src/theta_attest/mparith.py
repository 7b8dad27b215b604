"""Arbitrary-precision reals with an explicit decimal working precision"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

DEFAULT_GUARD = 10
MIN_DIGITS = 10


class DomainError(ValueError):
    """A value lies outside the domain of the requested operation"""


class DenominatorFloorError(DomainError):
    """A quotient denominator fell below the evaluation floor"""


@dataclass(frozen=True)
class Precision:
    """Requested decimal digits plus internal guard digits"""
    digits: int
    guard: int = DEFAULT_GUARD

    def __post_init__(self):
        if self.digits < MIN_DIGITS:
            raise ValueError(f"digits must be >= {MIN_DIGITS}, got {self.digits}")
        if self.guard < 0:
            raise ValueError(f"guard must be >= 0, got {self.guard}")

    @property
    def working(self) -> int:
        return self.digits + self.guard

    def context(self):
        """mpmath context manager running at the working precision"""
        return mpmath.workdps(self.working)

    def eps(self) -> mpmath.mpf:
        with self.context():
            return mpmath.mpf(10) ** (-self.working)

    def tolerance(self, offset: int = 10) -> mpmath.mpf:
        """10^(offset - digits), the residual contract used throughout"""
        with self.context():
            return mpmath.mpf(10) ** (offset - self.digits)

    def scaled(self, digits: int) -> Precision:
        return Precision(digits, self.guard)


def _lift(x, prec: Precision) -> mpmath.mpf:
    if isinstance(x, BigReal):
        return x.value
    if isinstance(x, Fraction):
        with prec.context():
            return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, (int, float, mpmath.mpf)):
        return mpmath.mpf(x)
    if isinstance(x, str):
        with prec.context():
            return mpmath.mpf(x)
    raise TypeError(f"cannot convert {type(x).__name__} to BigReal")


def _join(a: BigReal, b) -> Precision:
    if isinstance(b, BigReal) and b.prec.digits < a.prec.digits:
        return b.prec
    return a.prec


@dataclass(frozen=True, eq=False)
class BigReal:
    """An mpmath value tagged with the precision it was computed at"""
    value: mpmath.mpf
    prec: Precision

    def _binary(self, other, op, reverse: bool = False) -> BigReal:
        prec = _join(self, other)
        with prec.context():
            o = _lift(other, prec)
            v = op(o, self.value) if reverse else op(self.value, o)
            return BigReal(+v, prec)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    def __radd__(self, other):
        return self._binary(other, lambda a, b: a + b, reverse=True)

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: a - b, reverse=True)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    def __rmul__(self, other):
        return self._binary(other, lambda a, b: a * b, reverse=True)

    def __truediv__(self, other):
        if _lift(other, self.prec) == 0:
            raise DomainError("division by zero")
        return self._binary(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        if self.value == 0:
            raise DomainError("division by zero")
        return self._binary(other, lambda a, b: a / b, reverse=True)

    def __pow__(self, exponent):
        if isinstance(exponent, int):
            if exponent < 0 and self.value == 0:
                raise DomainError("zero raised to a negative power")
            with self.prec.context():
                return BigReal(self.value ** exponent, self.prec)
        return pow_rational(self, Fraction(exponent))

    def __neg__(self):
        with self.prec.context():
            return BigReal(-self.value, self.prec)

    def __abs__(self):
        with self.prec.context():
            return BigReal(abs(self.value), self.prec)

    def __float__(self):
        return float(self.value)

    def __eq__(self, other):
        if not isinstance(other, (BigReal, int, Fraction, mpmath.mpf)):
            return NotImplemented
        with self.prec.context():
            return self.value == _lift(other, self.prec)

    def __hash__(self):
        return hash(self.value)

    def __lt__(self, other):
        with self.prec.context():
            return self.value < _lift(other, self.prec)

    def __le__(self, other):
        with self.prec.context():
            return self.value <= _lift(other, self.prec)

    def __gt__(self, other):
        with self.prec.context():
            return self.value > _lift(other, self.prec)

    def __ge__(self, other):
        with self.prec.context():
            return self.value >= _lift(other, self.prec)

    def __repr__(self):
        return f"BigReal({to_string(self, 20)}, digits={self.prec.digits})"

    def __str__(self):
        return to_string(self)

    @property
    def sign(self) -> int:
        return (self.value > 0) - (self.value < 0)


def make(x, prec: Precision) -> BigReal:
    """Create a BigReal from an int, Fraction, decimal string, mpf or BigReal"""
    with prec.context():
        return BigReal(+_lift(x, prec), prec)


def pi(prec: Precision) -> BigReal:
    with prec.context():
        return BigReal(+mpmath.pi, prec)


def exp(x: BigReal) -> BigReal:
    if not mpmath.isfinite(x.value):
        raise DomainError(f"exp of non-finite value {x.value}")
    with x.prec.context():
        return BigReal(mpmath.exp(x.value), x.prec)


def pow_rational(x: BigReal, p: Fraction | int) -> BigReal:
    """x^p computed as an integer power of the denominator-th root"""
    p = Fraction(p)
    if x.value == 0:
        if p > 0:
            return make(0, x.prec)
        raise DomainError(f"0 raised to non-positive power {p}")
    if x.value < 0 and p.denominator != 1:
        raise DomainError(f"negative base {to_string(x, 10)} under fractional power {p}")
    with x.prec.context():
        if p.denominator == 1:
            return BigReal(x.value ** p.numerator, x.prec)
        root = mpmath.root(x.value, p.denominator)
        return BigReal(root ** p.numerator, x.prec)


def sqrt(x: BigReal) -> BigReal:
    return pow_rational(x, Fraction(1, 2))


def to_string(x: BigReal | mpmath.mpf, digits: int | None = None) -> str:
    """Decimal rendering with the given number of significant digits"""
    if isinstance(x, BigReal):
        value, digits = x.value, digits or x.prec.digits
    else:
        value, digits = x, digits or 15
    with mpmath.workdps(digits + 5):
        return mpmath.nstr(value, digits, strip_zeros=False)


def magnitude(x: BigReal | mpmath.mpf, digits: int = 3) -> str:
    """Short scientific rendering for residuals"""
    value = x.value if isinstance(x, BigReal) else x
    if value == 0:
        return "0"
    return mpmath.nstr(value, digits, min_fixed=1, max_fixed=0)
