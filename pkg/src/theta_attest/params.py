"""The parameter families h, h', l, l' and their explicit values"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache

import mpmath

from .catalog import Catalog, Fix, Record, param_key
from .mparith import BigReal, DomainError, Precision, make, pow_rational
from .qseries import ThetaPoint, require_floor, theta_phi, theta_psi
from .radexpr import Expr, evaluate
from .report import CheckResult, SampleResult, VerificationReport, settle_fix, single_sample, status_from

FAMILIES = ("h", "hp", "l", "lp")

# (a, b, c, d, k) with ab = cd
JY6_CASES = ((5, 12, 3, 20, Fraction(1, 4)), (5, 21, 3, 35, Fraction(1, 7)))
# (k, n, m)
JY7_CASES = ((3, 4, 5), (4, 5, 3), (3, 7, 5), (7, 5, 3))
HL_NS = (Fraction(20), Fraction(4, 5), Fraction(12), Fraction(4, 3), Fraction(15), Fraction(5, 3))
MODULAR_NS = tuple(Fraction(x) for x in ("1/15", "1/20", "1/12", "1/35", "1/21", "15", "20"))


@dataclass(frozen=True)
class ParamSpec:
    family: str
    k: Fraction
    n: Fraction

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown parameter family '{self.family}', expected one of {', '.join(FAMILIES)}")
        object.__setattr__(self, "k", Fraction(self.k))
        object.__setattr__(self, "n", Fraction(self.n))
        if self.k <= 0 or self.n <= 0:
            raise DomainError(f"{self.family}_(k,n) needs k > 0 and n > 0, got k={self.k}, n={self.n}")

    @property
    def key(self) -> str:
        return param_key(self.family, self.k, self.n)

    def __str__(self):
        return f"{self.family}_{{{self.k},{self.n}}}"


def _exp_prefactor(k: Fraction, n: Fraction, prec: Precision) -> BigReal:
    """exp(-(k-1) pi/8 sqrt(n/k))"""
    with prec.context():
        t = mpmath.mpf(n.numerator * k.denominator) / (n.denominator * k.numerator)
        k_minus_one = mpmath.mpf(k.numerator - k.denominator) / k.denominator
        return BigReal(mpmath.exp(-k_minus_one * mpmath.pi / 8 * mpmath.sqrt(t)), prec)


@lru_cache(maxsize=1024)
def eval_param(spec: ParamSpec, prec: Precision) -> BigReal:
    """The defining theta quotient of h, h', l or l' with both nomes realized at prec"""
    sign = -1 if spec.family in ("hp", "l") else 1
    top_point = ThetaPoint.nome(spec.n, spec.k, sign)
    bottom_point = ThetaPoint.nome(spec.n * spec.k, 1, sign)
    theta = theta_phi if spec.family in ("h", "hp") else theta_psi

    top = theta(top_point, prec)
    bottom = require_floor(theta(bottom_point, prec), f"{spec} denominator")
    bottom = bottom * pow_rational(make(spec.k, prec), Fraction(1, 4))
    if spec.family in ("l", "lp"):
        bottom = bottom * _exp_prefactor(spec.k, spec.n, prec)
    return top / bottom


def param(family: str, k, n, prec: Precision) -> BigReal:
    return eval_param(ParamSpec(family, Fraction(k), Fraction(n)), prec)


def check_reciprocal_symmetry(family: str, k, n, prec: Precision) -> tuple[BigReal, BigReal]:
    """|p(k,n) p(k,1/n) - 1| and |p(k,n) - p(n,k)|"""
    k, n = Fraction(k), Fraction(n)
    value = param(family, k, n, prec)
    return abs(value * param(family, k, 1 / n, prec) - 1), abs(value - param(family, n, k, prec))


def check_unit_values(k, prec: Precision) -> dict[str, BigReal]:
    """p(k, 1) - 1 for all four families; only h and l are expected to vanish"""
    return {family: param(family, k, 1, prec) - 1 for family in FAMILIES}


# ---------------------------------------------------------------------------
# Cross relations


def _jy6(family, a, b, c, d, k, prec):
    left = param(family, a, b, prec) * param(family, k * c, k * d, prec)
    return left - param(family, k * a, k * b, prec) * param(family, c, d, prec)


def _jy7(family, k, n, m, prec):
    n, m = Fraction(n), Fraction(m)
    return param(family, k, n / m, prec) * param(family, m, n * k, prec) - param(family, n, m * k, prec)


def _hl3(n, prec):
    h4, l4 = param("h", 3, n, prec) ** 4, param("l", 3, n, prec) ** 4
    return h4 + 3 * h4 * l4 - 3 - l4


def _hl5(n, prec):
    s5 = pow_rational(make(5, prec), Fraction(1, 2))
    h2, l2 = param("h", 5, n, prec) ** 2, param("l", 5, n, prec) ** 2
    return h2 + s5 * h2 * l2 - s5 - l2


def _ndbh5(n, prec):
    x, y = param("h", 3, n, prec), param("h", 3, 25 * n, prec)
    r = y / x
    lhs = 3 * ((x * y) ** 2 + (x * y) ** -2)
    rhs = r ** 3 + 5 * r ** 2 + 5 * r ** -2 + 5 * (r - 1 / r) - r ** -3
    return lhs - rhs


def _srh3(n, prec):
    s5 = pow_rational(make(5, prec), Fraction(1, 2))
    u, v = param("h", 5, n, prec), param("h", 5, 9 * n, prec)
    r = v / u
    return s5 * u * v + s5 / (u * v) - (r ** 2 + 3 * r + 3 / r - r ** -2)


def _relation_cases():
    for a, b, c, d, k in JY6_CASES:
        label = f"(a,b,c,d,k)=({a},{b},{c},{d},{k})"
        yield "jy6", label, lambda prec, args=(a, b, c, d, k): _jy6("h", *args, prec)
        yield "ljy6", label, lambda prec, args=(a, b, c, d, k): _jy6("l", *args, prec)
    for k, n, m in JY7_CASES:
        label = f"(k,n,m)=({k},{n},{m})"
        yield "jy7", label, lambda prec, args=(k, n, m): _jy7("h", *args, prec)
        yield "ljy7", label, lambda prec, args=(k, n, m): _jy7("l", *args, prec)
    for n in HL_NS:
        yield "hl3", f"n={n}", lambda prec, n=n: _hl3(n, prec)
        yield "hl5", f"n={n}", lambda prec, n=n: _hl5(n, prec)
    for n in MODULAR_NS:
        yield "NDBh5", f"n={n}", lambda prec, n=n: _ndbh5(n, prec)
        yield "SRh3", f"n={n}", lambda prec, n=n: _srh3(n, prec)


def check_cross_relations(prec: Precision, tol=None) -> VerificationReport:
    """Residuals of the product, symmetry and modular relations between the families"""
    tol = prec.tolerance() if tol is None else tol
    report = VerificationReport(digits=prec.digits)
    checks: dict[str, CheckResult] = {}
    started: dict[str, float] = {}
    for name, label, func in _relation_cases():
        if name not in checks:
            checks[name] = report.add(CheckResult(name, "relations", "verified", tol))
            started[name] = time.perf_counter()
        try:
            checks[name].samples.append(SampleResult(label, abs(func(prec))))
        except DomainError as e:
            checks[name].samples.append(SampleResult(label, error=f"{name} at {label}: {e}"))
    for name, check in checks.items():
        check.status = status_from(check.samples, tol)
        check.duration = time.perf_counter() - started[name]
    return report


# ---------------------------------------------------------------------------
# Closed forms


@dataclass(frozen=True)
class ClosedFormEntry:
    spec: ParamSpec
    expr: Expr
    source: str = ""
    note: str = ""
    fix: Fix | None = None

    @classmethod
    def from_record(cls, record: Record, fix: Fix | None = None) -> ClosedFormEntry:
        meta = record.meta
        spec = ParamSpec(meta["family"], meta["k"], meta["n"])
        return cls(spec, record.fields["value"], record.source, record.note, fix)


@dataclass(frozen=True)
class ProductEntry:
    """A product of two parameters with its stated value"""
    name: str
    factors: tuple[ParamSpec, ...]
    expr: Expr
    source: str = ""
    note: str = ""
    fix: Fix | None = None

    @classmethod
    def from_record(cls, record: Record, fix: Fix | None = None) -> ProductEntry:
        factors = tuple(ParamSpec(f, k, n) for f, k, n in record.meta["factors"])
        return cls(record.key, factors, record.fields["value"], record.source, record.note, fix)

    def value(self, prec: Precision) -> BigReal:
        total = make(1, prec)
        for spec in self.factors:
            total = total * eval_param(spec, prec)
        return total


def closed_forms_from_catalog(catalog: Catalog) -> list[ClosedFormEntry]:
    return [
        ClosedFormEntry.from_record(r, catalog.fixes_for("param", r.key).get("value"))
        for r in catalog.of_kind("param")
    ]


def products_from_catalog(catalog: Catalog) -> list[ProductEntry]:
    return [
        ProductEntry.from_record(r, catalog.fixes_for("product", r.key).get("value"))
        for r in catalog.of_kind("product")
    ]


def verify_closed_form(entry: ClosedFormEntry, prec: Precision, lets: dict | None = None) -> BigReal:
    """|eval_param(spec) - value of the closed form|"""
    return abs(eval_param(entry.spec, prec) - evaluate(entry.expr, lets or {}, prec))


def verify_closed_forms(catalog: Catalog, prec: Precision, tol=None) -> VerificationReport:
    tol = prec.tolerance() if tol is None else tol
    lets = catalog.let_values(prec)
    report = VerificationReport(digits=prec.digits)
    for entry in closed_forms_from_catalog(catalog):
        started = time.perf_counter()
        label = f"q=exp(-pi*sqrt({entry.spec.n / entry.spec.k}))"
        samples = single_sample(label, lambda: verify_closed_form(entry, prec, lets))
        result = CheckResult(entry.spec.key, "closed-forms", status_from(samples, tol), tol, samples)
        if entry.fix is not None:
            fixed = replace(entry, expr=entry.fix.expr)
            settle_fix(result, entry.fix, lambda: single_sample(label, lambda: verify_closed_form(fixed, prec, lets)))
        result.duration = time.perf_counter() - started
        report.add(result)
    return report


def verify_intermediates(catalog: Catalog, prec: Precision, tol=None) -> VerificationReport:
    """Products of two parameters against their stated values"""
    tol = prec.tolerance() if tol is None else tol
    lets = catalog.let_values(prec)
    report = VerificationReport(digits=prec.digits)
    for entry in products_from_catalog(catalog):
        started = time.perf_counter()
        label = " * ".join(str(s) for s in entry.factors)

        def residual(expr: Expr, entry=entry) -> BigReal:
            return abs(entry.value(prec) - evaluate(expr, lets, prec))

        samples = single_sample(label, lambda: residual(entry.expr))
        result = CheckResult(entry.name, "intermediates", status_from(samples, tol), tol, samples)
        settle_fix(result, entry.fix, lambda: single_sample(label, lambda: residual(entry.fix.expr)))
        result.duration = time.perf_counter() - started
        report.add(result)
    return report
