"""The order-12 continued fraction H(q) by theta quotient, product and displayed prefix"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from fractions import Fraction

import mpmath

from .catalog import Catalog, Fix, Record
from .mparith import BigReal, DomainError, Precision, make, pow_rational
from .params import param
from .qseries import ThetaPoint, as_point, sample_points, theta_phi
from .radexpr import Expr, evaluate
from .report import CheckResult, VerificationReport, settle_fix, single_sample, status_from

CF_WINDOW = Fraction(15, 100)
CF_POINTS = tuple(Fraction(x) for x in ("1/100", "1/20", "1/10", "3/20"))
MAX_FACTORS = 100_000


def h_theta(q, prec: Precision) -> BigReal:
    """(phi(q) - phi(q^3)) / (phi(q) + phi(q^3))"""
    point = as_point(q)
    a = theta_phi(point, prec)
    b = theta_phi(point.power(3), prec)
    return (a - b) / (a + b)


def h_product(q, prec: Precision) -> BigReal:
    """q prod_j (1-q^(12j-1))(1-q^(12j-11)) / ((1-q^(12j-5))(1-q^(12j-7)))"""
    x = as_point(q).realize(prec)
    with prec.context():
        x = x.value
        if not 0 <= x < 1:
            raise DomainError(f"h_product needs 0 <= q < 1, got {mpmath.nstr(x, 10)}")
        if x == 0:
            return make(0, prec)
        # log of the factors past J is below 4 q^(12J+1) / ((1-q)(1-q^12))
        with mpmath.workdps(20):
            target = mpmath.log(prec.eps() * (1 - x) * (1 - x ** 12) / 4) / mpmath.log(x)
        n_factors = max(1, int(mpmath.ceil((target - 1) / 12)))
        if n_factors > MAX_FACTORS:
            raise DomainError(f"h_product at q={mpmath.nstr(x, 10)} needs more than {MAX_FACTORS} factors")
        total = x
        for j in range(1, n_factors + 1):
            total *= (1 - x ** (12 * j - 1)) * (1 - x ** (12 * j - 11))
            total /= (1 - x ** (12 * j - 5)) * (1 - x ** (12 * j - 7))
        return BigReal(total, prec)


@dataclass(frozen=True)
class CFState:
    """Forward recurrence state after `depth` partial quotients"""
    depth: int
    numerators: tuple[BigReal, BigReal]
    denominators: tuple[BigReal, BigReal]

    @property
    def value(self) -> BigReal:
        return self.numerators[1] / self.denominators[1]


def _partial_quotients(x: BigReal) -> list[tuple[BigReal, BigReal]]:
    """The three displayed (a_i, b_i) pairs of a_1/(b_1 + a_2/(b_2 + a_3/b_3))"""
    return [
        (x * (1 - x), 1 - x ** 3),
        (x ** 3 * (1 - x ** 2) * (1 - x ** 4), (1 - x ** 3) * (1 + x ** 6)),
        (x ** 3 * (1 - x ** 8) * (1 - x ** 10), (1 - x ** 3) * (1 - x ** 12)),
    ]


def in_cf_window(x: BigReal) -> bool:
    """0 < x <= 0.15, with the bound realized at x's own precision"""
    return 0 < x <= CF_WINDOW


def _window(q, prec: Precision) -> BigReal:
    x = as_point(q).realize(prec)
    if not in_cf_window(x):
        raise DomainError(f"continued-fraction prefix is only sound for 0 < q <= {float(CF_WINDOW)}, got {x}")
    return x


def cf_state(q, prec: Precision) -> CFState:
    """Convergent of the displayed prefix by the forward three-term recurrence"""
    x = _window(q, prec)
    one, zero = make(1, prec), make(0, prec)
    nums, dens = (one, zero), (zero, one)
    depth = 0
    for a, b in _partial_quotients(x):
        nums = (nums[1], b * nums[1] + a * nums[0])
        dens = (dens[1], b * dens[1] + a * dens[0])
        depth += 1
        if dens[1].value == 0:
            raise DomainError(f"convergent denominator vanished at depth {depth}")
    return CFState(depth, nums, dens)


def h_cf_prefix(q, prec: Precision) -> BigReal:
    """The displayed three-quotient prefix, evaluated from the innermost quotient outwards"""
    x = _window(q, prec)
    tail = make(0, prec)
    for a, b in reversed(_partial_quotients(x)):
        tail = a / (b + tail)
    return tail


def h_from_param(n, prec: Precision) -> BigReal:
    """H(exp(-pi sqrt(n))) = (3^(1/4) h_{3,3n} - 1) / (3^(1/4) h_{3,3n} + 1)"""
    n = Fraction(n)
    if n <= 0:
        raise DomainError(f"h_from_param needs n > 0, got {n}")
    x = pow_rational(make(3, prec), Fraction(1, 4)) * param("h", 3, 3 * n, prec)
    return (x - 1) / (x + 1)


# ---------------------------------------------------------------------------
# Table


@dataclass(frozen=True)
class TableRow:
    n: Fraction
    expr: Expr
    source: str = ""
    fix: Fix | None = None

    @classmethod
    def from_record(cls, record: Record, fix: Fix | None = None) -> TableRow:
        return cls(record.meta["n"], record.fields["value"], record.source, fix)

    @property
    def point(self) -> ThetaPoint:
        return ThetaPoint.nome(self.n)

    @property
    def effective(self) -> Expr:
        return self.fix.expr if self.fix is not None else self.expr


def table_from_catalog(catalog: Catalog) -> list[TableRow]:
    return [TableRow.from_record(r, catalog.fixes_for("table", r.key).get("value")) for r in catalog.of_kind("table")]


@dataclass
class TableLine:
    """One rendered row: closed form against the series value"""
    n: Fraction
    closed_form: BigReal
    series: BigReal
    delta: BigReal
    corrected: bool


def table_lines(catalog: Catalog, prec: Precision) -> list[TableLine]:
    """Rows as used by the table command, with catalog fixes applied"""
    lets = catalog.let_values(prec)
    lines = []
    for row in table_from_catalog(catalog):
        closed = evaluate(row.effective, lets, prec)
        series = h_theta(row.point, prec)
        lines.append(TableLine(row.n, closed, series, abs(closed - series), row.fix is not None))
    return lines


def verify_table(catalog: Catalog, prec: Precision, tol=None) -> VerificationReport:
    """Every tabulated value against the theta route, and the parameter bridge at each row"""
    tol = prec.tolerance() if tol is None else tol
    bridge_tol = prec.tolerance(8)
    lets = catalog.let_values(prec)
    report = VerificationReport(digits=prec.digits)
    for row in table_from_catalog(catalog):
        started = time.perf_counter()
        label = f"q=exp(-pi*sqrt({row.n}))"

        def residual(r: TableRow) -> BigReal:
            return abs(evaluate(r.expr, lets, prec) - h_theta(r.point, prec))

        samples = single_sample(label, lambda: residual(row))
        result = CheckResult(f"H {row.n}", "table", status_from(samples, tol), tol, samples)
        if row.fix is not None:
            fixed = replace(row, expr=row.fix.expr)
            settle_fix(result, row.fix, lambda: single_sample(label, lambda: residual(fixed)))
        result.duration = time.perf_counter() - started
        report.add(result)

        started = time.perf_counter()
        samples = single_sample(label, lambda: abs(h_from_param(row.n, prec) - h_theta(row.point, prec)))
        bridge = CheckResult(f"h13 {row.n}", "table", status_from(samples, bridge_tol), bridge_tol, samples)
        bridge.duration = time.perf_counter() - started
        report.add(bridge)
    return report


def verify_routes(prec: Precision, samples: list[ThetaPoint] | None = None) -> VerificationReport:
    """Theta against product on the sample window; theta against the prefix inside its window"""
    samples = samples if samples is not None else sample_points()
    report = VerificationReport(digits=prec.digits)

    started = time.perf_counter()
    tol = prec.tolerance(5)
    product = CheckResult("H-product", "cfrac", "verified", tol)
    for point in samples:
        point = as_point(point)
        product.samples.extend(single_sample(str(point), lambda: abs(h_theta(point, prec) - h_product(point, prec))))
    product.status = status_from(product.samples, tol)
    product.duration = time.perf_counter() - started
    report.add(product)

    # the prefix bound is q^8 at each point, so residuals are recorded as |delta| / q^8
    started = time.perf_counter()
    prefix = CheckResult("H-cf-prefix", "cfrac", "verified", 1, note="residuals are |delta| / q^8")
    for q in CF_POINTS:
        point = ThetaPoint.literal(q)
        prefix.samples.extend(
            single_sample(str(point), lambda: abs(h_theta(point, prec) - h_cf_prefix(point, prec)) / make(q, prec) ** 8)
        )
    prefix.status = status_from(prefix.samples, 1)
    prefix.duration = time.perf_counter() - started
    report.add(prefix)
    return report
