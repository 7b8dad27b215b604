"""Theta-quotient building blocks, the modular identity catalog and its adjudication"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import mpmath

from .catalog import Catalog, Fix, Record
from .mparith import BigReal, DomainError, Precision, magnitude, make, pow_rational
from .qseries import (
    DENOMINATOR_FLOOR,
    ThetaPoint,
    as_point,
    require_floor,
    theta_fneg,
    theta_phi,
    theta_psi,
)
from .radexpr import (
    Add,
    Call,
    EvaluationError,
    Expr,
    Mul,
    Neg,
    Pow,
    Symbol,
    evaluate,
    expand,
    number,
    to_text,
)
from .report import CheckResult, SampleResult, status_from

SCREEN_SAMPLES = 2
SCREEN_DIGITS = 30
SINGULAR_GAP = Fraction(1, 1000)
NONVANISHING_FLOOR = Fraction(1, 100)
# theta series held to the denominator floor; A, B and C check their own factors
FLOORED_CALLS = frozenset({"phi", "psi", "psim", "fneg"})


class SingularSampleError(DomainError):
    """The bridge variable u equals 1 at the sample; choose another nome"""


class QuotientKind(Enum):
    A = "A"
    B = "B"
    C = "C"


def _denominator(first: BigReal, second: BigReal, labels: tuple[str, str]) -> BigReal:
    return require_floor(first, labels[0]) * require_floor(second, labels[1])


def eval_quotient(kind: QuotientKind | str, r: int, q, prec: Precision) -> BigReal:
    """A_r, B_r or C_r at the nome q.

    A_r = phi(q^r) phi(q^15r) / (phi(q^3r) phi(q^5r))
    B_r = q^(r/3) f(-q^r) f(-q^15r) / (f(-q^3r) f(-q^5r))
    C_r = q^r psi(-q^r) psi(-q^15r) / (psi(-q^3r) psi(-q^5r))
    """
    kind = QuotientKind(kind)
    if r < 1:
        raise DomainError(f"{kind.value}_r needs a positive integer r, got {r}")
    point = as_point(q)
    if kind is QuotientKind.A:
        func, name = (lambda m: theta_phi(point.power(m), prec)), "phi"
    elif kind is QuotientKind.B:
        func, name = (lambda m: theta_fneg(point.power(m), prec)), "f(-x)"
    else:
        func, name = (lambda m: theta_psi(point.power(m).negate(), prec)), "psi(-x)"

    top = func(r) * func(15 * r)
    bottom = _denominator(func(3 * r), func(5 * r), (f"{name} at q^{3 * r}", f"{name} at q^{5 * r}"))
    value = top / bottom

    if kind is QuotientKind.A:
        return value
    x = point.realize(prec)
    if kind is QuotientKind.B:
        return pow_rational(x, Fraction(r, 3)) * value
    return x ** r * value


def _as_int(x: BigReal, what: str) -> int:
    n = int(mpmath.nint(x.value))
    if n != x.value:
        raise EvaluationError(f"{what} needs an integer argument, got {x}")
    return n


class SampleContext:
    """Evaluation environment for P and Q definitions at one nome"""

    def __init__(self, q, prec: Precision):
        self.point = as_point(q)
        self.prec = prec
        self.q = self.point.realize(prec)
        self.memo: dict = {}
        self.calls = {
            "phi": lambda x: theta_phi(x, prec),
            "psi": lambda x: theta_psi(x, prec),
            "psim": lambda x: theta_psi(-x, prec),
            "fneg": lambda x: theta_fneg(x, prec),
            "qpow": self._qpow,
            "A": lambda r: eval_quotient(QuotientKind.A, _as_int(r, "A"), self.point, prec),
            "B": lambda r: eval_quotient(QuotientKind.B, _as_int(r, "B"), self.point, prec),
            "C": lambda r: eval_quotient(QuotientKind.C, _as_int(r, "C"), self.point, prec),
        }

    def _qpow(self, x: BigReal) -> BigReal:
        if self.q.value <= 0:
            raise DomainError(f"qpow needs q > 0, got {self.q}")
        with self.prec.context():
            return BigReal(mpmath.power(self.q.value, x.value), self.prec)

    def evaluate(self, expr: Expr) -> BigReal:
        return evaluate(
            expr, {"q": self.q}, self.prec, self.calls, self.memo, floor=DENOMINATOR_FLOOR, floored=FLOORED_CALLS
        )

    @property
    def label(self) -> str:
        return str(self.point)


# ---------------------------------------------------------------------------
# Records


@dataclass(frozen=True)
class Term:
    coef: Fraction
    p: Fraction
    q: Fraction

    def __str__(self):
        return f"{self.coef}*P^({self.p})*Q^({self.q})"


@lru_cache(maxsize=4096)
def _expansion(relation: Expr) -> tuple[Term, ...] | None:
    try:
        terms = expand(relation)
    except EvaluationError:
        return None
    return tuple(Term(c, p, q) for (p, q), c in sorted(terms.items()))


@dataclass(frozen=True)
class Identity:
    """A relation between two theta quotients P and Q, stored as a sum equal to zero"""
    name: str
    p_def: Expr
    q_def: Expr
    relation: Expr
    source: str = ""
    note: str = ""
    fixes: tuple[Fix, ...] = ()

    @property
    def terms(self) -> tuple[Term, ...]:
        terms = _expansion(self.relation)
        if terms is None:
            raise EvaluationError(f"relation of {self.name} is not a Laurent polynomial in P and Q")
        return terms

    def with_field(self, name: str, expr: Expr) -> Identity:
        key = {"P": "p_def", "Q": "q_def", "relation": "relation"}[name]
        return replace(self, **{key: expr})

    def fixed(self) -> Identity | None:
        """The identity with catalog fixes applied, or None when there are none"""
        if not self.fixes:
            return None
        out = self
        for fix in self.fixes:
            out = out.with_field(fix.field, fix.expr)
        return out

    @classmethod
    def from_record(cls, record: Record, fixes: dict[str, Fix] | None = None) -> Identity:
        fields = record.fields
        return cls(
            name=record.key,
            p_def=fields["P"],
            q_def=fields["Q"],
            relation=fields["relation"],
            source=record.source,
            note=record.note,
            fixes=tuple((fixes or {}).values()),
        )


@dataclass(frozen=True)
class FactoredIdentity:
    """A relation written as a product of factors, one of which vanishes identically"""
    name: str
    p_def: Expr
    q_def: Expr
    factors: tuple[Expr, ...]
    vanishing: int  # 1-based
    expanded: Expr
    source: str = ""
    note: str = ""

    @classmethod
    def from_record(cls, record: Record) -> FactoredIdentity:
        fields = record.fields
        return cls(
            name=record.key,
            p_def=fields["P"],
            q_def=fields["Q"],
            factors=tuple(fields["factors"]),
            vanishing=record.meta["vanishing"],
            expanded=fields["expanded"],
            source=record.source,
            note=record.note,
        )

    def expansion_matches(self) -> bool:
        """Exact check that the product of the factors is the expanded form"""
        product = Mul(self.factors) if len(self.factors) > 1 else self.factors[0]
        return expand(product) == expand(self.expanded)


def identities_from_catalog(catalog: Catalog) -> list[Identity]:
    return [Identity.from_record(r, catalog.fixes_for("identity", r.key)) for r in catalog.of_kind("identity")]


def factored_from_catalog(catalog: Catalog) -> list[FactoredIdentity]:
    return [FactoredIdentity.from_record(r) for r in catalog.of_kind("factored")]


# ---------------------------------------------------------------------------
# Residuals


def quotient_values(p_def: Expr, q_def: Expr, q, prec: Precision) -> tuple[BigReal, BigReal]:
    ctx = SampleContext(q, prec)
    return ctx.evaluate(p_def), ctx.evaluate(q_def)


def relation_value(relation: Expr, P: BigReal, Q: BigReal, prec: Precision, name: str = "relation") -> BigReal:
    """Signed value of the relation; by expanded terms when it is a Laurent polynomial"""
    P, Q = make(P, prec), make(Q, prec)
    terms = _expansion(relation)
    try:
        if terms is None:
            return evaluate(relation, {"P": P, "Q": Q}, prec)
        total = make(0, prec)
        for t in terms:
            total = total + pow_rational(P, t.p) * pow_rational(Q, t.q) * t.coef
        return total
    except DomainError as e:
        raise DomainError(f"{name}: {e}") from e


def residual(identity: Identity, q, prec: Precision) -> BigReal:
    """|sum coef * P^eP * Q^eQ| at the nome q"""
    point = as_point(q)
    try:
        P, Q = quotient_values(identity.p_def, identity.q_def, point, prec)
        return abs(relation_value(identity.relation, P, Q, prec, identity.name))
    except DomainError as e:
        raise type(e)(f"{identity.name} at {point}: {e}") from e


@dataclass
class _Sampled:
    """P and Q realized at every sample, or the error each sample raised"""
    labels: list[str]
    values: list[tuple[BigReal, BigReal] | None]
    errors: list[str]

    @classmethod
    def collect(cls, identity: Identity, samples: list[ThetaPoint], prec: Precision) -> _Sampled:
        labels, values, errors = [], [], []
        for point in samples:
            labels.append(str(point))
            try:
                values.append(quotient_values(identity.p_def, identity.q_def, point, prec))
                errors.append("")
            except DomainError as e:
                values.append(None)
                errors.append(f"{identity.name} at {point}: {e}")
        return cls(labels, values, errors)

    def residuals(self, relation: Expr, prec: Precision, name: str, indices=None) -> list[SampleResult]:
        out = []
        for i in indices if indices is not None else range(len(self.labels)):
            if self.values[i] is None:
                out.append(SampleResult(self.labels[i], error=self.errors[i]))
                continue
            P, Q = self.values[i]
            try:
                value = relation_value(relation, P, Q, prec, name)
                out.append(SampleResult(self.labels[i], abs(value)))
            except DomainError as e:
                out.append(SampleResult(self.labels[i], error=f"{name} at {self.labels[i]}: {e}"))
        return out


# ---------------------------------------------------------------------------
# Single-edit candidates for misprinted relations


def _negate(e: Expr) -> Expr:
    return e.expr if isinstance(e, Neg) else Neg(e)


def _mutations(node: Expr) -> Iterator[tuple[str, Expr]]:
    """Every tree reachable by one sign toggle or one exponent halving/doubling"""
    if isinstance(node, Add):
        items = node.items
        for i, item in enumerate(items):
            yield f"sign of {to_text(_negate(item))} flipped", Add(items[:i] + (_negate(item),) + items[i + 1:])
        for i, item in enumerate(items):
            for desc, m in _mutations(item):
                yield desc, Add(items[:i] + (m,) + items[i + 1:])
    elif isinstance(node, Mul):
        for i, item in enumerate(node.items):
            for desc, m in _mutations(item):
                yield desc, Mul(node.items[:i] + (m,) + node.items[i + 1:])
    elif isinstance(node, Neg):
        for desc, m in _mutations(node.expr):
            yield desc, Neg(m)
    elif isinstance(node, Pow):
        base = to_text(node.base)
        for p in (node.exponent / 2, node.exponent * 2):
            yield f"exponent of {base} changed from {node.exponent} to {p}", Pow(node.base, p)
        for desc, m in _mutations(node.base):
            yield desc, Pow(m, node.exponent)
    elif isinstance(node, Call):
        for i, arg in enumerate(node.args):
            for desc, m in _mutations(arg):
                yield desc, Call(node.func, node.args[:i] + (m,) + node.args[i + 1:])


def candidate_relations(relation: Expr) -> Iterator[tuple[str, Expr]]:
    """Single edits of a printed relation: sign toggles, '=' insertions, exponent slips"""
    yield from _mutations(relation)
    if isinstance(relation, Add):
        items = relation.items
        for i in range(1, len(items)):
            moved = Add(items[:i] + tuple(_negate(x) for x in items[i:]))
            yield f"'=' inserted before {to_text(items[i])}", moved


def _class_key(relation: Expr):
    """Expansion up to overall sign, or the text when the relation does not expand"""
    terms = _expansion(relation)
    if terms is None:
        return ("text", to_text(relation))
    if not terms:
        return None
    if terms[0].coef < 0:
        terms = tuple(Term(-t.coef, t.p, t.q) for t in terms)
    return ("terms", terms)


@dataclass
class Candidate:
    description: str
    relation: Expr
    samples: list[SampleResult] = field(default_factory=list)


def search_corrections(
    identity: Identity,
    sampled: _Sampled,
    prec: Precision,
    tol,
) -> list[list[Candidate]]:
    """Equivalence classes of single-edit relations that verify on every sample"""
    screen = prec.scaled(max(10, min(SCREEN_DIGITS, prec.digits)))
    screen_tol = screen.tolerance()
    usable = [i for i, v in enumerate(sampled.values) if v is not None]
    if not usable:
        return []
    picks = [usable[0], usable[len(usable) // 2]][:SCREEN_SAMPLES]
    screened = _Sampled(
        sampled.labels,
        [None if v is None else (make(v[0], screen), make(v[1], screen)) for v in sampled.values],
        sampled.errors,
    )

    classes: dict = {}
    seen: set = set()
    for desc, relation in candidate_relations(identity.relation):
        key = _class_key(relation)
        if key is None or key in seen:
            if key in classes:
                classes[key].append(Candidate(desc, relation, classes[key][0].samples))
            continue
        seen.add(key)
        first = screened.residuals(relation, screen, identity.name, picks)
        if any(s.error or s.residual >= screen_tol for s in first):
            continue
        full = sampled.residuals(relation, prec, identity.name)
        if status_from(full, tol) == "verified":
            classes[key] = [Candidate(desc, relation, full)]
    return list(classes.values())


# ---------------------------------------------------------------------------
# Verification


def _finish(result: CheckResult, started: float) -> CheckResult:
    result.duration = time.perf_counter() - started
    return result


def verify(
    identity: Identity,
    samples: list[ThetaPoint],
    prec: Precision,
    tol=None,
    suite: str = "identities",
    search: bool = True,
) -> CheckResult:
    """Verify as printed; on failure try the catalog fix, then the single-edit search"""
    started = time.perf_counter()
    tol = prec.tolerance() if tol is None else tol
    samples = [as_point(s) for s in samples]

    sampled = _Sampled.collect(identity, samples, prec)
    printed = sampled.residuals(identity.relation, prec, identity.name)
    status = status_from(printed, tol)
    result = CheckResult(identity.name, suite, status, tol, printed, note=identity.note)
    if printed and status != "error":
        result.details["printed_max"] = magnitude(result.max_residual)

    fixed = identity.fixed()
    if status == "verified":
        if fixed is not None:
            result.status = "failed"
            result.note = "catalog fix is unnecessary: the printed form verifies"
        return _finish(result, started)
    if status == "error":
        return _finish(result, started)

    if fixed is not None:
        fixed_sampled = _Sampled.collect(fixed, samples, prec)
        fixed_res = fixed_sampled.residuals(fixed.relation, prec, fixed.name)
        fields = ", ".join(f.field for f in fixed.fixes)
        result.samples = fixed_res
        if status_from(fixed_res, tol) == "verified":
            result.status = "corrected"
            result.correction = "; ".join(f"{f.field} = {to_text(f.expr)}" for f in fixed.fixes)
            result.note = f"catalog fix of {fields} ({fixed.fixes[0].source}): {fixed.fixes[0].note}"
        else:
            result.status = "failed"
            result.note = f"catalog fix of {fields} does not verify"
        return _finish(result, started)

    if not search:
        return _finish(result, started)

    classes = search_corrections(identity, sampled, prec, tol)
    if not classes:
        result.status = "unresolved"
        result.note = "no single edit of the printed relation verifies"
    elif len(classes) == 1:
        best = classes[0][0]
        result.status = "corrected"
        result.samples = best.samples
        result.correction = to_text(best.relation)
        paths = " or ".join(c.description for c in classes[0])
        result.note = f"printed form fails; minimal correction: {paths}"
    else:
        result.status = "ambiguous"
        result.note = "several inequivalent single edits verify: " + " | ".join(c[0].description for c in classes)
    return _finish(result, started)


def perturbed(identity: Identity, index: int, delta: int = 1) -> Identity:
    """The identity with `delta` added to the coefficient of its index-th expanded term"""
    t = identity.terms[index]
    extra = Mul((number(delta), Pow(Symbol("P"), t.p), Pow(Symbol("Q"), t.q)))
    return replace(identity, relation=Add((identity.relation, extra)), fixes=())


# ---------------------------------------------------------------------------
# Factored forms


def factor_analysis(fid: FactoredIdentity, q, prec: Precision) -> list[BigReal]:
    """Signed value of every factor at q"""
    P, Q = quotient_values(fid.p_def, fid.q_def, q, prec)
    return [evaluate(f, {"P": P, "Q": Q}, prec) for f in fid.factors]


def verify_factored(fid: FactoredIdentity, samples: list[ThetaPoint], prec: Precision, tol=None) -> CheckResult:
    """Vanishing factor below tol, all others above 10^-2, product equal to the expanded form"""
    started = time.perf_counter()
    tol = prec.tolerance() if tol is None else tol
    floor = mpmath.mpf(NONVANISHING_FLOOR.numerator) / NONVANISHING_FLOOR.denominator
    result = CheckResult(fid.name, "factors", "verified", tol, note=fid.note)

    exact = fid.expansion_matches()
    smallest: mpmath.mpf | None = None
    worst_product = mpmath.mpf(0)
    for point in samples:
        point = as_point(point)
        try:
            P, Q = quotient_values(fid.p_def, fid.q_def, point, prec)
            values = [evaluate(f, {"P": P, "Q": Q}, prec) for f in fid.factors]
            product = values[0]
            for v in values[1:]:
                product = product * v
            whole = evaluate(fid.expanded, {"P": P, "Q": Q}, prec)
        except DomainError as e:
            result.samples.append(SampleResult(str(point), error=f"{fid.name} at {point}: {e}"))
            continue
        result.samples.append(SampleResult(str(point), abs(values[fid.vanishing - 1])))
        others = [abs(v.value) for i, v in enumerate(values) if i != fid.vanishing - 1]
        if others:
            low = min(others)
            smallest = low if smallest is None else min(smallest, low)
        gap = abs(product.value - whole.value) / max(1, abs(whole.value))
        worst_product = max(worst_product, gap)

    result.status = status_from(result.samples, tol)
    result.details["vanishing_factor"] = str(fid.vanishing)
    result.details["expansion_exact"] = "yes" if exact else "no"
    result.details["product_gap"] = magnitude(worst_product)
    if smallest is not None:
        result.details["min_other_factor"] = magnitude(smallest)
    if result.status == "verified":
        if not exact:
            result.status = "failed"
            result.note = "product of factors does not expand to the stated form"
        elif smallest is not None and smallest <= floor:
            result.status = "failed"
            result.note = f"a non-vanishing factor dropped to {magnitude(smallest)}"
        elif worst_product >= tol:
            result.status = "failed"
            result.note = "factor product disagrees numerically with the expanded form"
    return _finish(result, started)


# ---------------------------------------------------------------------------
# Bridge between the B, A and C quotients


@dataclass
class BridgeResiduals:
    """Residuals of the B_2 bridge in both u-forms, printed and corrected"""
    a_form: BigReal
    c_form: BigReal
    printed_a_form: BigReal
    printed_c_form: BigReal
    consistency: BigReal

    @property
    def residual(self) -> BigReal:
        return max(self.a_form, self.c_form)


def _nonsingular(u: BigReal, what: str) -> BigReal:
    gap = mpmath.mpf(SINGULAR_GAP.numerator) / SINGULAR_GAP.denominator
    if abs(u.value - 1) < gap:
        raise SingularSampleError(f"{what} = {u} is within {SINGULAR_GAP} of 1")
    return u


def bridge_residuals(q, prec: Precision) -> BridgeResiduals:
    point = as_point(q)
    x = point.realize(prec)
    u = _nonsingular(eval_quotient(QuotientKind.A, 1, point, prec), "A_1")
    w = _nonsingular(eval_quotient(QuotientKind.C, 1, point, prec), "C_1")
    b2 = eval_quotient(QuotientKind.B, 2, point, prec)
    cube = b2 ** 3
    # the printed left side drops the q^(2/3) prefactor of B_2
    printed_cube = cube / x ** 2

    a_rhs = u * ((u - 1) / (u + 1)) ** 2
    c_rhs = w * w * (1 + w) / (1 - w)
    printed_c = w * w * ((w + 1) / (w - 1)) ** 2
    return BridgeResiduals(
        a_form=abs(cube - a_rhs),
        c_form=abs(cube - c_rhs),
        printed_a_form=abs(printed_cube - a_rhs),
        printed_c_form=abs(printed_cube - printed_c),
        consistency=abs(u - (1 + w) / (1 - w)),
    )


def check_bridge_S311(q, prec: Precision) -> BigReal:
    """Larger of the two corrected bridge residuals at q"""
    return bridge_residuals(q, prec).residual


def verify_bridges(samples: list[ThetaPoint], prec: Precision, tol=None) -> list[CheckResult]:
    started = time.perf_counter()
    tol = prec.tolerance() if tol is None else tol
    bridge = CheckResult("S311", "bridges", "verified", tol)
    l7 = CheckResult("S311-l7-consistency", "bridges", "verified", tol)
    printed_worst = mpmath.mpf(0)
    for point in samples:
        point = as_point(point)
        label = str(point)
        try:
            r = bridge_residuals(point, prec)
        except DomainError as e:
            bridge.samples.append(SampleResult(label, error=str(e)))
            l7.samples.append(SampleResult(label, error=str(e)))
            continue
        bridge.samples.append(SampleResult(label, r.residual))
        l7.samples.append(SampleResult(label, r.consistency))
        printed_worst = max(printed_worst, r.printed_a_form.value, r.printed_c_form.value)
    bridge.status = status_from(bridge.samples, tol)
    l7.status = status_from(l7.samples, tol)
    bridge.details["printed_residual"] = magnitude(printed_worst)
    bridge.note = "B_2^3 = u((u-1)/(u+1))^2 with u = A_1 and B_2^3 = u^2(1+u)/(1-u) with u = C_1"
    if printed_worst >= tol:
        bridge.note += f"; the printed displays leave residual {magnitude(printed_worst)}"
    _finish(bridge, started)
    return [bridge, l7]
