"""Verification suites and the name filter used by `theta-attest verify`"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fnmatch import fnmatchcase
from fractions import Fraction
from typing import Callable

from .catalog import Catalog
from .cfrac import table_from_catalog, verify_routes, verify_table
from .config import RunConfig
from .identities import (
    factored_from_catalog,
    identities_from_catalog,
    verify,
    verify_bridges,
    verify_factored,
)
from .mparith import DomainError, Precision, make, sqrt
from .params import (
    check_cross_relations,
    closed_forms_from_catalog,
    products_from_catalog,
    verify_closed_forms,
    verify_intermediates,
)
from .qseries import ThetaPoint, check_ee11, check_l8, check_pentagonal, harmonic_points, sample_points
from .report import CheckResult, SampleResult, VerificationReport, status_from

THEOREMS = ("S01", "S31", "S411", "psi4", "S51", "S71")
RELATIONS = ("jy6", "ljy6", "jy7", "ljy7", "hl3", "hl5", "NDBh5", "SRh3")
ROUTES = ("H-product", "H-cf-prefix")
ELLIPTIC_MODULI = (("k=3/10", Fraction(3, 10)), ("k=1/sqrt(2)", None), ("k=9/10", Fraction(9, 10)))
SAMPLERS = ("even", "harmonic")


@dataclass
class SuiteContext:
    catalog: Catalog
    prec: Precision
    samples: list[ThetaPoint]
    patterns: list[str] = field(default_factory=list)

    def wanted(self, name: str) -> bool:
        return not self.patterns or any(fnmatchcase(name, p) for p in self.patterns)


@dataclass(frozen=True)
class Suite:
    name: str
    description: str
    names: Callable[[Catalog], list[str]]
    run: Callable[[SuiteContext], VerificationReport]


def _lemma_names(catalog: Catalog) -> list[str]:
    return [i.name for i in identities_from_catalog(catalog) if i.name not in THEOREMS] + ["l8", "pentagonal"]


def _theorem_names(catalog: Catalog) -> list[str]:
    return [i.name for i in identities_from_catalog(catalog) if i.name in THEOREMS]


def _identity_suite(ctx: SuiteContext, names: list[str], suite: str) -> VerificationReport:
    report = VerificationReport(digits=ctx.prec.digits)
    for identity in identities_from_catalog(ctx.catalog):
        if identity.name in names and ctx.wanted(identity.name):
            report.add(verify(identity, ctx.samples, ctx.prec, suite=suite))
    return report


def _per_sample(name: str, suite: str, ctx: SuiteContext, tol, func) -> CheckResult:
    started = time.perf_counter()
    result = CheckResult(name, suite, "verified", tol)
    for point in ctx.samples:
        try:
            result.samples.append(SampleResult(str(point), func(point)))
        except DomainError as e:
            result.samples.append(SampleResult(str(point), error=f"{name} at {point}: {e}"))
    result.status = status_from(result.samples, tol)
    result.duration = time.perf_counter() - started
    return result


def run_lemmas(ctx: SuiteContext) -> VerificationReport:
    report = _identity_suite(ctx, _lemma_names(ctx.catalog), "lemmas")
    if ctx.wanted("l8"):
        report.add(_per_sample("l8", "lemmas", ctx, ctx.prec.tolerance(), lambda q: max(check_l8(q, ctx.prec))))
    if ctx.wanted("pentagonal"):
        report.add(_per_sample("pentagonal", "lemmas", ctx, ctx.prec.tolerance(5),
                               lambda q: check_pentagonal(q, ctx.prec)))
    return report


def run_theorems(ctx: SuiteContext) -> VerificationReport:
    return _identity_suite(ctx, list(THEOREMS), "theorems")


def run_factors(ctx: SuiteContext) -> VerificationReport:
    report = VerificationReport(digits=ctx.prec.digits)
    for fid in factored_from_catalog(ctx.catalog):
        if ctx.wanted(fid.name):
            report.add(verify_factored(fid, ctx.samples, ctx.prec))
    return report


def run_bridges(ctx: SuiteContext) -> VerificationReport:
    report = VerificationReport(digits=ctx.prec.digits)
    for result in verify_bridges(ctx.samples, ctx.prec):
        if ctx.wanted(result.name):
            report.add(result)
    return report


def run_elliptic(ctx: SuiteContext) -> VerificationReport:
    started = time.perf_counter()
    tol = ctx.prec.tolerance()
    result = CheckResult("ee11", "elliptic", "verified", tol)
    for label, k in ELLIPTIC_MODULI:
        k = sqrt(make(Fraction(1, 2), ctx.prec)) if k is None else k
        try:
            result.samples.append(SampleResult(label, check_ee11(k, ctx.prec)))
        except DomainError as e:
            result.samples.append(SampleResult(label, error=f"ee11 at {label}: {e}"))
    result.status = status_from(result.samples, tol)
    result.duration = time.perf_counter() - started
    return VerificationReport([result], ctx.prec.digits)


def _table_names(catalog: Catalog) -> list[str]:
    rows = table_from_catalog(catalog)
    return [f"H {r.n}" for r in rows] + [f"h13 {r.n}" for r in rows]


SUITES: dict[str, Suite] = {
    s.name: s
    for s in (
        Suite("lemmas", "modular equations used by the theorems, l8, pentagonal", _lemma_names, run_lemmas),
        Suite("theorems", "mixed modular equations in P-Q form", _theorem_names, run_theorems),
        Suite("factors", "factored relations and their vanishing factor",
              lambda c: [f.name for f in factored_from_catalog(c)], run_factors),
        Suite("bridges", "the A_1 / C_1 cube bridge and its l7 consistency",
              lambda c: ["S311", "S311-l7-consistency"], run_bridges),
        Suite("closed-forms", "explicit values of h and l",
              lambda c: [e.spec.key for e in closed_forms_from_catalog(c)],
              lambda ctx: verify_closed_forms(ctx.catalog, ctx.prec)),
        Suite("intermediates", "products of two parameters used in the evaluations",
              lambda c: [p.name for p in products_from_catalog(c)],
              lambda ctx: verify_intermediates(ctx.catalog, ctx.prec)),
        Suite("relations", "product, symmetry and modular relations between parameters",
              lambda c: list(RELATIONS), lambda ctx: check_cross_relations(ctx.prec)),
        Suite("cfrac", "H(q) by theta quotient, product and displayed prefix",
              lambda c: list(ROUTES), lambda ctx: verify_routes(ctx.prec, ctx.samples)),
        Suite("table", "tabulated values of H and the parameter bridge", _table_names,
              lambda ctx: verify_table(ctx.catalog, ctx.prec)),
        Suite("elliptic", "K(k) against (pi/2) phi(q)^2", lambda c: ["ee11"], run_elliptic),
    )
}


def parse_filter(text: str | None) -> list[str]:
    """Comma-separated globs; an empty filter selects everything"""
    if not text:
        return []
    return [p.strip() for p in text.split(",") if p.strip()]


def make_samples(config: RunConfig) -> list[ThetaPoint]:
    if config.sampler == "harmonic":
        return harmonic_points(config.samples)
    if config.sampler != "even":
        raise ValueError(f"unknown sampler '{config.sampler}', expected one of {', '.join(SAMPLERS)}")
    return sample_points(config.samples, config.q_min, config.q_max)


def selected_suites(catalog: Catalog, patterns: list[str]) -> list[Suite]:
    """Suites with at least one check whose name matches the filter"""
    ctx = SuiteContext(catalog, Precision(50), [], patterns)
    return [s for s in SUITES.values() if any(ctx.wanted(n) for n in s.names(catalog))]


def run_suites(
    config: RunConfig,
    catalog: Catalog,
    progress: Callable[[str], None] | None = None,
) -> VerificationReport:
    """Run every suite the filter selects, in registry order; checks outside the filter are dropped"""
    prec = Precision(config.digits, config.guard)
    ctx = SuiteContext(catalog, prec, make_samples(config), parse_filter(config.filter))
    report = VerificationReport(digits=prec.digits)
    for suite in selected_suites(catalog, ctx.patterns):
        if progress:
            progress(f"suite {suite.name}: {suite.description}")
        part = suite.run(ctx)
        report.results.extend(r for r in part.results if ctx.wanted(r.name))
    return report
