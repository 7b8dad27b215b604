"""Verification results and their text and JSON renderings"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import mpmath

from .mparith import BigReal, DomainError, magnitude
from .radexpr import to_text

SCHEMA_VERSION = 1

PASSING = ("verified", "corrected")


def _mpf(x) -> mpmath.mpf | None:
    if x is None:
        return None
    return x.value if isinstance(x, BigReal) else mpmath.mpf(x)


@dataclass
class SampleResult:
    """Residual of one check at one sample, or the error that replaced it"""
    label: str
    residual: mpmath.mpf | None = None
    error: str = ""

    def __post_init__(self):
        self.residual = _mpf(self.residual)


def single_sample(label: str, func: Callable[[], object]) -> list[SampleResult]:
    """One sample from func(), or its DomainError recorded against the label"""
    try:
        return [SampleResult(label, func())]
    except DomainError as e:
        return [SampleResult(label, error=str(e))]


@dataclass
class CheckResult:
    """Outcome of a single named check"""
    name: str
    suite: str
    status: str  # verified, corrected, unresolved, ambiguous, failed, error
    tolerance: mpmath.mpf
    samples: list[SampleResult] = field(default_factory=list)
    note: str = ""
    correction: str = ""
    details: dict[str, str] = field(default_factory=dict)
    duration: float = 0.0

    def __post_init__(self):
        self.tolerance = _mpf(self.tolerance)

    @property
    def passed(self) -> bool:
        return self.status in PASSING

    @property
    def errors(self) -> list[SampleResult]:
        return [s for s in self.samples if s.error]

    @property
    def max_residual(self) -> mpmath.mpf | None:
        values = [s.residual for s in self.samples if s.residual is not None]
        return max(values) if values else None

    @property
    def message(self) -> str:
        parts = [self.status]
        if self.max_residual is not None:
            parts.append(f"max residual {magnitude(self.max_residual)}")
        if self.errors:
            parts.append(f"{len(self.errors)} sample error(s): {self.errors[0].error}")
        if self.correction:
            parts.append(f"reading: {self.correction}")
        if self.note:
            parts.append(self.note)
        return "; ".join(parts)


def status_from(samples: list[SampleResult], tolerance) -> str:
    """'verified' when every sample is below tolerance, 'error' on any sample error, else 'failed'"""
    tol = _mpf(tolerance)
    if any(s.error for s in samples):
        return "error"
    if samples and all(s.residual < tol for s in samples):
        return "verified"
    return "failed"


@dataclass
class VerificationReport:
    """Ordered collection of check results"""
    results: list[CheckResult] = field(default_factory=list)
    digits: int = 50

    @property
    def passed(self) -> int:
        return sum(1 for r in self.results if r.passed)

    @property
    def failed(self) -> int:
        return sum(1 for r in self.results if not r.passed)

    @property
    def total(self) -> int:
        return len(self.results)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def add(self, result: CheckResult) -> CheckResult:
        self.results.append(result)
        return result

    def extend(self, other: VerificationReport):
        self.results.extend(other.results)

    def print_summary(self, timings: bool = False):
        print(f"\n{'='*60}")
        print(f"VERIFICATION RESULTS: {self.passed}/{self.total} passed ({self.digits} digits)")
        print(f"{'='*60}")
        for r in self.results:
            status = "✓" if r.passed else "✗"
            elapsed = f" [{r.duration:.2f}s]" if timings else ""
            print(f"  {status} {r.suite}/{r.name}: {r.message}{elapsed}")
        print()

    def to_dict(self, timings: bool = False) -> dict:
        checks = []
        for r in self.results:
            entry = {
                "name": r.name,
                "suite": r.suite,
                "status": r.status,
                "passed": r.passed,
                "tolerance": magnitude(r.tolerance),
                "max_residual": None if r.max_residual is None else magnitude(r.max_residual, 6),
                "note": r.note,
                "correction": r.correction,
                "details": dict(r.details),
                "samples": [
                    {
                        "label": s.label,
                        "residual": None if s.residual is None else magnitude(s.residual, 6),
                        "error": s.error,
                    }
                    for s in r.samples
                ],
            }
            if timings:
                entry["duration_s"] = f"{r.duration:.3f}"
            checks.append(entry)
        return {
            "schema": SCHEMA_VERSION,
            "digits": str(self.digits),
            "passed": str(self.passed),
            "total": str(self.total),
            "checks": checks,
        }

    def to_json(self, timings: bool = False) -> str:
        return json.dumps(self.to_dict(timings), indent=2, ensure_ascii=False)


def settle_fix(result: CheckResult, fix, recompute: Callable[[], list[SampleResult]]) -> CheckResult:
    """Apply a catalog fix to a check whose printed samples are already recorded.

    The fix only counts when the printed form fails and the fixed form verifies.
    """
    if fix is None or result.status == "error":
        return result
    if result.status == "verified":
        result.status = "failed"
        result.note = "catalog fix is unnecessary: the printed form verifies"
        return result
    result.details["printed_max"] = magnitude(result.max_residual)
    result.samples = recompute()
    if status_from(result.samples, result.tolerance) == "verified":
        result.status = "corrected"
        result.correction = to_text(fix.expr)
        result.note = f"catalog fix ({fix.source}): {fix.note}"
    else:
        result.status = "failed"
        result.note = "catalog fix does not verify"
    return result
