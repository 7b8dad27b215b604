"""Line-oriented catalog reader for identities, closed forms and table rows"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .mparith import BigReal, Precision
from .radexpr import Expr, ParseError, SymbolPolicy, evaluate, parse

CATALOG_FILES = ("identities.cat", "closed_forms.cat", "table.cat")
FAMILIES = ("h", "hp", "l", "lp")

RAT = r"\d+(?:/\d+)?"
FAM = r"h|hp|l|lp"

LET_RE = re.compile(r"^let\s+(?P<name>[A-Za-z_]\w*)\s*=\s*(?P<expr>.+)$")
RECORD_RE = re.compile(r"^(?P<kind>identity|factored)\s+(?P<name>[\w.-]+)\s*:\s*(?P<body>.+)$")
PARAM_RE = re.compile(rf"^(?P<family>{FAM})\s+(?P<k>{RAT})\s+(?P<n>{RAT})\s*=\s*(?P<expr>.+)$")
PRODUCT_RE = re.compile(
    rf"^product\s+(?P<name>[\w.-]+)\s*:\s*(?P<f1>{FAM})\s+(?P<k1>{RAT})\s+(?P<n1>{RAT})"
    rf"\s*\*\s*(?P<f2>{FAM})\s+(?P<k2>{RAT})\s+(?P<n2>{RAT})\s*=\s*(?P<expr>.+)$"
)
TABLE_RE = re.compile(rf"^H\s+(?P<n>{RAT})\s*=\s*(?P<expr>.+)$")
FIX_IDENTITY_RE = re.compile(
    r"^fix\s+identity\s+(?P<name>[\w.-]+)\s*:\s*(?P<field>P|Q|relation)\s*=\s*(?P<expr>.+)$"
)
FIX_PARAM_RE = re.compile(rf"^fix\s+(?P<family>{FAM})\s+(?P<k>{RAT})\s+(?P<n>{RAT})\s*=\s*(?P<expr>.+)$")
FIX_PRODUCT_RE = re.compile(r"^fix\s+product\s+(?P<name>[\w.-]+)\s*=\s*(?P<expr>.+)$")
FIX_TABLE_RE = re.compile(rf"^fix\s+H\s+(?P<n>{RAT})\s*=\s*(?P<expr>.+)$")
FIELD_RE = re.compile(r"\s*(?P<key>\w+)\s*=\s*(?P<value>[^;]+)")

IDENTITY_FIELDS = ("P", "Q", "relation")
FACTORED_FIELDS = ("P", "Q", "factors", "vanishing", "expanded")


class CatalogError(ValueError):
    """Malformed catalog line, reported as file:line:column"""

    def __init__(self, source: str, line: int, message: str, column: int | None = None):
        self.source = source
        self.line = line
        self.column = column
        where = f"{source}:{line}" + (f":{column}" if column is not None else "")
        super().__init__(f"{where}: {message}")


def param_key(family: str, k: Fraction, n: Fraction) -> str:
    return f"{family} {k} {n}"


@dataclass
class Record:
    """One catalog entry; `fields` holds parsed expressions by name"""
    kind: str  # identity, factored, param, product, table
    key: str
    fields: dict[str, Expr | list[Expr]]
    meta: dict = field(default_factory=dict)
    source: str = ""
    note: str = ""


@dataclass
class Fix:
    """Replacement for one field of an earlier record"""
    kind: str
    key: str
    field: str
    expr: Expr
    source: str = ""
    note: str = ""


@dataclass
class Catalog:
    records: list[Record] = field(default_factory=list)
    lets: dict[str, Expr] = field(default_factory=dict)
    fixes: list[Fix] = field(default_factory=list)

    def of_kind(self, kind: str) -> list[Record]:
        return [r for r in self.records if r.kind == kind]

    def get(self, kind: str, key: str) -> Record | None:
        for r in self.records:
            if r.kind == kind and r.key == key:
                return r
        return None

    def fixes_for(self, kind: str, key: str) -> dict[str, Fix]:
        return {f.field: f for f in self.fixes if f.kind == kind and f.key == key}

    def let_values(self, prec: Precision) -> dict[str, BigReal]:
        """Evaluate let-bindings in order; later ones may use earlier ones"""
        values: dict[str, BigReal] = {}
        for name, expr in self.lets.items():
            values[name] = evaluate(expr, values, prec)
        return values

    def names(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for r in self.records:
            out.setdefault(r.kind, []).append(r.key)
        return out


def _logical_lines(text: str) -> list[tuple[int, str, str]]:
    """Join backslash continuations; returns (first line number, text, comment block above).

    A comment block applies to every record up to the next blank line.
    """
    out = []
    buf, start, comments, after_code = "", 0, [], False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip()
        stripped = line.strip()
        if not buf:
            if not stripped:
                comments, after_code = [], False
                continue
            if stripped.startswith("#"):
                if after_code:
                    comments, after_code = [], False
                comments.append(stripped.lstrip("#").strip())
                continue
            start = lineno
        if line.endswith("\\"):
            buf += line[:-1] + " "
            continue
        out.append((start, buf + line, " ".join(c for c in comments if c)))
        buf, after_code = "", True
    if buf:
        out.append((start, buf.rstrip(), " ".join(comments)))
    return out


class _Reader:
    def __init__(self, catalog: Catalog, source: str):
        self.catalog = catalog
        self.source = source

    def expr(self, text: str, offset: int, lineno: int, policy: SymbolPolicy) -> Expr:
        try:
            names = self.catalog.lets if policy is SymbolPolicy.CONSTANTS_ONLY else ()
            return parse(text, policy, names=names)
        except ParseError as e:
            raise CatalogError(self.source, lineno, str(e), column=offset + e.position + 1) from e

    def add(self, record: Record, lineno: int):
        if self.catalog.get(record.kind, record.key) is not None:
            raise CatalogError(self.source, lineno, f"duplicate {record.kind} '{record.key}'")
        self.catalog.records.append(record)

    def fields(self, body: str, offset: int, lineno: int, allowed: tuple[str, ...]) -> dict[str, tuple[str, int]]:
        out = {}
        for m in FIELD_RE.finditer(body):
            key = m.group("key")
            if key not in allowed:
                raise CatalogError(self.source, lineno, f"unknown field '{key}'", column=offset + m.start("key") + 1)
            if key in out:
                raise CatalogError(self.source, lineno, f"field '{key}' given twice")
            value = m.group("value").rstrip()
            out[key] = (value, offset + m.start("value"))
        missing = [k for k in allowed if k not in out]
        if missing:
            raise CatalogError(self.source, lineno, f"missing field(s): {', '.join(missing)}")
        return out

    def read_line(self, lineno: int, line: str, note: str):
        where = f"{self.source}:{lineno}"
        m = LET_RE.match(line)
        if m:
            name = m.group("name")
            if name in self.catalog.lets:
                raise CatalogError(self.source, lineno, f"let '{name}' already bound")
            self.catalog.lets[name] = self.expr(m.group("expr"), m.start("expr"), lineno, SymbolPolicy.CONSTANTS_ONLY)
            return

        m = RECORD_RE.match(line)
        if m:
            kind, name, body, off = m.group("kind"), m.group("name"), m.group("body"), m.start("body")
            allowed = IDENTITY_FIELDS if kind == "identity" else FACTORED_FIELDS
            raw = self.fields(body, off, lineno, allowed)
            fields: dict = {}
            for key in ("P", "Q"):
                fields[key] = self.expr(*raw[key], lineno, SymbolPolicy.THETA_FUNCS)
            meta = {}
            if kind == "identity":
                fields["relation"] = self.expr(*raw["relation"], lineno, SymbolPolicy.IDENTITY_VARS)
            else:
                text, pos = raw["factors"]
                factors, cursor = [], 0
                for part in text.split("|"):
                    factors.append(self.expr(part, pos + cursor, lineno, SymbolPolicy.IDENTITY_VARS))
                    cursor += len(part) + 1
                fields["factors"] = factors
                fields["expanded"] = self.expr(*raw["expanded"], lineno, SymbolPolicy.IDENTITY_VARS)
                index = raw["vanishing"][0].strip()
                if not index.isdigit() or not 1 <= int(index) <= len(factors):
                    raise CatalogError(self.source, lineno, f"vanishing must be a factor index in 1..{len(factors)}")
                meta["vanishing"] = int(index)
            self.add(Record(kind, name, fields, meta, where, note), lineno)
            return

        m = PARAM_RE.match(line)
        if m:
            k, n = Fraction(m.group("k")), Fraction(m.group("n"))
            expr = self.expr(m.group("expr"), m.start("expr"), lineno, SymbolPolicy.CONSTANTS_ONLY)
            meta = {"family": m.group("family"), "k": k, "n": n}
            self.add(Record("param", param_key(m.group("family"), k, n), {"value": expr}, meta, where, note), lineno)
            return

        m = PRODUCT_RE.match(line)
        if m:
            factors = [
                (m.group("f1"), Fraction(m.group("k1")), Fraction(m.group("n1"))),
                (m.group("f2"), Fraction(m.group("k2")), Fraction(m.group("n2"))),
            ]
            expr = self.expr(m.group("expr"), m.start("expr"), lineno, SymbolPolicy.CONSTANTS_ONLY)
            self.add(Record("product", m.group("name"), {"value": expr}, {"factors": factors}, where, note), lineno)
            return

        m = TABLE_RE.match(line)
        if m:
            n = Fraction(m.group("n"))
            expr = self.expr(m.group("expr"), m.start("expr"), lineno, SymbolPolicy.CONSTANTS_ONLY)
            self.add(Record("table", str(n), {"value": expr}, {"n": n}, where, note), lineno)
            return

        if line.startswith("fix"):
            self.read_fix(lineno, line, note)
            return

        raise CatalogError(self.source, lineno, f"unrecognized line: {line[:40]}", column=1)

    def read_fix(self, lineno: int, line: str, note: str):
        m = FIX_IDENTITY_RE.match(line)
        if m:
            field_name = m.group("field")
            policy = SymbolPolicy.IDENTITY_VARS if field_name == "relation" else SymbolPolicy.THETA_FUNCS
            kind, key = "identity", m.group("name")
        elif m := FIX_PARAM_RE.match(line):
            kind, field_name, policy = "param", "value", SymbolPolicy.CONSTANTS_ONLY
            key = param_key(m.group("family"), Fraction(m.group("k")), Fraction(m.group("n")))
        elif m := FIX_PRODUCT_RE.match(line):
            kind, key, field_name, policy = "product", m.group("name"), "value", SymbolPolicy.CONSTANTS_ONLY
        elif m := FIX_TABLE_RE.match(line):
            kind, key, field_name, policy = "table", str(Fraction(m.group("n"))), "value", SymbolPolicy.CONSTANTS_ONLY
        else:
            raise CatalogError(self.source, lineno, f"malformed fix line: {line[:40]}", column=1)

        if self.catalog.get(kind, key) is None:
            raise CatalogError(self.source, lineno, f"fix refers to unknown {kind} '{key}'")
        if field_name in self.catalog.fixes_for(kind, key):
            raise CatalogError(self.source, lineno, f"second fix for {kind} '{key}' field {field_name}")
        if not note:
            raise CatalogError(self.source, lineno, "a fix must be preceded by a comment naming the slip")
        expr = self.expr(m.group("expr"), m.start("expr"), lineno, policy)
        self.catalog.fixes.append(Fix(kind, key, field_name, expr, f"{self.source}:{lineno}", note))


def parse_catalog(text: str, source: str = "<string>", catalog: Catalog | None = None) -> Catalog:
    """Parse catalog text, appending to `catalog` when given"""
    catalog = catalog if catalog is not None else Catalog()
    reader = _Reader(catalog, source)
    for lineno, line, note in _logical_lines(text):
        reader.read_line(lineno, line.strip(), note)
    return catalog


def load_catalog(directory: str | Path | None = None) -> Catalog:
    """Load the three catalog files from `directory`, or the embedded data"""
    catalog = Catalog()
    for name in CATALOG_FILES:
        if directory is not None:
            path = Path(directory) / name
            if not path.exists():
                raise CatalogError(str(path), 0, "catalog file not found")
            text = path.read_text(encoding="utf-8")
        else:
            text = resources.files("theta_attest").joinpath("data", name).read_text(encoding="utf-8")
        parse_catalog(text, name, catalog)
    return catalog
