"""Tests for theta_attest catalog reader"""

from fractions import Fraction
from importlib import resources

import pytest

from theta_attest.catalog import CATALOG_FILES, CatalogError, load_catalog, param_key, parse_catalog
from theta_attest.mparith import Precision
from theta_attest.radexpr import SymbolPolicy, evaluate, parse, to_text

PREC = Precision(30)


@pytest.fixture(scope="module")
def catalog():
    return load_catalog()


def test_embedded_catalog_counts(catalog):
    names = catalog.names()
    assert len(names["identity"]) == 17
    assert len(names["factored"]) == 3
    assert len(names["param"]) == 30
    assert len(names["product"]) == 12
    assert len(names["table"]) == 5
    families = [r.meta["family"] for r in catalog.of_kind("param")]
    assert families.count("h") == 16
    assert families.count("l") == 14


def test_embedded_fixes(catalog):
    kinds = [f.kind for f in catalog.fixes]
    assert kinds.count("identity") == 1
    assert kinds.count("param") == 7
    assert kinds.count("product") == 2
    assert kinds.count("table") == 3
    for fix in catalog.fixes:
        assert fix.note, f"fix of {fix.kind} {fix.key} has no note"
        assert catalog.get(fix.kind, fix.key) is not None
    assert set(catalog.fixes_for("identity", "SR3")) == {"Q"}
    assert set(catalog.fixes_for("table", "1/45")) == {"value"}


def test_embedded_lets_are_positive(catalog):
    values = catalog.let_values(PREC)
    assert set(values) == {"a", "b", "c3"}
    assert all(v > 0 for v in values.values())


def _policy(kind: str, field: str) -> SymbolPolicy:
    if kind in ("identity", "factored"):
        return SymbolPolicy.THETA_FUNCS if field in ("P", "Q") else SymbolPolicy.IDENTITY_VARS
    return SymbolPolicy.CONSTANTS_ONLY


def test_every_catalog_expression_round_trips(catalog):
    """parse(to_text(e)) == e for every expression in the embedded catalog"""
    lets = list(catalog.lets)
    checked = 0
    exprs = [(SymbolPolicy.CONSTANTS_ONLY, e) for e in catalog.lets.values()]
    for record in catalog.records:
        for field, value in record.fields.items():
            for e in value if isinstance(value, list) else [value]:
                exprs.append((_policy(record.kind, field), e))
    exprs.extend((_policy(f.kind, f.field), f.expr) for f in catalog.fixes)
    for policy, e in exprs:
        assert parse(to_text(e), policy, lets) == e
        checked += 1
    assert checked > 100


def test_param_key():
    assert param_key("h", Fraction(3), Fraction(5, 3)) == "h 3 5/3"


def test_parse_identity_with_continuation_and_note():
    text = (
        "# first record\n"
        "identity T1 : P = phi(q) ; Q = phi(q^3) ; \\\n"
        "  relation = P - Q\n"
    )
    cat = parse_catalog(text, "t.cat")
    record = cat.get("identity", "T1")
    assert record.note == "first record"
    assert record.source == "t.cat:2"
    assert to_text(record.fields["relation"]) == "P - Q"


def test_comment_block_applies_until_blank_line():
    cat = parse_catalog("# shared\nh 3 15 = 1\nh 3 5/3 = 2\n\nh 5 12 = 3\n")
    notes = [r.note for r in cat.of_kind("param")]
    assert notes == ["shared", "shared", ""]


def test_comment_after_code_starts_new_block():
    cat = parse_catalog("h 3 15 = 1\n# printed exponent slip\nfix h 3 15 = 2\n")
    assert cat.get("param", "h 3 15").note == ""
    fix = cat.fixes_for("param", "h 3 15")["value"]
    assert fix.note == "printed exponent slip"
    assert to_text(fix.expr) == "2"


def test_let_bindings():
    cat = parse_catalog("let a = 2\nh 3 15 = a^2\n")
    record = cat.get("param", "h 3 15")
    assert evaluate(record.fields["value"], cat.let_values(PREC), PREC) == 4


def test_let_must_precede_use():
    with pytest.raises(CatalogError) as exc:
        parse_catalog("h 3 15 = a\nlet a = 2\n", "t.cat")
    assert exc.value.line == 1


def test_factored_record():
    text = "factored F : P = phi(q) ; Q = phi(q^3) ; factors = P - Q | P + Q ; vanishing = 1 ; expanded = P^2 - Q^2"
    record = parse_catalog(text).get("factored", "F")
    assert len(record.fields["factors"]) == 2
    assert record.meta["vanishing"] == 1


def test_vanishing_index_range():
    text = "factored F : P = phi(q) ; Q = phi(q^3) ; factors = P - Q | P + Q ; vanishing = 3 ; expanded = P^2 - Q^2"
    with pytest.raises(CatalogError) as exc:
        parse_catalog(text)
    assert "1..2" in str(exc.value)


def test_identity_fix():
    text = (
        "identity T : P = phi(q) ; Q = phi(q^3) ; relation = P - Q\n"
        "# q^3 misprinted\n"
        "fix identity T : Q = phi(q^5)\n"
    )
    fixes = parse_catalog(text).fixes_for("identity", "T")
    assert set(fixes) == {"Q"}
    assert fixes["Q"].note == "q^3 misprinted"


def test_expression_error_is_positioned():
    with pytest.raises(CatalogError) as exc:
        parse_catalog("let a = 2 + $\n", "t.cat")
    assert exc.value.line == 1
    assert exc.value.column == 13
    assert str(exc.value).startswith("t.cat:1:13: offset 4")


def test_field_error_is_positioned():
    with pytest.raises(CatalogError) as exc:
        parse_catalog("identity T : P = phi(q) ; Q = 1 + ; relation = P\n", "t.cat")
    assert exc.value.column == 34


def test_unknown_field():
    with pytest.raises(CatalogError) as exc:
        parse_catalog("identity T : P = 1 ; Z = 2 ; Q = 1 ; relation = P\n")
    assert exc.value.column == 22
    assert "unknown field 'Z'" in str(exc.value)


def test_missing_field():
    with pytest.raises(CatalogError) as exc:
        parse_catalog("identity T : P = phi(q) ; Q = phi(q^3)\n")
    assert "missing field(s): relation" in str(exc.value)


def test_duplicate_record():
    with pytest.raises(CatalogError) as exc:
        parse_catalog("h 3 15 = 1\nh 3 15 = 2\n")
    assert exc.value.line == 2


def test_unrecognized_line():
    with pytest.raises(CatalogError) as exc:
        parse_catalog("hello world\n", "t.cat")
    assert exc.value.column == 1
    assert "unrecognized line" in str(exc.value)


def test_fix_needs_a_note():
    with pytest.raises(CatalogError) as exc:
        parse_catalog("h 3 15 = 1\nfix h 3 15 = 2\n")
    assert "comment" in str(exc.value)


def test_fix_of_unknown_record():
    with pytest.raises(CatalogError) as exc:
        parse_catalog("# why\nfix h 3 20 = 1\n")
    assert "unknown param 'h 3 20'" in str(exc.value)


def test_second_fix_of_same_field():
    with pytest.raises(CatalogError) as exc:
        parse_catalog("h 3 15 = 1\n# a\nfix h 3 15 = 2\n# b\nfix h 3 15 = 3\n")
    assert exc.value.line == 5


def test_load_catalog_from_directory(tmp_path):
    for name in CATALOG_FILES:
        text = resources.files("theta_attest").joinpath("data", name).read_text(encoding="utf-8")
        (tmp_path / name).write_text(text, encoding="utf-8")
    assert load_catalog(tmp_path).names() == load_catalog().names()


def test_load_catalog_missing_file(tmp_path):
    with pytest.raises(CatalogError) as exc:
        load_catalog(tmp_path)
    assert "not found" in str(exc.value)
