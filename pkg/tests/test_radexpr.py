"""Tests for theta_attest radical expressions"""

from fractions import Fraction

import pytest

from theta_attest.mparith import DenominatorFloorError, DomainError, Precision
from theta_attest.radexpr import (
    Add,
    Call,
    EvaluationError,
    Integer,
    Mul,
    Neg,
    ParseError,
    Pow,
    Rational,
    Symbol,
    SymbolPolicy,
    evaluate,
    expand,
    parse,
    symbols,
    to_text,
    tokenize,
)

PREC = Precision(50)
TOL = PREC.tolerance()

ROUND_TRIP = [
    "sqrt(760 - 240*sqrt(10))",
    "(9 + 4*sqrt(5))^(1/4)*(sqrt(21) - 2*sqrt(5))^(1/2)",
    "-2*x + y",
    "x - (y - 3)",
    "x*(-y)",
    "-(x*y)^(-1/3)",
    "2.5*x/7",
    "(x^2)^(1/2) - -x",
]


def test_parse_precedence():
    e = parse("1 + 2*3^2", SymbolPolicy.CONSTANTS_ONLY)
    assert e == Add((Integer(1), Mul((Integer(2), Pow(Integer(3), Fraction(2))))))


def test_integer_division_folds_to_rational():
    assert parse("3/6") == Rational(1, 2)
    assert parse("x/2", names=["x"]) == Mul((Symbol("x"), Pow(Integer(2), Fraction(-1))))


def test_decimal_literal_is_exact():
    assert parse("0.25") == Rational(1, 4)


def test_unary_minus_binds_looser_than_power():
    assert parse("-2^2") == Neg(Pow(Integer(2), Fraction(2)))


@pytest.mark.parametrize("text", ROUND_TRIP)
def test_round_trip(text):
    e = parse(text, names=["x", "y"])
    assert parse(to_text(e), names=["x", "y"]) == e


def test_call_parsing_under_theta_policy():
    e = parse("phi(q^3)/psim(q)", SymbolPolicy.THETA_FUNCS)
    assert e == Mul((
        Call("phi", (Pow(Symbol("q"), Fraction(3)),)),
        Pow(Call("psim", (Symbol("q"),)), Fraction(-1)),
    ))


def test_error_at_end_of_input():
    with pytest.raises(ParseError) as exc:
        parse("2 + ")
    assert exc.value.position == 4
    assert exc.value.found == "end of input"
    assert str(exc.value) == "offset 4: expected a number, name or '(', found 'end of input'"


def test_error_on_bad_character():
    with pytest.raises(ParseError) as exc:
        parse("2 $ 3")
    assert exc.value.position == 2
    assert exc.value.found == "$"


def test_error_on_unclosed_paren():
    with pytest.raises(ParseError) as exc:
        parse("(1 + 2")
    assert exc.value.position == 6
    assert exc.value.expected == "')'"


def test_exponent_must_be_rational_literal():
    with pytest.raises(ParseError) as exc:
        parse("2^x", names=["x"])
    assert exc.value.position == 2
    assert exc.value.expected == "an integer"


def test_zero_denominator_in_exponent():
    with pytest.raises(ParseError):
        parse("2^(1/0)")


def test_symbol_policy():
    with pytest.raises(ParseError) as exc:
        parse("P + 1")
    assert "constants-only" in exc.value.expected
    assert parse("P + 1", SymbolPolicy.IDENTITY_VARS) == Add((Symbol("P"), Integer(1)))
    with pytest.raises(ParseError):
        parse("phi(q)", SymbolPolicy.IDENTITY_VARS)
    with pytest.raises(ParseError):
        parse("q", SymbolPolicy.IDENTITY_VARS)


def test_call_arity():
    with pytest.raises(ParseError) as exc:
        parse("sqrt(2, 3)")
    assert exc.value.position == 9


def test_evaluate_denesting():
    """sqrt(3 + 2 sqrt 2) = 1 + sqrt 2"""
    value = evaluate(parse("sqrt(3 + 2*sqrt(2)) - 1 - sqrt(2)"), {}, PREC)
    assert abs(value) < TOL


def test_evaluate_nested_radical():
    """sqrt(760 - 240 sqrt 10) = 2 sqrt(190 - 60 sqrt 10)"""
    value = evaluate(parse("sqrt(760 - 240*sqrt(10)) - 2*sqrt(190 - 60*sqrt(10))"), {}, PREC)
    assert abs(value) < TOL


def test_evaluate_rational_powers():
    assert abs(evaluate(parse("8^(2/3) + 16^(-1/4)"), {}, PREC) - Fraction(9, 2)) < TOL


def test_evaluate_with_bindings():
    e = parse("P^2 - Q/P", SymbolPolicy.IDENTITY_VARS)
    assert abs(evaluate(e, {"P": 2, "Q": Fraction(1, 2)}, PREC) - Fraction(15, 4)) < TOL


def test_unbound_symbol():
    with pytest.raises(EvaluationError):
        evaluate(parse("a + 1", names=["a"]), {}, PREC)


def test_unknown_call():
    e = parse("phi(q)", SymbolPolicy.THETA_FUNCS)
    with pytest.raises(EvaluationError) as exc:
        evaluate(e, {"q": Fraction(1, 10)}, PREC)
    assert "phi" in str(exc.value)


def test_negative_base_fractional_power():
    with pytest.raises(DomainError):
        evaluate(parse("(1 - sqrt(5))^(1/2)"), {}, PREC)


def test_denominator_floor():
    e = parse("1/(q - 1/10)", SymbolPolicy.THETA_FUNCS)
    with pytest.raises(DenominatorFloorError):
        evaluate(e, {"q": Fraction(1, 10)}, PREC, floor=Fraction(1, 1000))
    with pytest.raises(DomainError):
        evaluate(e, {"q": Fraction(1, 10)}, PREC)


def test_calls_are_memoized():
    seen = []

    def phi(x):
        seen.append(x)
        return x + 1

    e = parse("phi(q)*phi(q) + phi(q^2)", SymbolPolicy.THETA_FUNCS)
    memo = {}
    value = evaluate(e, {"q": Fraction(1, 2)}, PREC, {"phi": phi}, memo)
    assert abs(value - Fraction(7, 2)) < TOL
    assert len(seen) == 2


def test_expand_polynomial():
    e = parse("(P + Q)^2 - 2*P*Q", SymbolPolicy.IDENTITY_VARS)
    assert expand(e) == {(Fraction(2), Fraction(0)): 1, (Fraction(0), Fraction(2)): 1}


def test_expand_laurent_monomials():
    e = parse("sqrt(P*Q)*P^(1/2) + 1/Q", SymbolPolicy.IDENTITY_VARS)
    assert expand(e) == {
        (Fraction(1), Fraction(1, 2)): 1,
        (Fraction(0), Fraction(-1)): 1,
    }


def test_expand_rejects_root_of_sum():
    with pytest.raises(EvaluationError):
        expand(parse("(P + Q)^(1/2)", SymbolPolicy.IDENTITY_VARS))


def test_symbols():
    assert symbols(parse("P*Q + sqrt(P) - 3", SymbolPolicy.IDENTITY_VARS)) == {"P", "Q"}
    assert symbols(parse("sqrt(5)")) == set()


def test_integer_exponent_followed_by_division():
    e = parse("phi(q)^4/phi(q^3)^4", SymbolPolicy.THETA_FUNCS)
    assert e == Mul((
        Pow(Call("phi", (Symbol("q"),)), Fraction(4)),
        Pow(Pow(Call("phi", (Pow(Symbol("q"), Fraction(3)),)), Fraction(4)), Fraction(-1)),
    ))
    assert parse("2^3/4") == Pow(Integer(2), Fraction(3, 4))


def test_negation_keeps_working_precision():
    assert abs(evaluate(parse("1 + sqrt(2) - sqrt(2) - 1"), {}, PREC)) < TOL
    assert abs(evaluate(parse("-sqrt(3)*(-sqrt(3)) - 3"), {}, PREC)) < TOL


def test_floor_only_applies_to_listed_calls():
    """A tiny quotient may divide; a tiny theta value may not"""
    calls = {"B": lambda r: r / 10 ** 6, "phi": lambda x: x}
    e = parse("B(1)/B(7)", SymbolPolicy.THETA_FUNCS)
    value = evaluate(e, {"q": Fraction(1, 2)}, PREC, calls, floor=Fraction(1, 1000), floored={"phi"})
    assert abs(value - Fraction(1, 7)) < TOL

    e = parse("1/(q*phi(q)^2)", SymbolPolicy.THETA_FUNCS)
    with pytest.raises(DenominatorFloorError) as exc:
        evaluate(e, {"q": Fraction(1, 10000)}, PREC, calls, floor=Fraction(1, 1000), floored={"phi"})
    assert "phi(q)" in str(exc.value)
    with pytest.raises(DenominatorFloorError):
        evaluate(e, {"q": Fraction(1, 10000)}, PREC, calls, floor=Fraction(1, 1000))


MUTATION_INPUTS = [
    "(9 + 4*sqrt(5))^(1/4)*(sqrt(21) - 2*sqrt(5))^(1/2)",
    "sqrt(3 + 2*sqrt(2)) - 1 - 2^(-3/2)",
]


@pytest.mark.parametrize("text", MUTATION_INPUTS)
def test_token_deletion_errors_are_positioned(text):
    """Dropping any one token either still parses or fails at the offending lexeme"""
    tokens = [t for t in tokenize(text) if t.kind != "end"]
    for t in tokens:
        mutated = text[:t.pos] + text[t.pos + len(t.text):]
        try:
            parse(mutated)
        except ParseError as e:
            assert 0 <= e.position <= len(mutated)
            if e.found == "end of input":
                assert mutated[e.position:].strip() == ""
            else:
                assert mutated.startswith(e.found, e.position), (mutated, e.position, e.found)
