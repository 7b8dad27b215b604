"""Expression DSL for radical closed forms, identity relations and quotient definitions.

Grammar::

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := '-'? power
    power    := atom ('^' exponent)?
    exponent := INT ('/' INT)? | '(' '-'? INT ('/' INT)? ')'
    atom     := NUMBER | NAME | NAME '(' expr (',' expr)* ')' | '(' expr ')'

``^`` is non-associative and exponents are always explicit rationals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Collection, Iterable, Iterator, Mapping, Union

from .mparith import BigReal, DenominatorFloorError, DomainError, Precision, make, pow_rational, sqrt


class ParseError(ValueError):
    """Raised with the byte offset of the first offending token"""

    def __init__(self, position: int, expected: str, found: str):
        self.position = position
        self.expected = expected
        self.found = found
        super().__init__(f"offset {position}: expected {expected}, found '{found}'")


class EvaluationError(DomainError):
    """Unbound symbol, unknown call or an expression outside the evaluator's reach"""


# ---------------------------------------------------------------------------
# Tree


@dataclass(frozen=True)
class Integer:
    value: int


@dataclass(frozen=True)
class Rational:
    num: int
    den: int


@dataclass(frozen=True)
class Symbol:
    name: str


@dataclass(frozen=True)
class Add:
    items: tuple


@dataclass(frozen=True)
class Mul:
    items: tuple


@dataclass(frozen=True)
class Neg:
    expr: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: Fraction


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


Expr = Union[Integer, Rational, Symbol, Add, Mul, Neg, Pow, Call]


def number(value: Fraction | int) -> Expr:
    """Integer or Rational node for a non-negative rational"""
    value = Fraction(value)
    if value < 0:
        return Neg(number(-value))
    if value.denominator == 1:
        return Integer(value.numerator)
    return Rational(value.numerator, value.denominator)


# ---------------------------------------------------------------------------
# Symbol policies


class SymbolPolicy(Enum):
    CONSTANTS_ONLY = "constants-only"
    IDENTITY_VARS = "identity-vars"
    THETA_FUNCS = "theta-funcs"


ARITY = {
    "sqrt": 1,
    "phi": 1,
    "psi": 1,
    "psim": 1,
    "fneg": 1,
    "qpow": 1,
    "A": 1,
    "B": 1,
    "C": 1,
}

POLICY_SYMBOLS = {
    SymbolPolicy.CONSTANTS_ONLY: frozenset(),
    SymbolPolicy.IDENTITY_VARS: frozenset({"P", "Q"}),
    SymbolPolicy.THETA_FUNCS: frozenset({"q"}),
}

POLICY_CALLS = {
    SymbolPolicy.CONSTANTS_ONLY: frozenset({"sqrt"}),
    SymbolPolicy.IDENTITY_VARS: frozenset({"sqrt"}),
    SymbolPolicy.THETA_FUNCS: frozenset(ARITY),
}


# ---------------------------------------------------------------------------
# Tokenizer

TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),])|(?P<bad>\S))"
)


@dataclass(frozen=True)
class Token:
    kind: str  # num, name, op, end
    text: str
    pos: int


def tokenize(text: str) -> Iterator[Token]:
    pos = 0
    while True:
        m = TOKEN_RE.match(text, pos)
        if not m:
            yield Token("end", "end of input", len(text))
            return
        kind = m.lastgroup
        start = m.start(kind)
        if kind == "bad":
            raise ParseError(start, "a number, name or operator", m.group(kind))
        yield Token(kind, m.group(kind), start)
        pos = m.end()


class _Parser:
    def __init__(self, text: str, policy: SymbolPolicy, names: Iterable[str]):
        self.tokens = list(tokenize(text))
        self.i = 0
        self.symbols = POLICY_SYMBOLS[policy] | frozenset(names)
        self.calls = POLICY_CALLS[policy]
        self.policy = policy

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        if t.kind != "end":
            self.i += 1
        return t

    def at(self, op: str) -> bool:
        return self.tok.kind == "op" and self.tok.text == op

    def expect(self, op: str) -> Token:
        if not self.at(op):
            raise ParseError(self.tok.pos, f"'{op}'", self.tok.text)
        return self.advance()

    def integer(self) -> int:
        t = self.tok
        if t.kind != "num" or "." in t.text:
            raise ParseError(t.pos, "an integer", t.text)
        self.advance()
        return int(t.text)

    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "end":
            raise ParseError(self.tok.pos, "an operator or end of input", self.tok.text)
        return e

    def expr(self) -> Expr:
        items = [self.term()]
        while self.at("+") or self.at("-"):
            op = self.advance().text
            t = self.term()
            items.append(t if op == "+" else Neg(t))
        return items[0] if len(items) == 1 else Add(tuple(items))

    def term(self) -> Expr:
        items = [self.unary()]
        while self.at("*") or self.at("/"):
            op = self.advance()
            u = self.unary()
            if op.text == "*":
                items.append(u)
                continue
            if len(items) == 1 and isinstance(items[0], Integer) and isinstance(u, Integer):
                if u.value == 0:
                    raise ParseError(op.pos, "a non-zero denominator", "0")
                items[0] = number(Fraction(items[0].value, u.value))
                continue
            items.append(Pow(u, Fraction(-1)))
        return items[0] if len(items) == 1 else Mul(tuple(items))

    def unary(self) -> Expr:
        if self.at("-"):
            self.advance()
            return Neg(self.power())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if not self.at("^"):
            return base
        self.advance()
        return Pow(base, self.exponent())

    def exponent(self) -> Fraction:
        if self.at("("):
            self.advance()
            sign = 1
            if self.at("-"):
                self.advance()
                sign = -1
            value = self.fraction()
            self.expect(")")
            return sign * value
        return self.fraction()

    def fraction(self) -> Fraction:
        num = self.integer()
        if not self.at("/") or self.tokens[self.i + 1].kind != "num":
            return Fraction(num)
        self.advance()
        pos = self.tok.pos
        den = self.integer()
        if den == 0:
            raise ParseError(pos, "a positive integer", "0")
        return Fraction(num, den)

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return number(Fraction(t.text))
        if t.kind == "name":
            self.advance()
            if self.at("("):
                return self.call(t)
            if t.text not in self.symbols:
                raise ParseError(t.pos, f"a symbol allowed under {self.policy.value}", t.text)
            return Symbol(t.text)
        if self.at("("):
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        raise ParseError(t.pos, "a number, name or '('", t.text)

    def call(self, name: Token) -> Expr:
        if name.text not in self.calls:
            raise ParseError(name.pos, f"a function allowed under {self.policy.value}", name.text)
        self.expect("(")
        args = [self.expr()]
        while self.at(","):
            self.advance()
            args.append(self.expr())
        close = self.tok
        self.expect(")")
        if len(args) != ARITY[name.text]:
            raise ParseError(close.pos, f"{ARITY[name.text]} argument(s) to {name.text}", f"{len(args)} arguments")
        return Call(name.text, tuple(args))


def parse(text: str, policy: SymbolPolicy = SymbolPolicy.CONSTANTS_ONLY, names: Iterable[str] = ()) -> Expr:
    """Parse DSL text; `names` admits extra symbols such as catalog let-bindings"""
    return _Parser(text, policy, names).parse()


# ---------------------------------------------------------------------------
# Printer


def _exponent_text(p: Fraction) -> str:
    if p.denominator == 1 and p >= 0:
        return str(p.numerator)
    if p.denominator == 1:
        return f"({p.numerator})"
    return f"({p.numerator}/{p.denominator})"


def to_text(e: Expr) -> str:
    """Canonical text; parse(to_text(e)) == e for every parsed tree"""
    if isinstance(e, Integer):
        return str(e.value) if e.value >= 0 else f"(-{-e.value})"
    if isinstance(e, Rational):
        return f"({e.num}/{e.den})"
    if isinstance(e, Symbol):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({', '.join(to_text(a) for a in e.args)})"
    if isinstance(e, Add):
        parts = []
        for i, item in enumerate(e.items):
            if i and isinstance(item, Neg):
                inner = item.expr
                text = f"({to_text(inner)})" if isinstance(inner, Add) else to_text(inner)
                parts.append(f" - {text}")
                continue
            text = f"({to_text(item)})" if isinstance(item, Add) else to_text(item)
            parts.append(f" + {text}" if i else text)
        return "".join(parts)
    if isinstance(e, Mul):
        parts = []
        for i, item in enumerate(e.items):
            if isinstance(item, (Add, Mul)) or (i and isinstance(item, Neg)):
                parts.append(f"({to_text(item)})")
            else:
                parts.append(to_text(item))
        return "*".join(parts)
    if isinstance(e, Neg):
        inner = e.expr
        if isinstance(inner, (Integer, Rational, Symbol, Call, Pow)):
            return f"-{to_text(inner)}"
        return f"-({to_text(inner)})"
    if isinstance(e, Pow):
        base = e.base
        if isinstance(base, (Integer, Symbol, Call, Rational)) and not (isinstance(base, Integer) and base.value < 0):
            b = to_text(base)
        else:
            b = f"({to_text(base)})"
        return f"{b}^{_exponent_text(e.exponent)}"
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# Evaluation

CallTable = Mapping[str, Callable[..., BigReal]]


def evaluate(
    e: Expr,
    bindings: Mapping[str, object],
    prec: Precision,
    calls: CallTable | None = None,
    memo: dict | None = None,
    floor: Fraction | None = None,
    floored: Collection[str] | None = None,
) -> BigReal:
    """Evaluate bottom-up at prec.

    With `floor`, a base under a negative exponent must exceed it in absolute value.
    With `floored` as well, only the calls to those functions that multiply into
    such a base are held to the floor; the base itself may be arbitrarily small.
    """
    calls = calls or {}

    def check_floor(base: Expr, value: BigReal) -> None:
        if floored is None:
            if abs(value) <= floor:
                raise DenominatorFloorError(f"denominator {to_text(base)} is below {floor}")
            return
        for call in _factor_calls(base):
            if call.func in floored and abs(ev(call)) <= floor:
                raise DenominatorFloorError(f"denominator factor {to_text(call)} is below {floor}")

    def ev(node: Expr) -> BigReal:
        if isinstance(node, Integer):
            return make(node.value, prec)
        if isinstance(node, Rational):
            return make(Fraction(node.num, node.den), prec)
        if isinstance(node, Symbol):
            if node.name not in bindings:
                raise EvaluationError(f"unbound symbol '{node.name}'")
            return make(bindings[node.name], prec)
        if isinstance(node, Add):
            total = ev(node.items[0])
            for item in node.items[1:]:
                total = total + ev(item)
            return total
        if isinstance(node, Mul):
            total = ev(node.items[0])
            for item in node.items[1:]:
                total = total * ev(item)
            return total
        if isinstance(node, Neg):
            return -ev(node.expr)
        if isinstance(node, Pow):
            base = ev(node.base)
            if node.exponent < 0 and floor is not None:
                check_floor(node.base, base)
            return pow_rational(base, node.exponent)
        if isinstance(node, Call):
            key = (node.func, tuple(to_text(a) for a in node.args))
            if memo is not None and key in memo:
                return memo[key]
            args = [ev(a) for a in node.args]
            if node.func == "sqrt":
                value = sqrt(args[0])
            elif node.func in calls:
                value = calls[node.func](*args)
            else:
                raise EvaluationError(f"no evaluator bound for {node.func}()")
            if memo is not None:
                memo[key] = value
            return value
        raise TypeError(f"not an expression node: {node!r}")

    return ev(e)


def _factor_calls(e: Expr) -> Iterator[Call]:
    """Calls that multiply into e through products, signs and positive powers"""
    if isinstance(e, Call):
        yield e
    elif isinstance(e, Mul):
        for item in e.items:
            yield from _factor_calls(item)
    elif isinstance(e, Neg):
        yield from _factor_calls(e.expr)
    elif isinstance(e, Pow) and e.exponent > 0:
        yield from _factor_calls(e.base)


# ---------------------------------------------------------------------------
# Laurent expansion in P and Q

Monomial = tuple[Fraction, Fraction]
Terms = dict[Monomial, Fraction]


def _clean(terms: Terms) -> Terms:
    return {m: c for m, c in terms.items() if c != 0}


def _add(a: Terms, b: Terms, sign: int = 1) -> Terms:
    out = dict(a)
    for m, c in b.items():
        out[m] = out.get(m, Fraction(0)) + sign * c
    return _clean(out)


def _mul(a: Terms, b: Terms) -> Terms:
    out: Terms = {}
    for (p1, q1), c1 in a.items():
        for (p2, q2), c2 in b.items():
            m = (p1 + p2, q1 + q2)
            out[m] = out.get(m, Fraction(0)) + c1 * c2
    return _clean(out)


def _power(t: Terms, p: Fraction, where: str) -> Terms:
    if p.denominator == 1 and p >= 0:
        out: Terms = {(Fraction(0), Fraction(0)): Fraction(1)}
        for _ in range(p.numerator):
            out = _mul(out, t)
        return out
    if len(t) == 1:
        (ep, eq), c = next(iter(t.items()))
        if c == 1:
            return {(ep * p, eq * p): Fraction(1)}
        if p.denominator == 1:
            return {(ep * p, eq * p): c ** p.numerator}
    raise EvaluationError(f"{where} is not a Laurent monomial, cannot raise it to {p}")


def expand(e: Expr, env: Mapping[str, Terms] | None = None) -> Terms:
    """Expand into {(exponent of P, exponent of Q): coefficient}"""
    env = env or {}
    zero = (Fraction(0), Fraction(0))

    def ex(node: Expr) -> Terms:
        if isinstance(node, Integer):
            return _clean({zero: Fraction(node.value)})
        if isinstance(node, Rational):
            return {zero: Fraction(node.num, node.den)}
        if isinstance(node, Symbol):
            if node.name == "P":
                return {(Fraction(1), Fraction(0)): Fraction(1)}
            if node.name == "Q":
                return {(Fraction(0), Fraction(1)): Fraction(1)}
            if node.name in env:
                return dict(env[node.name])
            raise EvaluationError(f"unbound symbol '{node.name}' in expansion")
        if isinstance(node, Add):
            out: Terms = {}
            for item in node.items:
                out = _add(out, ex(item))
            return out
        if isinstance(node, Mul):
            out = {zero: Fraction(1)}
            for item in node.items:
                out = _mul(out, ex(item))
            return out
        if isinstance(node, Neg):
            return {m: -c for m, c in ex(node.expr).items()}
        if isinstance(node, Pow):
            return _power(ex(node.base), node.exponent, to_text(node.base))
        if isinstance(node, Call) and node.func == "sqrt":
            return _power(ex(node.args[0]), Fraction(1, 2), to_text(node.args[0]))
        raise EvaluationError(f"cannot expand {to_text(node)}")

    return ex(e)


def symbols(e: Expr) -> set[str]:
    """Names of all free symbols"""
    if isinstance(e, Symbol):
        return {e.name}
    if isinstance(e, (Add, Mul)):
        return set().union(*(symbols(i) for i in e.items))
    if isinstance(e, Neg):
        return symbols(e.expr)
    if isinstance(e, Pow):
        return symbols(e.base)
    if isinstance(e, Call):
        return set().union(*(symbols(a) for a in e.args))
    return set()
