"""Formula representation and text parsing.

The abstract syntax keeps eventually/globally and everywhere as first-class
nodes; their semantics in the monitors coincide with the derived forms
(``F phi == true U phi``, ``everywhere == !somewhere!``), which the test
suite checks on random inputs.

Concrete grammar (one formula, or a script of ``name := formula`` lines
with ``#`` comments)::

    formula  := or_expr ('->' formula)?          # sugar for !a | b
    or_expr  := and_expr ('|' and_expr)*
    and_expr := binary ('&' binary)*
    binary   := unary (('U'|'S') '[' num ',' num ']' unary)?
    unary    := '!' unary
              | ('F' | 'G') '[' num ',' num ']' unary
              | ('somewhere' | 'everywhere') '[' num ',' num ']' unary
              | 'true' | 'false'
              | '(' formula ')'
              | NAME                              # reference to a script formula
              | expr cmp expr                     # atomic predicate
    cmp      := '<=' | '<' | '>=' | '>' | '=' | '=='
    expr     := term (('+'|'-') term)* ; term := factor (('*'|'/') factor)*
    factor   := NUMBER | NAME | '-' factor | '(' expr ')'
    num      := NUMBER | NUMBER '/' NUMBER        # bounds accept exact rationals

``U``, ``S``, ``F``, ``G``, ``somewhere``, ``everywhere``, ``true`` and
``false`` are reserved words.  Time and distance bounds must satisfy
``0 <= lower <= upper``; a degenerate ``[a,a]`` window is allowed and is
resolved on the sampling grid by the monitors.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping

from .errors import SSTLError

# ---------------------------------------------------------------------------
# Abstract syntax
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"


Expr = Var | Const | BinOp


@dataclass(frozen=True)
class Comparison:
    op: str  # one of <= < >= > =
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Atomic:
    cmp: Comparison


@dataclass(frozen=True)
class BoolConst:
    value: bool


@dataclass(frozen=True)
class Not:
    child: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


def _check_bounds(lo: Fraction, hi: Fraction, kind: str) -> None:
    if lo < 0 or hi < 0:
        raise ValueError(f"negative {kind} bound [{lo},{hi}]")
    if hi < lo:
        raise ValueError(f"reversed {kind} interval [{lo},{hi}]")


@dataclass(frozen=True)
class Until:
    left: "Formula"
    right: "Formula"
    t1: Fraction
    t2: Fraction

    def __post_init__(self):
        _check_bounds(self.t1, self.t2, "time")


@dataclass(frozen=True)
class Eventually:
    child: "Formula"
    t1: Fraction
    t2: Fraction

    def __post_init__(self):
        _check_bounds(self.t1, self.t2, "time")


@dataclass(frozen=True)
class Globally:
    child: "Formula"
    t1: Fraction
    t2: Fraction

    def __post_init__(self):
        _check_bounds(self.t1, self.t2, "time")


@dataclass(frozen=True)
class Somewhere:
    child: "Formula"
    d1: Fraction
    d2: Fraction

    def __post_init__(self):
        _check_bounds(self.d1, self.d2, "distance")


@dataclass(frozen=True)
class Everywhere:
    child: "Formula"
    d1: Fraction
    d2: Fraction

    def __post_init__(self):
        _check_bounds(self.d1, self.d2, "distance")


@dataclass(frozen=True)
class Surround:
    left: "Formula"
    right: "Formula"
    d1: Fraction
    d2: Fraction

    def __post_init__(self):
        _check_bounds(self.d1, self.d2, "distance")


Formula = (
    Atomic | BoolConst | Not | And | Or | Until | Eventually | Globally
    | Somewhere | Everywhere | Surround
)

# ---------------------------------------------------------------------------
# Static analysis
# ---------------------------------------------------------------------------


def children(formula: Formula) -> tuple[Formula, ...]:
    if isinstance(formula, (Atomic, BoolConst)):
        return ()
    if isinstance(formula, (Not, Eventually, Globally, Somewhere, Everywhere)):
        return (formula.child,)
    return (formula.left, formula.right)


def temporal_depth(formula: Formula) -> Fraction:
    """Worst-case look-ahead in time units: nested upper time bounds."""
    inner = max((temporal_depth(c) for c in children(formula)), default=Fraction(0))
    if isinstance(formula, (Until, Eventually, Globally)):
        return formula.t2 + inner
    return inner


def until_count(formula: Formula) -> int:
    """Number of temporal operators, counting F and G as one until each."""
    own = 1 if isinstance(formula, (Until, Eventually, Globally)) else 0
    return own + sum(until_count(c) for c in children(formula))


def variables(formula: Formula) -> frozenset[str]:
    def expr_vars(e: Expr) -> Iterator[str]:
        if isinstance(e, Var):
            yield e.name
        elif isinstance(e, BinOp):
            yield from expr_vars(e.left)
            yield from expr_vars(e.right)

    out: set[str] = set()
    if isinstance(formula, Atomic):
        out.update(expr_vars(formula.cmp.left))
        out.update(expr_vars(formula.cmp.right))
    for c in children(formula):
        out.update(variables(c))
    return frozenset(out)


def has_equality_atom(formula: Formula) -> bool:
    if isinstance(formula, Atomic) and formula.cmp.op == "=":
        return True
    return any(has_equality_atom(c) for c in children(formula))


def desugar(formula: Formula) -> Formula:
    """Rewrite F, G and everywhere into until/somewhere primitives."""
    if isinstance(formula, Eventually):
        return Until(BoolConst(True), desugar(formula.child), formula.t1, formula.t2)
    if isinstance(formula, Globally):
        return Not(Until(BoolConst(True), Not(desugar(formula.child)), formula.t1, formula.t2))
    if isinstance(formula, Everywhere):
        return Not(Somewhere(Not(desugar(formula.child)), formula.d1, formula.d2))
    if isinstance(formula, Not):
        return Not(desugar(formula.child))
    if isinstance(formula, And):
        return And(desugar(formula.left), desugar(formula.right))
    if isinstance(formula, Or):
        return Or(desugar(formula.left), desugar(formula.right))
    if isinstance(formula, Until):
        return Until(desugar(formula.left), desugar(formula.right), formula.t1, formula.t2)
    if isinstance(formula, Somewhere):
        return Somewhere(desugar(formula.child), formula.d1, formula.d2)
    if isinstance(formula, Surround):
        return Surround(desugar(formula.left), desugar(formula.right), formula.d1, formula.d2)
    return formula


# ---------------------------------------------------------------------------
# Pretty printing
# ---------------------------------------------------------------------------


def format_number(value: Fraction) -> str:
    """Exact text form: integer, finite decimal, or p/q."""
    if value.denominator == 1:
        return str(value.numerator)
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den == 1:
        shift = max(twos, fives)
        scaled = value.numerator * 10**shift // value.denominator
        text = str(abs(scaled)).rjust(shift + 1, "0")
        sign = "-" if scaled < 0 else ""
        return f"{sign}{text[:-shift]}.{text[-shift:]}"
    return f"{value.numerator}/{value.denominator}"


_EXPR_LEVEL = {"+": 1, "-": 1, "*": 2, "/": 2}


def _format_expr(expr: Expr, parent_level: int = 0, right_side: bool = False) -> str:
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Const):
        text = format_number(expr.value)
        return f"({text})" if expr.value < 0 and parent_level > 0 else text
    level = _EXPR_LEVEL[expr.op]
    text = (
        f"{_format_expr(expr.left, level)} {expr.op} "
        f"{_format_expr(expr.right, level, right_side=True)}"
    )
    if level < parent_level or (level == parent_level and right_side):
        return f"({text})"
    return text


def pretty(formula: Formula) -> str:
    """Canonical text form; ``parse(pretty(f))`` reproduces ``f``."""

    def bounds(lo, hi):
        return f"[{format_number(lo)},{format_number(hi)}]"

    def binary_operand(f: Formula) -> str:
        if isinstance(f, (And, Or, Until, Surround)):
            return f"({pretty(f)})"
        return pretty(f)

    def unary_operand(f: Formula) -> str:
        if isinstance(f, (And, Or, Until, Surround)):
            return f"({pretty(f)})"
        return pretty(f)

    if isinstance(formula, BoolConst):
        return "true" if formula.value else "false"
    if isinstance(formula, Atomic):
        cmp = formula.cmp
        return f"({_format_expr(cmp.left)} {cmp.op} {_format_expr(cmp.right)})"
    if isinstance(formula, Not):
        return f"!{unary_operand(formula.child)}"
    if isinstance(formula, And):
        return f"{binary_operand(formula.left)} & {binary_operand(formula.right)}"
    if isinstance(formula, Or):
        return f"{binary_operand(formula.left)} | {binary_operand(formula.right)}"
    if isinstance(formula, Until):
        return (
            f"{binary_operand(formula.left)} U{bounds(formula.t1, formula.t2)} "
            f"{binary_operand(formula.right)}"
        )
    if isinstance(formula, Eventually):
        return f"F{bounds(formula.t1, formula.t2)} {unary_operand(formula.child)}"
    if isinstance(formula, Globally):
        return f"G{bounds(formula.t1, formula.t2)} {unary_operand(formula.child)}"
    if isinstance(formula, Somewhere):
        return f"somewhere{bounds(formula.d1, formula.d2)} {unary_operand(formula.child)}"
    if isinstance(formula, Everywhere):
        return f"everywhere{bounds(formula.d1, formula.d2)} {unary_operand(formula.child)}"
    if isinstance(formula, Surround):
        return (
            f"{binary_operand(formula.left)} S{bounds(formula.d1, formula.d2)} "
            f"{binary_operand(formula.right)}"
        )
    raise TypeError(f"not a formula: {formula!r}")


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


class ParseError(SSTLError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column


_KEYWORDS = {"U", "S", "F", "G", "somewhere", "everywhere", "true", "false"}

_TOKEN_RE = re.compile(
    r"""
    (?P<skip>[ \t]+)
  | (?P<comment>\#[^\n]*)
  | (?P<newline>\n)
  | (?P<number>\d+(?:\.\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><=|>=|==|:=|->|[!&|()\[\],<>=+\-*/])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # number | name | op | newline | end
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = match.lastgroup
        value = match.group()
        column = pos - line_start + 1
        if kind == "newline":
            tokens.append(_Token("newline", value, line, column))
            line += 1
            line_start = match.end()
        elif kind not in ("skip", "comment"):
            tokens.append(_Token(kind, value, line, column))
        pos = match.end()
    tokens.append(_Token("end", "", line, len(text) - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], env: Mapping[str, Formula]):
        self.tokens = tokens
        self.pos = 0
        self.env = env

    # -- token plumbing ----------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def accept(self, text: str) -> bool:
        token = self.peek()
        if token.kind in ("op", "name") and token.text == text:
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> _Token:
        token = self.peek()
        if token.kind in ("op", "name") and token.text == text:
            return self.advance()
        raise ParseError(f"expected {text!r}, found {token.text!r}", token.line, token.column)

    def fail(self, message: str) -> "ParseError":
        token = self.peek()
        return ParseError(message, token.line, token.column)

    # -- grammar -----------------------------------------------------------

    def parse_formula(self) -> Formula:
        left = self.parse_or()
        if self.accept("->"):
            right = self.parse_formula()
            return Or(Not(left), right)
        return left

    def parse_or(self) -> Formula:
        node = self.parse_and()
        while self.accept("|"):
            node = Or(node, self.parse_and())
        return node

    def parse_and(self) -> Formula:
        node = self.parse_binary()
        while self.accept("&"):
            node = And(node, self.parse_binary())
        return node

    def parse_binary(self) -> Formula:
        left = self.parse_unary()
        token = self.peek()
        if token.kind == "name" and token.text in ("U", "S"):
            self.advance()
            lo, hi = self.parse_bounds("time" if token.text == "U" else "distance")
            right = self.parse_unary()
            if token.text == "U":
                return Until(left, right, lo, hi)
            return Surround(left, right, lo, hi)
        return left

    def parse_unary(self) -> Formula:
        token = self.peek()
        if self.accept("!"):
            return Not(self.parse_unary())
        if token.kind == "name" and token.text in ("F", "G", "somewhere", "everywhere"):
            self.advance()
            kind = "time" if token.text in ("F", "G") else "distance"
            lo, hi = self.parse_bounds(kind)
            child = self.parse_unary()
            node_type = {
                "F": Eventually, "G": Globally,
                "somewhere": Somewhere, "everywhere": Everywhere,
            }[token.text]
            return node_type(child, lo, hi)
        return self.parse_primary()

    def parse_primary(self) -> Formula:
        token = self.peek()
        if token.kind == "name" and token.text == "true":
            self.advance()
            return BoolConst(True)
        if token.kind == "name" and token.text == "false":
            self.advance()
            return BoolConst(False)

        atom = self.try_parse_atom()
        if atom is not None:
            return atom

        if self.accept("("):
            inner = self.parse_formula()
            self.expect(")")
            return inner

        if token.kind == "name" and token.text not in _KEYWORDS:
            self.advance()
            if token.text in self.env:
                return self.env[token.text]
            raise ParseError(
                f"unknown formula name {token.text!r} (atoms need a comparison)",
                token.line, token.column,
            )
        raise self.fail(f"expected a formula, found {token.text!r}")

    def try_parse_atom(self) -> Atomic | None:
        saved = self.pos
        try:
            left = self.parse_expr()
            token = self.peek()
            if token.kind == "op" and token.text in ("<=", "<", ">=", ">", "=", "=="):
                self.advance()
                right = self.parse_expr()
                op = "=" if token.text == "==" else token.text
                return Atomic(Comparison(op, left, right))
        except ParseError:
            pass
        self.pos = saved
        return None

    def parse_bounds(self, kind: str) -> tuple[Fraction, Fraction]:
        open_token = self.expect("[")
        lo = self.parse_signed_rational()
        self.expect(",")
        hi = self.parse_signed_rational()
        self.expect("]")
        try:
            _check_bounds(lo, hi, kind)
        except ValueError as exc:
            raise ParseError(str(exc), open_token.line, open_token.column) from None
        return lo, hi

    def parse_signed_rational(self) -> Fraction:
        negative = self.accept("-")
        token = self.peek()
        if token.kind != "number":
            raise self.fail(f"expected a number, found {token.text!r}")
        self.advance()
        value = Fraction(token.text)
        if self.accept("/"):
            denom_token = self.peek()
            if denom_token.kind != "number" or "." in denom_token.text:
                raise self.fail("expected an integer denominator")
            self.advance()
            value = value / Fraction(denom_token.text)
        return -value if negative else value

    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while True:
            token = self.peek()
            if token.kind == "op" and token.text in ("+", "-"):
                self.advance()
                node = BinOp(token.text, node, self.parse_term())
            else:
                return node

    def parse_term(self) -> Expr:
        node = self.parse_factor()
        while True:
            token = self.peek()
            if token.kind == "op" and token.text in ("*", "/"):
                self.advance()
                node = BinOp(token.text, node, self.parse_factor())
            else:
                return node

    def parse_factor(self) -> Expr:
        token = self.peek()
        if token.kind == "number":
            self.advance()
            return Const(Fraction(token.text))
        if token.kind == "name" and token.text not in _KEYWORDS:
            self.advance()
            return Var(token.text)
        if self.accept("-"):
            inner = self.parse_factor()
            if isinstance(inner, Const):
                return Const(-inner.value)
            return BinOp("-", Const(Fraction(0)), inner)
        if self.accept("("):
            inner = self.parse_expr()
            self.expect(")")
            return inner
        raise self.fail(f"expected an expression, found {token.text!r}")


def parse_formula(text: str, env: Mapping[str, Formula] | None = None) -> Formula:
    """Parse a single formula; ``env`` resolves bare names to prior formulas."""
    tokens = [t for t in _tokenize(text) if t.kind != "newline"]
    parser = _Parser(tokens, env or {})
    formula = parser.parse_formula()
    token = parser.peek()
    if token.kind != "end":
        raise ParseError(f"trailing input {token.text!r}", token.line, token.column)
    return formula


def parse_script(text: str) -> dict[str, Formula]:
    """Parse a formula script: one ``name := formula`` binding per line.

    Later formulas may reference earlier ones by name; references are
    inlined, so every returned formula is self-contained.
    """
    env: dict[str, Formula] = {}
    tokens = _tokenize(text)
    lines: list[list[_Token]] = [[]]
    for token in tokens:
        if token.kind == "newline":
            lines.append([])
        else:
            lines[-1].append(token)
    end_token = tokens[-1]
    for line in lines:
        content = [t for t in line if t.kind != "end"]
        if not content:
            continue
        name_token = content[0]
        if name_token.kind != "name" or len(content) < 2 or content[1].text != ":=":
            raise ParseError("expected 'name := formula'", name_token.line, name_token.column)
        if name_token.text in _KEYWORDS:
            raise ParseError(
                f"{name_token.text!r} is a reserved word", name_token.line, name_token.column
            )
        if name_token.text in env:
            raise ParseError(
                f"formula {name_token.text!r} defined twice", name_token.line, name_token.column
            )
        body = content[2:] + [end_token]
        parser = _Parser(body, env)
        formula = parser.parse_formula()
        token = parser.peek()
        if token.kind != "end":
            raise ParseError(f"trailing input {token.text!r}", token.line, token.column)
        env[name_token.text] = formula
    return env


def read_script(path) -> dict[str, Formula]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_script(fh.read())
