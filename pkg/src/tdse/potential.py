"""Textual potential V(x, t) compiled to Taylor-coefficient form.

Input expressions follow the grammar

    expr   := term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := '-' unary | factor
    factor := atom ('^' nonneg-integer)?
    atom   := number | 'x' | 't' | fn '(' expr ')' | '(' expr ')'
    fn     := 'sin' | 'cos' | 'exp'

with decimal number literals (optional exponent), insignificant
whitespace, and '^' binding tighter than unary minus.  The parse result
is expanded and collected as a polynomial in x; each coefficient is an
expression tree over t alone (a TimeProfile).  Restrictions: x may not
appear inside function arguments or denominators, and x exponents must
be nonnegative integer literals.

The stored coefficient of x^n IS the Taylor coefficient of the potential
about x = 0 (any 1/n! bookkeeping is already absorbed here), so
eval_taylor_coefficients feeds the coefficient flow directly.

Models are immutable after construction and evaluation is pure.
"""

import math
import re
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PotentialError",
    "PotentialSyntaxError",
    "XInsideFunctionError",
    "XInDenominatorError",
    "NonIntegerPowerError",
    "EvaluationError",
    "Const",
    "TimeVar",
    "Neg",
    "BinOp",
    "Power",
    "Call",
    "PotentialModel",
    "parse_potential",
    "eval_profile",
    "eval_taylor_coefficients",
    "eval_potential_at",
    "format_potential",
]

_FUNCTIONS = ("sin", "cos", "exp")


class PotentialError(ValueError):
    """Base class for every potential-DSL failure."""


class PotentialSyntaxError(PotentialError):
    """Malformed expression text; carries a 1-based character position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (position {position})")
        self.position = position


class XInsideFunctionError(PotentialError):
    """x occurred inside a sin/cos/exp argument."""


class XInDenominatorError(PotentialError):
    """x occurred in the denominator of a division."""


class NonIntegerPowerError(PotentialError):
    """'^' exponent was not a nonnegative integer literal."""


class EvaluationError(PotentialError):
    """Runtime failure while evaluating a profile (division by zero)."""


# ---------------------------------------------------------------------------
# time-profile expression trees


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class TimeVar:
    pass


@dataclass(frozen=True)
class Neg:
    operand: "TimeProfile"


@dataclass(frozen=True)
class BinOp:
    op: str  # '+', '-', '*', '/'
    left: "TimeProfile"
    right: "TimeProfile"


@dataclass(frozen=True)
class Power:
    base: "TimeProfile"
    exponent: int


@dataclass(frozen=True)
class Call:
    fn: str  # 'sin', 'cos', 'exp'
    arg: "TimeProfile"


TimeProfile = Const | TimeVar | Neg | BinOp | Power | Call


def _is_const(node, value=None) -> bool:
    if not isinstance(node, Const):
        return False
    return value is None or node.value == value


# smart constructors: fold constants so parsed coefficients stay tidy


def _neg(a):
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.operand
    return Neg(a)


def _add(a, b):
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    return BinOp("+", a, b)


def _sub(a, b):
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return _neg(b)
    return BinOp("-", a, b)


def _mul(a, b):
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return Const(0.0)
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    return BinOp("*", a, b)


def _div(a, b):
    # never fold away a zero denominator: the obligation is checked at eval
    if isinstance(b, Const) and b.value != 0.0:
        if isinstance(a, Const):
            return Const(a.value / b.value)
        if b.value == 1.0:
            return a
    return BinOp("/", a, b)


def _pow(base, exponent: int):
    if exponent == 0:
        return Const(1.0)
    if exponent == 1:
        return base
    if isinstance(base, Const):
        return Const(base.value**exponent)
    return Power(base, exponent)


# ---------------------------------------------------------------------------
# polynomials in x with TimeProfile coefficients (dict degree -> node)


def _prune(p: dict) -> dict:
    return {d: c for d, c in p.items() if not _is_const(c, 0.0)}


def _poly_add(p, q):
    out = dict(p)
    for d, c in q.items():
        out[d] = _add(out[d], c) if d in out else c
    return _prune(out)


def _poly_sub(p, q):
    out = dict(p)
    for d, c in q.items():
        out[d] = _sub(out[d], c) if d in out else _neg(c)
    return _prune(out)


def _poly_neg(p):
    return {d: _neg(c) for d, c in p.items()}


def _poly_mul(p, q):
    out: dict = {}
    for d1, c1 in p.items():
        for d2, c2 in q.items():
            d = d1 + d2
            piece = _mul(c1, c2)
            out[d] = _add(out[d], piece) if d in out else piece
    return _prune(out)


def _poly_pow(p, exponent: int):
    if exponent == 0:
        return {0: Const(1.0)}
    if set(p) <= {0}:  # x-free: keep a single Power node instead of a chain
        return {0: _pow(p.get(0, Const(0.0)), exponent)} if p else {}
    out = p
    for _ in range(exponent - 1):
        out = _poly_mul(out, p)
    return out


@dataclass(frozen=True)
class PotentialModel:
    """Polynomial-in-x potential; terms maps degree -> TimeProfile."""

    terms: dict

    def __post_init__(self):
        for d in self.terms:
            if not isinstance(d, int) or d < 0:
                raise ValueError(f"term degrees must be nonnegative integers, got {d!r}")

    @property
    def degree(self) -> int:
        return max(self.terms) if self.terms else 0


# ---------------------------------------------------------------------------
# tokenizer / parser

_NUMBER_RE = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


@dataclass(frozen=True)
class _Token:
    kind: str  # 'number' | 'ident' | 'op' | 'end'
    text: str
    pos: int  # 1-based character position


def _tokenize(text: str) -> list:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "+-*/^()":
            tokens.append(_Token("op", ch, i + 1))
            i += 1
            continue
        m = _NUMBER_RE.match(text, i)
        if m:
            tokens.append(_Token("number", m.group(), i + 1))
            i = m.end()
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            tokens.append(_Token("ident", m.group(), i + 1))
            i = m.end()
            continue
        raise PotentialSyntaxError(f"unexpected character {ch!r}", i + 1)
    tokens.append(_Token("end", "", n + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.index = 0

    def peek(self) -> _Token:
        return self.tokens[self.index]

    def advance(self) -> _Token:
        tok = self.tokens[self.index]
        self.index += 1
        return tok

    def expect_op(self, op: str):
        tok = self.advance()
        if tok.kind != "op" or tok.text != op:
            raise PotentialSyntaxError(
                f"expected {op!r}, found {tok.text!r}" if tok.text else f"expected {op!r}",
                tok.pos,
            )

    # grammar rules, each returning a polynomial dict

    def expr(self) -> dict:
        poly = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.advance().text
            rhs = self.term()
            poly = _poly_add(poly, rhs) if op == "+" else _poly_sub(poly, rhs)
        return poly

    def term(self) -> dict:
        poly = self.unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            tok = self.advance()
            rhs = self.unary()
            if tok.text == "*":
                poly = _poly_mul(poly, rhs)
            else:
                if any(d > 0 for d in rhs):
                    raise XInDenominatorError(
                        f"x may not appear in a denominator (position {tok.pos})"
                    )
                denom = rhs.get(0, Const(0.0))
                poly = _prune({d: _div(c, denom) for d, c in poly.items()})
        return poly

    def unary(self) -> dict:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return _poly_neg(self.unary())
        return self.factor()

    def factor(self) -> dict:
        poly = self.atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            exp_tok = self.advance()
            if exp_tok.kind != "number" or not exp_tok.text.isdigit():
                raise NonIntegerPowerError(
                    f"exponent must be a nonnegative integer literal, found "
                    f"{exp_tok.text!r} (position {exp_tok.pos})"
                )
            poly = _poly_pow(poly, int(exp_tok.text))
        return poly

    def atom(self) -> dict:
        tok = self.advance()
        if tok.kind == "number":
            return {0: Const(float(tok.text))}
        if tok.kind == "ident":
            if tok.text == "x":
                return {1: Const(1.0)}
            if tok.text == "t":
                return {0: TimeVar()}
            if tok.text in _FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                if any(d > 0 for d in arg):
                    raise XInsideFunctionError(
                        f"x may not appear inside {tok.text}() (position {tok.pos})"
                    )
                return {0: Call(tok.text, arg.get(0, Const(0.0)))}
            raise PotentialSyntaxError(f"unknown identifier {tok.text!r}", tok.pos)
        if tok.kind == "op" and tok.text == "(":
            poly = self.expr()
            self.expect_op(")")
            return poly
        raise PotentialSyntaxError(
            f"unexpected {tok.text!r}" if tok.text else "unexpected end of input",
            tok.pos,
        )


def parse_potential(text: str) -> PotentialModel:
    """Parse expression text into a PotentialModel.

    Raises PotentialSyntaxError, XInsideFunctionError, XInDenominatorError
    or NonIntegerPowerError; the model itself never fails to evaluate
    except for division by zero at a particular t.
    """
    if not text or not text.strip():
        raise PotentialSyntaxError("empty expression", 1)
    parser = _Parser(text)
    poly = parser.expr()
    trailing = parser.peek()
    if trailing.kind != "end":
        raise PotentialSyntaxError(f"unexpected {trailing.text!r}", trailing.pos)
    return PotentialModel(_prune(poly))


# ---------------------------------------------------------------------------
# evaluation


def eval_profile(node, t: float) -> float:
    """Evaluate a TimeProfile tree at time t."""
    if isinstance(node, Const):
        return node.value
    if isinstance(node, TimeVar):
        return t
    if isinstance(node, Neg):
        return -eval_profile(node.operand, t)
    if isinstance(node, BinOp):
        left = eval_profile(node.left, t)
        right = eval_profile(node.right, t)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if right == 0.0:
            raise EvaluationError(f"division by zero at t = {t}")
        return left / right
    if isinstance(node, Power):
        return eval_profile(node.base, t) ** node.exponent
    if isinstance(node, Call):
        return getattr(math, node.fn)(eval_profile(node.arg, t))
    raise TypeError(f"not a TimeProfile node: {node!r}")


def eval_taylor_coefficients(model: PotentialModel, t: float, max_degree: int) -> np.ndarray:
    """Coefficients V_0..V_max at time t; degrees absent from the model are 0."""
    if max_degree < 0:
        raise ValueError("max_degree must be nonnegative")
    out = np.zeros(max_degree + 1)
    for d, node in model.terms.items():
        if d <= max_degree:
            out[d] = eval_profile(node, t)
    return out


def eval_potential_at(model: PotentialModel, x: float, t: float) -> float:
    """Resummed potential value sum_n V_n(t) * x**n."""
    return float(sum(eval_profile(node, t) * x**d for d, node in model.terms.items()))


# ---------------------------------------------------------------------------
# pretty printer; parse(format_potential(parse(text))) reproduces the model


def _prec(node) -> float:
    if isinstance(node, BinOp):
        return 1.0 if node.op in "+-" else 2.0
    if isinstance(node, Neg):
        return 2.5
    if isinstance(node, Power):
        return 3.0
    return 4.0  # Const, TimeVar, Call


def _fmt(node, required: float) -> str:
    if isinstance(node, Const):
        text = repr(node.value)
    elif isinstance(node, TimeVar):
        text = "t"
    elif isinstance(node, Neg):
        text = "-" + _fmt(node.operand, 3.0)
    elif isinstance(node, BinOp):
        prec = _prec(node)
        text = f"{_fmt(node.left, prec)} {node.op} {_fmt(node.right, prec + 0.01)}"
    elif isinstance(node, Power):
        text = f"{_fmt(node.base, 4.0)}^{node.exponent}"
    elif isinstance(node, Call):
        return f"{node.fn}({_fmt(node.arg, 0.0)})"
    else:
        raise TypeError(f"not a TimeProfile node: {node!r}")
    if _prec(node) < required:
        return f"({text})"
    return text


def format_potential(model: PotentialModel) -> str:
    """Canonical text form of a model; the empty model prints as '0'."""
    if not model.terms:
        return "0"
    parts = []
    for d in sorted(model.terms):
        coeff = model.terms[d]
        if d == 0:
            parts.append(_fmt(coeff, 2.0))
        else:
            xpow = "x" if d == 1 else f"x^{d}"
            if _is_const(coeff, 1.0):
                parts.append(xpow)
            else:
                parts.append(f"{_fmt(coeff, 2.0)} * {xpow}")
    return " + ".join(parts)
