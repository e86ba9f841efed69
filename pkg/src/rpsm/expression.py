"""Right-hand-side expressions: AST, parser, renderer and evaluators.

Grammar (whitespace-insensitive)::

    expr     := term (("+" | "-") term)*
    term     := unary (("*" | "/") unary)*
    unary    := "-" unary | power
    power    := atom ("^" nonneg-integer)?
    atom     := number | "t" | stateref | func "(" expr ")" | "(" expr ")"
    stateref := "u" index ( "(" (number "*")? "t" ")" )?
    func     := "exp" | "ln" | "sin" | "cos"

``^`` binds tighter than unary minus, so ``-t^2`` is ``-(t^2)``.  A bare
``u2`` means ``u2(t)``.  Delay factors are numeric literals in ``(0, 1]``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence, Union

from . import series as ts
from .series import SeriesDomainError, TruncatedSeries

__all__ = [
    "Const", "TimeVar", "StateRef", "Add", "Sub", "Neg", "Mul", "Div",
    "IntPow", "Exp", "Ln", "Sin", "Cos", "Expr",
    "ParseError", "EvaluationError",
    "parse", "render", "walk", "state_refs",
    "eval_series", "eval_point",
]


# --- AST -------------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class TimeVar:
    pass


@dataclass(frozen=True)
class StateRef:
    """``u_index(alpha * t)`` with a 1-based component index."""
    index: int
    alpha: float = 1.0


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Sub:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Div:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class IntPow:
    base: "Expr"
    exponent: int


@dataclass(frozen=True)
class Exp:
    arg: "Expr"


@dataclass(frozen=True)
class Ln:
    arg: "Expr"


@dataclass(frozen=True)
class Sin:
    arg: "Expr"


@dataclass(frozen=True)
class Cos:
    arg: "Expr"


Expr = Union[Const, TimeVar, StateRef, Add, Sub, Mul, Div, Neg, IntPow, Exp, Ln, Sin, Cos]

_BINARY = (Add, Sub, Mul, Div)
_UNARY_FUNCS = {"exp": Exp, "ln": Ln, "sin": Sin, "cos": Cos}
_FUNC_NAMES = {v: k for k, v in _UNARY_FUNCS.items()}


def children(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, _BINARY):
        return (e.left, e.right)
    if isinstance(e, IntPow):
        return (e.base,)
    if isinstance(e, (Neg, Exp, Ln, Sin, Cos)):
        return (e.arg,)
    return ()


def walk(e: Expr) -> Iterator[Expr]:
    """Pre-order traversal."""
    yield e
    for c in children(e):
        yield from walk(c)


def state_refs(e: Expr) -> list[StateRef]:
    return [node for node in walk(e) if isinstance(node, StateRef)]


# --- errors ----------------------------------------------------------------

class ParseError(ValueError):
    """Invalid expression text; ``column`` is 1-based."""

    def __init__(self, message: str, column: int, text: str = ""):
        self.message = message
        self.column = column
        self.text = text
        super().__init__(f"column {column}: {message}")


class EvaluationError(ArithmeticError):
    """Domain failure while evaluating an expression.

    ``path`` lists the node kinds from the root to the failing node and
    ``subexpr`` is the rendered failing subexpression.
    """

    def __init__(self, message: str, path: Sequence[str] = (), subexpr: str = ""):
        self.message = message
        self.path = tuple(path)
        self.subexpr = subexpr
        where = "/".join(self.path) or "<root>"
        super().__init__(f"{message} in '{subexpr}' at {where}")


# --- lexer -----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "number", "name", "op", "end"
    text: str
    col: int  # 1-based


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos + 1, text)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), pos + 1))
        pos = m.end()
    tokens.append(_Token("end", "", len(text) + 1))
    return tokens


_STATE_NAME = re.compile(r"u(\d+)\Z")


class _Parser:
    def __init__(self, text: str, n: int):
        self.text = text
        self.n = n
        self.tokens = _tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.pos]

    def fail(self, message: str, tok: _Token | None = None):
        tok = tok or self.tok
        raise ParseError(message, tok.col, self.text)

    def advance(self) -> _Token:
        tok = self.tok
        self.pos += 1
        return tok

    def accept(self, op: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == op:
            self.pos += 1
            return True
        return False

    def expect(self, op: str) -> _Token:
        if self.tok.kind == "op" and self.tok.text == op:
            return self.advance()
        found = self.tok.text or "end of input"
        self.fail(f"expected {op!r}, found {found!r}")

    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "end":
            self.fail(f"unexpected {self.tok.text!r}")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while True:
            if self.accept("+"):
                e = Add(e, self.term())
            elif self.accept("-"):
                e = Sub(e, self.term())
            else:
                return e

    def term(self) -> Expr:
        e = self.unary()
        while True:
            if self.accept("*"):
                e = Mul(e, self.unary())
            elif self.accept("/"):
                e = Div(e, self.unary())
            else:
                return e

    def unary(self) -> Expr:
        if self.accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.accept("^"):
            tok = self.tok
            if tok.kind == "op" and tok.text == "-":
                self.fail("exponent must be a nonnegative integer")
            if tok.kind != "number":
                self.fail("exponent must be a nonnegative integer literal")
            if not tok.text.isdigit():
                self.fail(f"exponent must be a nonnegative integer, got {tok.text!r}")
            self.advance()
            return IntPow(base, int(tok.text))
        return base

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "number":
            value = float(tok.text)
            if not math.isfinite(value):
                self.fail(f"numeric literal {tok.text!r} overflows double precision")
            self.advance()
            return Const(value)
        if tok.kind == "name":
            self.advance()
            if tok.text == "t":
                return TimeVar()
            if tok.text in _UNARY_FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return _UNARY_FUNCS[tok.text](arg)
            m = _STATE_NAME.match(tok.text)
            if m:
                return self.stateref(tok, int(m.group(1)))
            self.fail(f"unknown identifier {tok.text!r}", tok)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        found = tok.text or "end of input"
        self.fail(f"expected a number, 't', a state or a function, found {found!r}")

    def stateref(self, name: _Token, index: int) -> StateRef:
        if not 1 <= index <= self.n:
            self.fail(f"state index {index} outside 1..{self.n}", name)
        alpha = 1.0
        if self.accept("("):
            tok = self.tok
            if tok.kind == "number":
                self.advance()
                self.expect("*")
                alpha = float(tok.text)
                if not 0.0 < alpha <= 1.0:
                    self.fail(f"delay factor {tok.text} outside (0, 1]", tok)
            if not (self.tok.kind == "name" and self.tok.text == "t"):
                self.fail("state argument must be 't' or 'number*t'")
            self.advance()
            self.expect(")")
        return StateRef(index, alpha)


def parse(text: str, n: int) -> Expr:
    """Parse ``text`` into an :data:`Expr` for a system with ``n`` states."""
    if not isinstance(text, str):
        raise ParseError(f"expression must be a string, got {type(text).__name__}", 1, "")
    return _Parser(text, n).parse()


# --- rendering -------------------------------------------------------------

def _num(x: float) -> str:
    r = repr(float(x))
    return r


_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, IntPow: 4}


def _prec(e: Expr) -> int:
    if isinstance(e, Const) and (e.value < 0 or math.copysign(1.0, e.value) < 0):
        return 3
    return _PREC.get(type(e), 5)


def render(e: Expr) -> str:
    """Text that :func:`parse` maps back to a structurally identical tree."""
    if isinstance(e, Const):
        if e.value < 0 or math.copysign(1.0, e.value) < 0:
            return "-" + _num(-e.value)
        return _num(e.value)
    if isinstance(e, TimeVar):
        return "t"
    if isinstance(e, StateRef):
        if e.alpha == 1.0:
            return f"u{e.index}(t)"
        return f"u{e.index}({_num(e.alpha)}*t)"
    if isinstance(e, _BINARY):
        op = {Add: "+", Sub: "-", Mul: "*", Div: "/"}[type(e)]
        p = _PREC[type(e)]
        left = render(e.left)
        if _prec(e.left) < p:
            left = f"({left})"
        right = render(e.right)
        # left associativity: an equal-precedence right operand needs parens
        if _prec(e.right) <= p:
            right = f"({right})"
        return f"{left} {op} {right}"
    if isinstance(e, Neg):
        inner = render(e.arg)
        if _prec(e.arg) < 3:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(e, IntPow):
        base = render(e.base)
        if _prec(e.base) <= 4:
            base = f"({base})"
        return f"{base}^{e.exponent}"
    return f"{_FUNC_NAMES[type(e)]}({render(e.arg)})"


# --- evaluation ------------------------------------------------------------

def _label(e: Expr) -> str:
    return type(e).__name__


def eval_series(e: Expr, state: Sequence[TruncatedSeries], order: int) -> TruncatedSeries:
    """Evaluate ``e`` over truncated series; the result has exactly ``order``.

    ``state[j-1]`` is the series of ``u_j``; state references are rescaled
    to ``u_j(alpha t)``.
    """
    return _eval_series(e, state, order, [])


def _eval_series(e, state, order, path) -> TruncatedSeries:
    path = path + [_label(e)]
    if isinstance(e, Const):
        return ts.constant(e.value, order)
    if isinstance(e, TimeVar):
        return ts.variable(order).resize(order)
    if isinstance(e, StateRef):
        if not 1 <= e.index <= len(state):
            raise EvaluationError(f"state u{e.index} not available ({len(state)} given)",
                                  path, render(e))
        try:
            return ts.pantograph_rescale(state[e.index - 1].resize(order), e.alpha)
        except SeriesDomainError as exc:
            raise EvaluationError(str(exc), path, render(e)) from exc
    try:
        if isinstance(e, Add):
            return ts.add(_eval_series(e.left, state, order, path),
                          _eval_series(e.right, state, order, path))
        if isinstance(e, Sub):
            return ts.sub(_eval_series(e.left, state, order, path),
                          _eval_series(e.right, state, order, path))
        if isinstance(e, Mul):
            return ts.mul(_eval_series(e.left, state, order, path),
                          _eval_series(e.right, state, order, path))
        if isinstance(e, Div):
            a = _eval_series(e.left, state, order, path)
            b = _eval_series(e.right, state, order, path)
            return ts.div(a, b)
        if isinstance(e, Neg):
            return ts.negate(_eval_series(e.arg, state, order, path))
        if isinstance(e, IntPow):
            return ts.int_pow(_eval_series(e.base, state, order, path), e.exponent)
        arg = _eval_series(e.arg, state, order, path)
        if isinstance(e, Exp):
            return ts.compose_exp(arg)
        if isinstance(e, Ln):
            return ts.compose_ln(arg)
        s, c = ts.compose_sin_cos(arg)
        return s if isinstance(e, Sin) else c
    except EvaluationError:
        raise
    except ts.SeriesError as exc:
        raise EvaluationError(str(exc), path, render(e)) from exc


StateLookup = Callable[[int, float], float]


def eval_point(e: Expr, t: float, state_lookup: StateLookup | None = None) -> float:
    """Evaluate ``e`` at time ``t``.

    ``state_lookup(j, s)`` must return ``u_j(s)``; it is called with
    ``s = alpha * t`` for every state reference.
    """
    return _eval_point(e, float(t), state_lookup, [])


def _eval_point(e, t, lookup, path) -> float:
    path = path + [_label(e)]
    if isinstance(e, Const):
        return e.value
    if isinstance(e, TimeVar):
        return t
    if isinstance(e, StateRef):
        if lookup is None:
            raise EvaluationError("state reference without a state lookup", path, render(e))
        return float(lookup(e.index, e.alpha * t if e.alpha != 1.0 else t))
    if isinstance(e, Add):
        return _eval_point(e.left, t, lookup, path) + _eval_point(e.right, t, lookup, path)
    if isinstance(e, Sub):
        return _eval_point(e.left, t, lookup, path) - _eval_point(e.right, t, lookup, path)
    if isinstance(e, Mul):
        return _eval_point(e.left, t, lookup, path) * _eval_point(e.right, t, lookup, path)
    if isinstance(e, Div):
        num = _eval_point(e.left, t, lookup, path)
        den = _eval_point(e.right, t, lookup, path)
        if den == 0.0:
            raise EvaluationError("division by zero", path, render(e))
        return num / den
    if isinstance(e, Neg):
        return -_eval_point(e.arg, t, lookup, path)
    if isinstance(e, IntPow):
        return _eval_point(e.base, t, lookup, path) ** e.exponent
    x = _eval_point(e.arg, t, lookup, path)
    try:
        if isinstance(e, Exp):
            return math.exp(x)
        if isinstance(e, Ln):
            if not x > 0.0:
                raise EvaluationError(f"ln of non-positive value {x!r}", path, render(e))
            return math.log(x)
        if isinstance(e, Sin):
            return math.sin(x)
        return math.cos(x)
    except OverflowError as exc:
        raise EvaluationError(str(exc), path, render(e)) from exc
