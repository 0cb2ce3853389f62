"""
Text form of expressions: a recursive-descent parser and a printer.

Grammar:

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := primary ('^' INTEGER)?
    primary := NUMBER | 't' | FUNC '(' expr ')' | '(' expr ')'
    FUNC    := cos | sin | log | exp

The printer emits exactly what the parser reads back, so
parse(to_text(e)) == e for every tree.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import List, Optional

from errors import ExponentNotInteger, InvalidExpression, ParseError
from expr_tree import (
    MAX_EXPONENT,
    MIN_EXPONENT,
    UNARY_OPS,
    Binary,
    Const,
    Expr,
    PowInt,
    TimeVar,
    Unary,
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)

_BINARY_SYMBOL = {"add": "+", "sub": "-", "mul": "*", "div": "/"}
_SYMBOL_BINARY = {v: k for k, v in _BINARY_SYMBOL.items()}


@dataclass(frozen=True)
class Token:
    kind: str  # number | name | op | end
    text: str
    pos: int


def tokenize(text: str) -> List[Token]:
    source = text.replace("−", "-")
    tokens: List[Token] = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character '{source[pos]}'", pos)
        if m.lastgroup != "ws":
            tokens.append(Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(Token("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, text: str) -> None:
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def accept(self, text: str) -> Optional[Token]:
        if self.tok.kind == "op" and self.tok.text == text:
            return self.advance()
        return None

    def expect(self, text: str) -> Token:
        tok = self.accept(text)
        if tok is None:
            found = self.tok.text or "end of input"
            raise ParseError(f"expected '{text}', found '{found}'", self.tok.pos)
        return tok

    def parse(self) -> Expr:
        if self.tok.kind == "end":
            raise ParseError("empty expression", 0)
        e = self.expr()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected '{self.tok.text}'", self.tok.pos)
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = _SYMBOL_BINARY[self.advance().text]
            left = Binary(op, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = _SYMBOL_BINARY[self.advance().text]
            left = Binary(op, left, self.unary())
        return left

    def unary(self) -> Expr:
        if self.accept("-"):
            operand = self.unary()
            if isinstance(operand, Const):
                return Const(-operand.value)
            return Binary("mul", Const(-1.0), operand)
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        caret = self.accept("^")
        if caret is None:
            return base
        tok = self.tok
        if tok.kind != "number" or not tok.text.isdigit():
            raise ExponentNotInteger(
                f"exponent must be an integer literal, found '{tok.text or 'end of input'}'", tok.pos
            )
        self.advance()
        n = int(tok.text)
        if self.tok.kind == "op" and self.tok.text == "^":
            raise ParseError("chained '^' needs parentheses", self.tok.pos)
        if n == 1:
            return base
        if not MIN_EXPONENT <= n <= MAX_EXPONENT:
            raise ParseError(f"exponent {n} outside [{MIN_EXPONENT}, {MAX_EXPONENT}]", tok.pos)
        return PowInt(base, n)

    def primary(self) -> Expr:
        tok = self.tok
        if tok.kind == "number":
            self.advance()
            value = float(tok.text)
            if not math.isfinite(value):
                raise ParseError(f"number '{tok.text}' is not finite", tok.pos)
            return Const(value)
        if tok.kind == "name":
            self.advance()
            if tok.text == "t":
                return TimeVar()
            if tok.text in UNARY_OPS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Unary(tok.text, arg)
            raise ParseError(f"unknown name '{tok.text}'", tok.pos)
        if self.accept("("):
            inner = self.expr()
            self.expect(")")
            return inner
        found = tok.text or "end of input"
        raise ParseError(f"unexpected '{found}'", tok.pos)


def parse(text: str) -> Expr:
    """Parse expression text such as '9.32 + 0.16*t - 0.0005*t^3'."""
    return _Parser(text).parse()


# ---- printing ---- #

_PREC_ADD = 1
_PREC_MUL = 2
_PREC_NEG = 3
_PREC_POW = 4
_PREC_ATOM = 5


def _precedence(e: Expr) -> int:
    if isinstance(e, Binary):
        return _PREC_ADD if e.op in ("add", "sub") else _PREC_MUL
    if isinstance(e, PowInt):
        return _PREC_POW
    if isinstance(e, Const) and math.copysign(1.0, e.value) < 0:
        return _PREC_NEG
    return _PREC_ATOM


def _wrap(e: Expr, parens: bool) -> str:
    text = to_text(e)
    return f"({text})" if parens else text


def to_text(e: Expr) -> str:
    if isinstance(e, Const):
        return repr(e.value)
    if isinstance(e, TimeVar):
        return "t"
    if isinstance(e, Unary):
        return f"{e.op}({to_text(e.child)})"
    if isinstance(e, PowInt):
        return f"{_wrap(e.base, _precedence(e.base) != _PREC_ATOM)}^{e.exponent}"
    if isinstance(e, Binary):
        prec = _precedence(e)
        left = _wrap(e.left, _precedence(e.left) < prec)
        right = _wrap(e.right, _precedence(e.right) <= prec)
        return f"{left} {_BINARY_SYMBOL[e.op]} {right}"
    raise InvalidExpression(f"not an expression node: {e!r}")
