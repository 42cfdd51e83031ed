"""Recursive-descent parser for the wavefunction expression language.

Grammar, loosest binding first::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" integer)?
    atom   := number | "pi" | x_J_D | alias | func "(" expr ")" | "(" expr ")"

``integer`` is an optionally signed integer literal, bare or parenthesized.
A minus sign directly in front of a number literal is folded into a
negative constant, which is what lets the canonical printer round-trip.
"""

from __future__ import annotations

import math
import re
from typing import Mapping

from ..errors import ValidationError
from .expr import FUNCTIONS, Add, Const, Div, Expr, Func, Mul, Neg, Pow, Sub, Var, check_bounds


class ExprSyntaxError(ValidationError):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} at position {position}")


_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)
_VAR = re.compile(r"x_(\d+)_(\d+)$")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ExprSyntaxError(f"unexpected character {text[start]!r}", start)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, aliases: Mapping[str, tuple[int, int]]):
        self.tokens = _tokenize(text)
        self.i = 0
        self.aliases = aliases

    def peek(self, offset: int = 0):
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, pos = self.take()
        if text != value or kind != "op":
            raise ExprSyntaxError(f"expected {value!r}, found {text or 'end of input'!r}", pos)

    def parse(self) -> Expr:
        e = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {text!r}", pos)
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            right = self.term()
            left = Add(left, right) if op == "+" else Sub(left, right)
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            right = self.unary()
            left = Mul(left, right) if op == "*" else Div(left, right)
        return left

    def unary(self) -> Expr:
        if self.peek()[:2] == ("op", "-"):
            self.take()
            nxt, after = self.peek(), self.peek(1)
            if nxt[0] == "num" and after[1] != "^":
                self.take()
                return Const(-float(nxt[1]))
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            return Pow(base, self.integer())
        return base

    def integer(self) -> int:
        kind, text, pos = self.peek()
        if (kind, text) == ("op", "("):
            self.take()
            k = self.integer()
            self.expect(")")
            return k
        sign = 1
        if (kind, text) == ("op", "-"):
            self.take()
            sign = -1
            kind, text, pos = self.peek()
        if kind != "num":
            raise ExprSyntaxError("exponent must be an integer literal", pos)
        self.take()
        value = float(text)
        if value != int(value):
            raise ExprSyntaxError(f"exponent {text} is not an integer", pos)
        return sign * int(value)

    def atom(self) -> Expr:
        kind, text, pos = self.take()
        if kind == "num":
            return Const(float(text))
        if kind == "op" and text == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "name":
            if text == "pi":
                return Const(math.pi)
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Func(text, arg)
            m = _VAR.match(text)
            if m:
                return Var(int(m.group(1)), int(m.group(2)))
            if text in self.aliases:
                return Var(*self.aliases[text])
            raise ExprSyntaxError(f"unknown identifier {text!r}", pos)
        raise ExprSyntaxError(f"unexpected {text or 'end of input'!r}", pos)


def parse_expr(text: str, n: int = 1, d: int = 1, aliases: Mapping[str, tuple[int, int]] | None = None) -> Expr:
    """Parse ``text`` into an expression over ``n`` particles in ``d`` dimensions.

    ``aliases`` names extra identifiers, e.g. ``{"rho": (0, 0)}`` for a
    one-variable hyperradial function.

    Raises:
        ExprSyntaxError: malformed input or unknown identifier.
        ExprIndexError: a variable index is not below ``n`` / ``d``.
    """
    e = _Parser(text, aliases or {}).parse()
    check_bounds(e, n, d)
    return e
