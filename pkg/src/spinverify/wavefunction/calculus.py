"""Symbolic partial derivatives by the chain rule.

The only rewriting done is pruning branches that are the literal constant
zero, so operation counts stay a deterministic function of the input tree.
"""

from __future__ import annotations

from typing import Mapping

from .expr import ONE, ZERO, Add, Const, Div, Expr, Func, Mul, Neg, Pow, Sub, Var, is_zero


def add(a: Expr, b: Expr) -> Expr:
    if is_zero(a):
        return b
    if is_zero(b):
        return a
    return Add(a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if is_zero(b):
        return a
    if is_zero(a):
        return neg(b)
    return Sub(a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if is_zero(a) or is_zero(b):
        return ZERO
    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    if is_zero(a):
        return ZERO
    return Div(a, b)


def neg(a: Expr) -> Expr:
    return ZERO if is_zero(a) else Neg(a)


def differentiate(e: Expr, j: int, d: int = 0) -> Expr:
    """Exact partial derivative of ``e`` with respect to ``x_j_d``."""
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Var):
        return ONE if (e.j, e.d) == (j, d) else ZERO
    if isinstance(e, Neg):
        return neg(differentiate(e.arg, j, d))
    if isinstance(e, Add):
        return add(differentiate(e.left, j, d), differentiate(e.right, j, d))
    if isinstance(e, Sub):
        return sub(differentiate(e.left, j, d), differentiate(e.right, j, d))
    if isinstance(e, Mul):
        du = differentiate(e.left, j, d)
        dv = differentiate(e.right, j, d)
        return add(mul(du, e.right), mul(e.left, dv))
    if isinstance(e, Div):
        u, v = e.left, e.right
        du = differentiate(u, j, d)
        dv = differentiate(v, j, d)
        return div(sub(mul(du, v), mul(u, dv)), Pow(v, 2))
    if isinstance(e, Pow):
        k = e.exponent
        du = differentiate(e.base, j, d)
        if k == 0 or is_zero(du):
            return ZERO
        return mul(mul(Const(k), Pow(e.base, k - 1)), du)
    if isinstance(e, Func):
        u = e.arg
        du = differentiate(u, j, d)
        if is_zero(du):
            return ZERO
        name = e.name
        if name == "exp":
            return mul(e, du)
        if name == "log":
            return div(du, u)
        if name == "sin":
            return mul(Func("cos", u), du)
        if name == "cos":
            return mul(neg(Func("sin", u)), du)
        if name == "sqrt":
            return div(du, mul(Const(2.0), e))
        if name == "arccos":
            return neg(div(du, Func("sqrt", Sub(ONE, Pow(u, 2)))))
    raise TypeError(f"cannot differentiate {e!r}")


def laplacian(e: Expr, j: int, dims: int = 1) -> Expr:
    """Sum over axes ``d < dims`` of the second derivative in ``x_j_d``."""
    out: Expr = ZERO
    for d in range(dims):
        out = add(out, differentiate(differentiate(e, j, d), j, d))
    return out


def substitute(e: Expr, mapping: Mapping[tuple[int, int], Expr]) -> Expr:
    """Replace variables by expressions, e.g. ``{(0, 0): rho_expr}``."""
    if isinstance(e, Var):
        return mapping.get((e.j, e.d), e)
    if isinstance(e, Const):
        return e
    if isinstance(e, Neg):
        return Neg(substitute(e.arg, mapping))
    if isinstance(e, (Add, Sub, Mul, Div)):
        return type(e)(substitute(e.left, mapping), substitute(e.right, mapping))
    if isinstance(e, Pow):
        return Pow(substitute(e.base, mapping), e.exponent)
    if isinstance(e, Func):
        return Func(e.name, substitute(e.arg, mapping))
    raise TypeError(f"not an expression node: {e!r}")
