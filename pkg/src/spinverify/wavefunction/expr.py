"""Expression trees for many-body wavefunctions.

Variables are Cartesian components ``x[j][d]`` (particle ``j``, axis ``d``).
Nodes are immutable, hashable dataclasses; structural equality is ``==``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from ..errors import ValidationError

FUNCTIONS = ("exp", "log", "sin", "cos", "sqrt", "arccos")

_NUMPY_FUNCS = {
    "exp": np.exp,
    "log": np.log,
    "sin": np.sin,
    "cos": np.cos,
    "sqrt": np.sqrt,
    "arccos": np.arccos,
}


class ExprIndexError(ValidationError, IndexError):
    """A variable refers to a particle or component outside the declared (N, D)."""


class Expr:
    __slots__ = ()

    def children(self) -> tuple["Expr", ...]:
        return ()

    # operator sugar for building trees in code
    def __add__(self, other):
        return Add(self, as_expr(other))

    def __radd__(self, other):
        return Add(as_expr(other), self)

    def __sub__(self, other):
        return Sub(self, as_expr(other))

    def __rsub__(self, other):
        return Sub(as_expr(other), self)

    def __mul__(self, other):
        return Mul(self, as_expr(other))

    def __rmul__(self, other):
        return Mul(as_expr(other), self)

    def __truediv__(self, other):
        return Div(self, as_expr(other))

    def __rtruediv__(self, other):
        return Div(as_expr(other), self)

    def __pow__(self, k: int):
        return Pow(self, k)

    def __neg__(self):
        return Neg(self)

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True, eq=True)
class Const(Expr):
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        if not math.isfinite(self.value):
            raise ValueError("constants must be finite")


@dataclass(frozen=True)
class Var(Expr):
    j: int
    d: int = 0


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class _Binary(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)


class Add(_Binary):
    symbol = "+"


class Sub(_Binary):
    symbol = "-"


class Mul(_Binary):
    symbol = "*"


class Div(_Binary):
    symbol = "/"


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int

    def __post_init__(self):
        if int(self.exponent) != self.exponent:
            raise ValueError(f"exponent must be an integer, got {self.exponent!r}")
        object.__setattr__(self, "exponent", int(self.exponent))

    def children(self):
        return (self.base,)


@dataclass(frozen=True)
class Func(Expr):
    name: str
    arg: Expr

    def __post_init__(self):
        if self.name not in FUNCTIONS:
            raise ValueError(f"unknown function {self.name!r}")

    def children(self):
        return (self.arg,)


def as_expr(value) -> Expr:
    return value if isinstance(value, Expr) else Const(value)


ZERO = Const(0.0)
ONE = Const(1.0)


def is_zero(e: Expr) -> bool:
    return isinstance(e, Const) and e.value == 0.0


def walk(e: Expr) -> Iterator[Expr]:
    """Pre-order traversal."""
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children()))


def node_count(e: Expr) -> int:
    return sum(1 for _ in walk(e))


def variables(e: Expr) -> set[tuple[int, int]]:
    return {(n.j, n.d) for n in walk(e) if isinstance(n, Var)}


def depends_on_variables(e: Expr) -> bool:
    return any(isinstance(n, Var) for n in walk(e))


def check_bounds(e: Expr, n: int, d: int) -> None:
    for j, k in variables(e):
        if not (0 <= j < n):
            raise ExprIndexError(f"variable x_{j}_{k}: particle index {j} out of range for N={n}")
        if not (0 <= k < d):
            raise ExprIndexError(f"variable x_{j}_{k}: component index {k} out of range for D={d}")


def _fmt_const(v: float) -> str:
    text = repr(v)
    return f"({text})" if v < 0 or text.startswith("-") else text


def to_text(e: Expr) -> str:
    """Canonical, fully parenthesized form; ``parse_expr`` reads it back to an equal tree."""
    if isinstance(e, Const):
        return _fmt_const(e.value)
    if isinstance(e, Var):
        return f"x_{e.j}_{e.d}"
    if isinstance(e, Neg):
        inner = to_text(e.arg)
        # keep "-(c)" distinct from the negative literal "-c"
        if isinstance(e.arg, Const) and not inner.startswith("("):
            inner = f"({inner})"
        return f"(-{inner})"
    if isinstance(e, _Binary):
        return f"({to_text(e.left)} {e.symbol} {to_text(e.right)})"
    if isinstance(e, Pow):
        k = e.exponent
        exp_text = str(k) if k >= 0 else f"({k})"
        return f"({to_text(e.base)} ^ {exp_text})"
    if isinstance(e, Func):
        return f"{e.name}({to_text(e.arg)})"
    raise TypeError(f"not an expression node: {e!r}")


def evaluate(e: Expr, x) -> np.ndarray | float:
    """Evaluate at positions ``x`` of shape ``(..., N, D)``.

    Leading axes broadcast, so a batch of samples is evaluated in one call.
    Out-of-domain points (log of a negative, 0/0, ...) yield nan or inf
    rather than raising.
    """
    x = np.asarray(x, dtype=float)
    with np.errstate(all="ignore"):
        return _eval(e, x)


def _eval(e: Expr, x: np.ndarray):
    if isinstance(e, Const):
        return np.full(x.shape[:-2], e.value)
    if isinstance(e, Var):
        return x[..., e.j, e.d]
    if isinstance(e, Neg):
        return -_eval(e.arg, x)
    if isinstance(e, Add):
        return _eval(e.left, x) + _eval(e.right, x)
    if isinstance(e, Sub):
        return _eval(e.left, x) - _eval(e.right, x)
    if isinstance(e, Mul):
        return _eval(e.left, x) * _eval(e.right, x)
    if isinstance(e, Div):
        return _eval(e.left, x) / _eval(e.right, x)
    if isinstance(e, Pow):
        return np.power(_eval(e.base, x), float(e.exponent))
    if isinstance(e, Func):
        return _NUMPY_FUNCS[e.name](_eval(e.arg, x))
    raise TypeError(f"not an expression node: {e!r}")


def evaluate_scalar(e: Expr, value: float) -> float:
    """Evaluate a one-variable expression (variable ``x_0_0``) at a number."""
    return float(evaluate(e, np.array([[value]])))
