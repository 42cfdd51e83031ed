"""Operation counts for evaluating an expression tree.

An operation is *counted* when it combines variable-dependent values in a
way that is not a scalar rescaling: a product or quotient whose variable
operand is not merely multiplied by a constant, an integer power of a
variable-dependent base, or an elementary function of a variable-dependent
argument. Additions, subtractions, negations and multiplications or
divisions by a constant are *free*. Operations whose operands are all
constant fold to a constant and are free too.
"""

from __future__ import annotations

from dataclasses import dataclass

from .expr import Add, Const, Div, Expr, Func, Mul, Neg, Pow, Sub, Var


@dataclass(frozen=True)
class OperationCount:
    counted: int = 0
    free: int = 0

    def __post_init__(self):
        if self.counted < 0 or self.free < 0:
            raise ValueError("operation counts are non-negative")

    def __add__(self, other: "OperationCount") -> "OperationCount":
        return OperationCount(self.counted + other.counted, self.free + other.free)

    def scaled(self, k: int) -> "OperationCount":
        return OperationCount(self.counted * k, self.free * k)

    @property
    def total(self) -> int:
        return self.counted + self.free

    def to_dict(self) -> dict:
        return {"counted": self.counted, "free": self.free}


def count_ops(e: Expr) -> OperationCount:
    counted, free, _ = _count(e)
    return OperationCount(counted, free)


def _count(e: Expr) -> tuple[int, int, bool]:
    """(counted, free, depends_on_variables) for the subtree at ``e``."""
    if isinstance(e, Const):
        return 0, 0, False
    if isinstance(e, Var):
        return 0, 0, True
    if isinstance(e, (Neg, Pow, Func)):
        c, f, dep = _count(e.children()[0])
        if isinstance(e, Neg) or not dep:
            return c, f + 1, dep
        return c + 1, f, dep
    if isinstance(e, (Add, Sub, Mul, Div)):
        lc, lf, ldep = _count(e.left)
        rc, rf, rdep = _count(e.right)
        c, f, dep = lc + rc, lf + rf, ldep or rdep
        if isinstance(e, (Add, Sub)):
            scalar = True
        elif isinstance(e, Mul):
            scalar = not (ldep and rdep)
        else:
            # u / c rescales; c / v and u / v are true divisions.
            scalar = not rdep
        return (c, f + 1, dep) if scalar else (c + 1, f, dep)
    raise TypeError(f"not an expression node: {e!r}")
