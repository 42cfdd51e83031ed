"""Symbolic wavefunctions: parsing, derivatives, operation counts, coordinates."""

from .calculus import differentiate, laplacian, substitute
from .coords import (
    HyperAngles,
    SystemGeometry,
    from_hyperspherical,
    hyperangle_expr,
    hyperangles,
    hyperradius,
    hyperradius_count,
    hyperradius_expr,
)
from .counting import OperationCount, count_ops
from .expr import (
    FUNCTIONS,
    Add,
    Const,
    Div,
    Expr,
    ExprIndexError,
    Func,
    Mul,
    Neg,
    Pow,
    Sub,
    Var,
    evaluate,
    node_count,
    to_text,
)
from .parser import ExprSyntaxError, parse_expr
from .separable import SeparableCost, SeparableWavefunction, eval_separable

__all__ = [
    "FUNCTIONS", "Add", "Const", "Div", "Expr", "ExprIndexError", "ExprSyntaxError", "Func", "HyperAngles", "Mul", "Neg",
    "OperationCount", "Pow", "SeparableCost", "SeparableWavefunction", "Sub", "SystemGeometry", "Var",
    "count_ops", "differentiate", "eval_separable", "evaluate", "from_hyperspherical", "hyperangle_expr",
    "hyperangles", "hyperradius", "hyperradius_count", "hyperradius_expr", "laplacian", "node_count", "parse_expr", "substitute",
    "to_text",
]
