"""Exact computer-algebra kernel: rational expressions over the rationals,
optionally extended by algebraic parameters with monic defining relations."""

from .parser import ParseError, parse_expr
from .poly import Polynomial
from .rational import ExprError, RationalExpr, SingularPointError
from .symbols import (
    ACCELERATION,
    ALGEBRAIC,
    COORDINATE,
    MOMENTUM,
    PARAMETER,
    VELOCITY,
    Symbol,
    SymbolTable,
)

__all__ = [
    "ACCELERATION",
    "ALGEBRAIC",
    "COORDINATE",
    "MOMENTUM",
    "PARAMETER",
    "VELOCITY",
    "ExprError",
    "ParseError",
    "parse_expr",
    "Polynomial",
    "RationalExpr",
    "SingularPointError",
    "Symbol",
    "SymbolTable",
]
