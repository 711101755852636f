"""Recursive-descent parser for the expression grammar.

Grammar: rational literals (integers, fractions via ``/``, decimal literals
parsed exactly), declared identifiers, ``+ - * / ^`` and parentheses.
Exponents are integers; a negative exponent is only allowed on a single
symbol.  Parsing, printing and re-parsing is a fixed point on canonical
forms.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .rational import ExprError, RationalExpr
from .symbols import SymbolTable

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>\d+\.\d*|\.\d+|\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)


class ParseError(ExprError):
    pass


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:].strip()
            if not rest:
                break
            raise ParseError(f"unexpected character {rest[0]!r} at position {pos}")
        if m.group("number"):
            tokens.append(("number", m.group("number")))
        elif m.group("name"):
            tokens.append(("name", m.group("name")))
        else:
            tokens.append(("op", m.group("op")))
        pos = m.end()
    tokens.append(("end", ""))
    return tokens


class _Parser:
    def __init__(self, tokens, table: SymbolTable):
        self.tokens = tokens
        self.pos = 0
        self.table = table

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op):
        kind, val = self.next()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}, found {val!r}")

    def parse(self) -> RationalExpr:
        expr = self.expression()
        kind, val = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected trailing token {val!r}")
        return expr

    def expression(self) -> RationalExpr:
        kind, val = self.peek()
        negate = False
        if kind == "op" and val in "+-":
            self.next()
            negate = val == "-"
        expr = self.term()
        if negate:
            expr = -expr
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                rhs = self.term()
                expr = expr + rhs if val == "+" else expr - rhs
            else:
                return expr

    def term(self) -> RationalExpr:
        expr = self.factor()
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "*/":
                self.next()
                rhs = self.factor()
                if val == "*":
                    expr = expr * rhs
                else:
                    if rhs.is_zero():
                        raise ParseError("division by zero expression")
                    expr = expr / rhs
            else:
                return expr

    def factor(self) -> RationalExpr:
        kind, val = self.peek()
        if kind == "op" and val == "-":
            self.next()
            return -self.factor()
        base, atomic_symbol = self.atom()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.next()
            exponent = self.exponent()
            if exponent < 0 and not atomic_symbol:
                raise ParseError("negative exponents are only allowed on single symbols")
            return base**exponent
        return base

    def exponent(self) -> int:
        kind, val = self.next()
        sign = 1
        if kind == "op" and val in "+-":
            sign = -1 if val == "-" else 1
            kind, val = self.next()
        if kind != "number" or "." in val:
            raise ParseError(f"expected integer exponent, found {val!r}")
        return sign * int(val)

    def atom(self) -> tuple[RationalExpr, bool]:
        kind, val = self.next()
        if kind == "number":
            if "." in val:
                whole, frac = val.split(".")
                num = int(whole or 0) * 10 ** len(frac) + int(frac or 0)
                value = Fraction(num, 10 ** len(frac))
            else:
                value = Fraction(int(val))
            return RationalExpr.constant(self.table, value), False
        if kind == "name":
            if val not in self.table:
                raise ParseError(f"unknown identifier {val!r}")
            return RationalExpr.symbol(self.table, self.table.get(val)), True
        if kind == "op" and val == "(":
            expr = self.expression()
            self.expect_op(")")
            return expr, False
        raise ParseError(f"unexpected token {val!r}")


def parse_expr(text: str, table: SymbolTable) -> RationalExpr:
    return _Parser(_tokenize(text), table).parse()
