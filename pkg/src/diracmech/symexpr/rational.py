"""Exact rational expressions: quotients of multivariate polynomials.

Normalization divides out the common content and common monomial factor of
numerator and denominator and rescales so the denominator's leading
(graded-lex) coefficient is 1.  No multivariate gcd is attempted; equality is
decided by cross-multiplication and exact zero-testing of the difference.
"""

from __future__ import annotations

from fractions import Fraction

from .poly import Polynomial, _trim
from .symbols import ALGEBRAIC, Symbol, SymbolTable


class ExprError(ValueError):
    """Invalid expression-level operation (zero denominator, bad input)."""


class SingularPointError(ExprError):
    """Numeric evaluation hit a (near-)zero denominator."""


class RationalExpr:
    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial | None = None, _normalized=False):
        if den is None:
            den = Polynomial.constant(num.table, 1)
        if den.is_zero():
            raise ExprError("zero denominator")
        if not _normalized:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den

    # -- constructors -------------------------------------------------

    @classmethod
    def constant(cls, table: SymbolTable, value) -> "RationalExpr":
        return cls(Polynomial.constant(table, Fraction(value)))

    @classmethod
    def symbol(cls, table: SymbolTable, sym: Symbol, power: int = 1) -> "RationalExpr":
        if power >= 0:
            return cls(Polynomial.symbol(table, sym, power))
        return cls(Polynomial.constant(table, 1), Polynomial.symbol(table, sym, -power))

    @property
    def table(self) -> SymbolTable:
        return self.num.table

    # -- queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        return self.num.constant_value() / self.den.constant_value()

    def free_symbols(self) -> set[Symbol]:
        idx = self.num.free_symbol_indices() | self.den.free_symbol_indices()
        return {self.table.by_index(i) for i in idx}

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def __eq__(self, other):
        if not isinstance(other, RationalExpr):
            return NotImplemented
        return (self.num * other.den - other.num * self.den).is_zero()

    def __hash__(self):
        # weak hash: expressions equal as fractions may normalize differently
        # only when built through substitution corner cases; canonical forms
        # produced by arithmetic hash consistently.
        return hash((self.num, self.den))

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other: "RationalExpr") -> "RationalExpr":
        if self.den.terms == other.den.terms:
            return RationalExpr(self.num + other.num, self.den)
        return RationalExpr(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other: "RationalExpr") -> "RationalExpr":
        return self + (-other)

    def __neg__(self) -> "RationalExpr":
        return RationalExpr(-self.num, self.den, _normalized=True)

    def __mul__(self, other: "RationalExpr") -> "RationalExpr":
        return RationalExpr(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RationalExpr") -> "RationalExpr":
        if other.is_zero():
            raise ExprError("division by zero expression")
        return RationalExpr(self.num * other.den, self.den * other.num)

    def scale(self, value) -> "RationalExpr":
        return RationalExpr(self.num.scale(Fraction(value)), self.den)

    def __pow__(self, n: int) -> "RationalExpr":
        if n >= 0:
            return RationalExpr(self.num**n, self.den**n)
        if self.is_zero():
            raise ExprError("zero expression raised to negative power")
        return RationalExpr(self.den ** (-n), self.num ** (-n))

    # -- calculus -----------------------------------------------------

    def differentiate(self, sym: Symbol) -> "RationalExpr":
        if sym.kind == ALGEBRAIC:
            raise ExprError(f"cannot differentiate with respect to algebraic parameter {sym.name}")
        dn = self.num.derivative(sym)
        if self.den.is_constant():
            return RationalExpr(dn, self.den)
        dd = self.den.derivative(sym)
        return RationalExpr(dn * self.den - self.num * dd, self.den * self.den)

    # -- substitution -------------------------------------------------

    def substitute(self, bindings: dict[Symbol, "RationalExpr"]) -> "RationalExpr":
        """Simultaneous substitution followed by canonicalization."""
        if not bindings:
            return self
        idx_map = {s.index: e for s, e in bindings.items()}
        num = _subst_poly(self.num, idx_map)
        den = _subst_poly(self.den, idx_map)
        if den.is_zero():
            raise ExprError(f"substitution maps denominator {poly_str(self.den)} to zero")
        return num / den

    # -- evaluation ---------------------------------------------------

    def eval_at(self, point: dict[Symbol, float]) -> float:
        values = {}
        needed = self.num.free_symbol_indices() | self.den.free_symbol_indices()
        for s, v in point.items():
            values[s.index] = float(v)
        missing = [self.table.by_index(i).name for i in sorted(needed) if i not in values]
        if missing:
            raise ExprError(f"unbound symbols in evaluation: {', '.join(missing)}")
        den = self.den.eval_float(values)
        if abs(den) < 1e-300:
            raise SingularPointError(f"denominator {poly_str(self.den)} vanishes at evaluation point")
        return self.num.eval_float(values) / den

    # -- printing -----------------------------------------------------

    def __str__(self):
        n = poly_str(self.num)
        if self.den.is_constant() and self.den.constant_value() == 1:
            return n
        return f"({n})/({poly_str(self.den)})"

    def __repr__(self):
        return f"RationalExpr({self})"


def _normalize(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    if num.is_zero():
        return num, Polynomial.constant(num.table, 1)
    # common monomial factor
    gn, gd = num.monomial_gcd(), den.monomial_gcd()
    size = max(len(gn), len(gd))
    common = _trim(tuple(min(gn[i] if len(gn) > i else 0, gd[i] if len(gd) > i else 0) for i in range(size)))
    if common:
        num = num.divide_monomial(common)
        den = den.divide_monomial(common)
    # content of numerator (kept integral-ish), monic denominator
    lc = den.leading_coefficient()
    if lc != 1:
        inv = 1 / lc
        num = num.scale(inv)
        den = den.scale(inv)
    return num, den


def _subst_poly(p: Polynomial, idx_map) -> RationalExpr:
    table = p.table
    out = RationalExpr.constant(table, 0)
    pow_cache: dict[tuple[int, int], RationalExpr] = {}

    def power(i: int, e: int) -> RationalExpr:
        key = (i, e)
        if key not in pow_cache:
            if i in idx_map:
                pow_cache[key] = idx_map[i] ** e
            else:
                pow_cache[key] = RationalExpr.symbol(table, table.by_index(i), e)
        return pow_cache[key]

    for exps, c in p.terms.items():
        term = RationalExpr.constant(table, c)
        for i, e in enumerate(exps):
            if e:
                term = term * power(i, e)
        out = out + term
    return out


def _frac_str(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def poly_str(p: Polynomial) -> str:
    """Canonical polynomial printing: graded-lex descending term order."""
    if p.is_zero():
        return "0"
    parts = []
    for exps, c in p.sorted_terms():
        factors = []
        for i, e in enumerate(exps):
            if not e:
                continue
            name = p.table.by_index(i).name
            factors.append(name if e == 1 else f"{name}^{e}")
        mono = "*".join(factors)
        coeff = abs(c)
        if not mono:
            body = _frac_str(coeff)
        elif coeff == 1:
            body = mono
        else:
            body = f"{_frac_str(coeff)}*{mono}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts)
