"""Exact multivariate polynomials over the rationals.

Terms map trimmed exponent tuples (indexed by symbol table order, trailing
zeros removed) to nonzero Fraction coefficients.  The zero polynomial has an
empty term map, so exact zero-testing is a structural check.  Powers of
algebraic parameters are reduced modulo their defining relations on every
multiplication.
"""

from __future__ import annotations

from fractions import Fraction

from .symbols import Symbol, SymbolTable


def _trim(exps: tuple[int, ...]) -> tuple[int, ...]:
    n = len(exps)
    while n and exps[n - 1] == 0:
        n -= 1
    return exps[:n]


def _add_exps(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, e in enumerate(b):
        out[i] += e
    return tuple(out)


class Polynomial:
    __slots__ = ("table", "terms")

    def __init__(self, table: SymbolTable, terms: dict[tuple[int, ...], Fraction] | None = None):
        self.table = table
        self.terms = terms if terms is not None else {}

    # -- constructors -------------------------------------------------

    @classmethod
    def constant(cls, table: SymbolTable, value) -> "Polynomial":
        c = Fraction(value)
        return cls(table, {(): c} if c else {})

    @classmethod
    def symbol(cls, table: SymbolTable, sym: Symbol, power: int = 1) -> "Polynomial":
        if power < 0:
            raise ValueError("negative power in polynomial")
        if power == 0:
            return cls.constant(table, 1)
        exps = tuple([0] * sym.index + [power])
        p = cls(table, {exps: Fraction(1)})
        return p._reduced()

    # -- basic queries ------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not e for e in self.terms)

    def constant_value(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms[()]

    def free_symbol_indices(self) -> set[int]:
        out: set[int] = set()
        for exps in self.terms:
            for i, e in enumerate(exps):
                if e:
                    out.add(i)
        return out

    def degree_in(self, sym: Symbol) -> int:
        i = sym.index
        d = 0
        for exps in self.terms:
            if len(exps) > i and exps[i] > d:
                d = exps[i]
        return d

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- term order ---------------------------------------------------

    def _order_key(self, exps: tuple[int, ...]):
        # graded lex, descending: larger total degree first, then larger
        # exponent on the earliest symbol.
        pad = exps + (0,) * (len(self.table) - len(exps))
        return (-sum(exps), tuple(-e for e in pad))

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: self._order_key(kv[0]))

    def leading_coefficient(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        return self.sorted_terms()[0][1]

    # -- arithmetic ---------------------------------------------------

    def _reduced(self) -> "Polynomial":
        """Reduce algebraic-parameter powers modulo defining relations."""
        alg = self.table.algebraic_indices()
        if not alg:
            return self
        terms = self.terms
        for i in alg:
            d = self.table.relation_degree(i)
            if not any(len(e) > i and e[i] >= d for e in terms):
                continue
            new: dict[tuple[int, ...], Fraction] = {}
            for exps, coeff in terms.items():
                n = exps[i] if len(exps) > i else 0
                if n < d:
                    new[exps] = new.get(exps, Fraction(0)) + coeff
                    continue
                vec = self.table.reduced_power(i, n)
                base = list(exps)
                for k, ck in enumerate(vec):
                    if not ck:
                        continue
                    base[i] = k
                    key = _trim(tuple(base))
                    new[key] = new.get(key, Fraction(0)) + coeff * ck
            terms = {e: c for e, c in new.items() if c}
        return Polynomial(self.table, terms)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        out = dict(self.terms)
        for exps, c in other.terms.items():
            s = out.get(exps, Fraction(0)) + c
            if s:
                out[exps] = s
            else:
                out.pop(exps, None)
        return Polynomial(self.table, out)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.table, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        out: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                key = _add_exps(e1, e2)
                s = out.get(key, Fraction(0)) + c1 * c2
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return Polynomial(self.table, out)._reduced()

    def scale(self, value: Fraction) -> "Polynomial":
        c = Fraction(value)
        if not c:
            return Polynomial(self.table, {})
        return Polynomial(self.table, {e: k * c for e, k in self.terms.items()})

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative polynomial power")
        result = Polynomial.constant(self.table, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- calculus -----------------------------------------------------

    def derivative(self, sym: Symbol) -> "Polynomial":
        i = sym.index
        out: dict[tuple[int, ...], Fraction] = {}
        for exps, c in self.terms.items():
            e = exps[i] if len(exps) > i else 0
            if not e:
                continue
            base = list(exps)
            base[i] = e - 1
            key = _trim(tuple(base))
            s = out.get(key, Fraction(0)) + c * e
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return Polynomial(self.table, out)

    # -- normalization helpers ---------------------------------------

    def content(self) -> Fraction:
        """Positive rational content (gcd of coefficients); 0 for the zero
        polynomial."""
        from math import gcd

        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, abs(c.numerator))
            den = den * c.denominator // gcd(den, c.denominator)
        if num == 0:
            return Fraction(0)
        return Fraction(num, den)

    def monomial_gcd(self) -> tuple[int, ...]:
        """Componentwise minimum exponent vector over all terms."""
        if not self.terms:
            return ()
        it = iter(self.terms)
        first = next(it)
        size = max((len(e) for e in self.terms), default=0)
        mins = list(first) + [0] * (size - len(first))
        for exps in it:
            for i in range(size):
                e = exps[i] if len(exps) > i else 0
                if e < mins[i]:
                    mins[i] = e
        return _trim(tuple(mins))

    def divide_monomial(self, mono: tuple[int, ...]) -> "Polynomial":
        if not mono:
            return self
        out = {}
        for exps, c in self.terms.items():
            base = list(exps) + [0] * (len(mono) - len(exps))
            for i, m in enumerate(mono):
                base[i] -= m
                if base[i] < 0:
                    raise ValueError("monomial does not divide polynomial")
            out[_trim(tuple(base))] = c
        return Polynomial(self.table, out)

    # -- evaluation ---------------------------------------------------

    def eval_float(self, values: dict[int, float]) -> float:
        total = 0.0
        for exps, c in self.terms.items():
            term = float(c)
            for i, e in enumerate(exps):
                if e:
                    term *= values[i] ** e
            total += term
        return total
