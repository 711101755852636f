"""Symbol tables for the exact expression kernel.

Symbols are interned in a table that fixes a global ordering; the ordering
drives the graded-lexicographic term order used everywhere else.  Naming
convention: the velocity of coordinate ``q`` is ``q_dot``, its acceleration
``q_ddot`` and its momentum ``p_q``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

COORDINATE = "coordinate"
VELOCITY = "velocity"
ACCELERATION = "acceleration"
MOMENTUM = "momentum"
PARAMETER = "parameter"
ALGEBRAIC = "algebraic-parameter"

_KINDS = (COORDINATE, VELOCITY, ACCELERATION, MOMENTUM, PARAMETER, ALGEBRAIC)

_NAME_RE = None  # initialized lazily to avoid importing re at module load for nothing


def _valid_name(name: str) -> bool:
    global _NAME_RE
    if _NAME_RE is None:
        import re

        _NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
    return bool(_NAME_RE.match(name))


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: str
    index: int

    def __repr__(self):
        return f"Symbol({self.name!r})"


class SymbolTable:
    """Ordered collection of symbols, plus defining relations of algebraic
    parameters (monic univariate polynomials, e.g. r^2 = 2)."""

    def __init__(self):
        self._symbols: list[Symbol] = []
        self._by_name: dict[str, Symbol] = {}
        # alg-param index -> list c[0..d-1] with  s^d = sum_k c[k] * s^k
        self._relations: dict[int, list[Fraction]] = {}
        # cached reduced power vectors per alg param: index -> {n: coeffs}
        self._power_cache: dict[int, dict[int, list[Fraction]]] = {}

    def __len__(self):
        return len(self._symbols)

    def __iter__(self):
        return iter(self._symbols)

    def __contains__(self, name: str):
        return name in self._by_name

    def get(self, name: str) -> Symbol:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"unknown symbol {name!r}") from None

    def by_index(self, index: int) -> Symbol:
        return self._symbols[index]

    def symbols(self, kind: str | None = None) -> list[Symbol]:
        if kind is None:
            return list(self._symbols)
        return [s for s in self._symbols if s.kind == kind]

    def add(self, name: str, kind: str) -> Symbol:
        if kind not in _KINDS:
            raise ValueError(f"unknown symbol kind {kind!r}")
        if not _valid_name(name):
            raise ValueError(f"invalid symbol name {name!r}")
        if name in self._by_name:
            raise ValueError(f"duplicate symbol {name!r}")
        sym = Symbol(name, kind, len(self._symbols))
        self._symbols.append(sym)
        self._by_name[name] = sym
        return sym

    def add_coordinate(self, name: str, with_accel: bool = True) -> Symbol:
        """Add coordinate plus its derived velocity/acceleration/momentum
        symbols under the fixed naming convention."""
        q = self.add(name, COORDINATE)
        self.add(name + "_dot", VELOCITY)
        if with_accel:
            self.add(name + "_ddot", ACCELERATION)
        self.add("p_" + name, MOMENTUM)
        return q

    def velocity_of(self, q: Symbol) -> Symbol:
        return self.get(q.name + "_dot")

    def acceleration_of(self, q: Symbol) -> Symbol:
        return self.get(q.name + "_ddot")

    def momentum_of(self, q: Symbol) -> Symbol:
        return self.get("p_" + q.name)

    def add_algebraic(self, name: str, relation: list[Fraction]) -> Symbol:
        """Add an algebraic parameter with  name^d = sum_k relation[k]*name^k,
        d = len(relation) >= 1."""
        if not relation:
            raise ValueError("defining relation must have degree >= 1")
        sym = self.add(name, ALGEBRAIC)
        self._relations[sym.index] = [Fraction(c) for c in relation]
        self._power_cache[sym.index] = {}
        return sym

    def relation_degree(self, sym_index: int) -> int | None:
        rel = self._relations.get(sym_index)
        return None if rel is None else len(rel)

    def reduced_power(self, sym_index: int, n: int) -> list[Fraction]:
        """Coefficient vector (length d) of name^n in the basis 1..name^(d-1)."""
        rel = self._relations[sym_index]
        d = len(rel)
        cache = self._power_cache[sym_index]
        if n in cache:
            return cache[n]
        if n < d:
            vec = [Fraction(0)] * d
            vec[n] = Fraction(1)
        else:
            prev = self.reduced_power(sym_index, n - 1)
            # multiply by the generator: shift up, fold the top coefficient
            vec = [Fraction(0)] + prev[: d - 1]
            top = prev[d - 1]
            if top:
                vec = [v + top * c for v, c in zip(vec, rel)]
        cache[n] = vec
        return vec

    def algebraic_indices(self) -> list[int]:
        return sorted(self._relations)

    def real_root(self, sym: Symbol, hint: float | None = None) -> float:
        """A real root of the defining relation; the largest real root unless a
        hint selects a closer one."""
        rel = self._relations[sym.index]
        d = len(rel)
        # monic poly: x^d - rel[d-1] x^(d-1) - ... - rel[0]
        coeffs = [1.0] + [-float(rel[k]) for k in range(d - 1, -1, -1)]
        import numpy as np

        roots = np.roots(coeffs)
        real = sorted(float(r.real) for r in roots if abs(r.imag) < 1e-9)
        if not real:
            raise ValueError(f"defining relation of {sym.name} has no real root")
        if hint is not None:
            return min(real, key=lambda r: abs(r - hint))
        return real[-1]
