"""Semialgebraic strata: equality, nonvanishing and sign conditions.

A Stratum describes one piece of phase or velocity space; a StratifiedSet is
an ordered list of named strata.  Numeric membership uses the tolerance
TAU_EQ for equalities; sign conditions are strict.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .symexpr import RationalExpr, Symbol

TAU_EQ = 1e-9


@dataclass
class Stratum:
    name: str
    equalities: list[RationalExpr] = field(default_factory=list)
    nonvanishing: list[RationalExpr] = field(default_factory=list)
    signs: list[tuple[RationalExpr, int]] = field(default_factory=list)

    def contains(self, point: dict[Symbol, float], tol: float = TAU_EQ) -> bool:
        for e in self.equalities:
            if abs(e.eval_at(point)) > tol:
                return False
        for e in self.nonvanishing:
            if abs(e.eval_at(point)) <= tol:
                return False
        for e, s in self.signs:
            v = e.eval_at(point)
            if s > 0 and v <= 0:
                return False
            if s < 0 and v >= 0:
                return False
        return True

    def violation(self, point: dict[Symbol, float]) -> float:
        """Largest equality residual at the point (sign/nonvanishing ignored)."""
        return max((abs(e.eval_at(point)) for e in self.equalities), default=0.0)

    def nonvanishing_symbols(self) -> set[Symbol]:
        """Symbols certified nonzero: single-symbol nonvanishing or sign
        conditions, plus symbols of single-term nonvanishing monomials."""
        out: set[Symbol] = set()
        for e in self.nonvanishing + [c for c, _ in self.signs]:
            if e.is_polynomial() and e.num.is_monomial():
                out |= e.free_symbols()
        return out

    def certifies_nonzero(self, e: RationalExpr) -> bool:
        """True if e is nonvanishing everywhere on this stratum, for the
        supported shapes: nonzero constants and constant multiples of
        monomials in certified-nonzero symbols."""
        if e.is_zero():
            return False
        if e.is_constant():
            return True
        num, den = e.num, e.den
        if not (num.is_monomial() and den.is_monomial()):
            return False
        good = {s.index for s in self.nonvanishing_symbols()}
        for p in (num, den):
            for exps in p.terms:
                for i, k in enumerate(exps):
                    if k and i not in good:
                        return False
        return True

    def connected_pieces(self) -> list["Stratum"]:
        """Split along the sign ambiguity of nonvanishing conditions; declared
        sign conditions already pin a single component."""
        if not self.nonvanishing:
            return [replace_name(self, self.name)]
        pieces = []
        for combo in product((1, -1), repeat=len(self.nonvanishing)):
            tags = [
                f"{e}{'>' if s > 0 else '<'}0" for e, s in zip(self.nonvanishing, combo)
            ]
            pieces.append(
                Stratum(
                    name=f"{self.name}[{','.join(tags)}]",
                    equalities=list(self.equalities),
                    nonvanishing=[],
                    signs=list(self.signs) + list(zip(self.nonvanishing, combo)),
                )
            )
        return pieces

    def describe(self) -> str:
        bits = [f"{e} = 0" for e in self.equalities]
        bits += [f"{e} != 0" for e in self.nonvanishing]
        bits += [f"{e} {'>' if s > 0 else '<'} 0" for e, s in self.signs]
        return ", ".join(bits) if bits else "everywhere"


def replace_name(s: Stratum, name: str) -> Stratum:
    return Stratum(name, list(s.equalities), list(s.nonvanishing), list(s.signs))


@dataclass
class StratifiedSet:
    strata: list[Stratum]

    def __iter__(self):
        return iter(self.strata)

    def __len__(self):
        return len(self.strata)

    def by_name(self, name: str) -> Stratum:
        for s in self.strata:
            if s.name == name:
                return s
        raise KeyError(f"no stratum named {name!r}")
