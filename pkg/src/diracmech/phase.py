"""Canonical phase-space structure on T*Q.

Bracket convention:  {f,g} = sum_i df/dq^i dg/dp_i - df/dp_i dg/dq^i,
anchored so that {p_y, p_x + y*p_z} = -p_z.  The Hamiltonian vector field of
f has components (dq^i/dt, dp_i/dt) = (df/dp_i, -df/dq^i), so that
X_f(g) = {g, f}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .strata import Stratum
from .symexpr import MOMENTUM, ExprError, RationalExpr, Symbol, SymbolTable


@dataclass
class PhaseSpace:
    table: SymbolTable
    coordinates: list[Symbol]
    momenta: list[Symbol]

    @classmethod
    def for_coordinates(cls, table: SymbolTable, coordinates: list[Symbol]) -> "PhaseSpace":
        return cls(table, list(coordinates), [table.momentum_of(q) for q in coordinates])

    @property
    def dim(self) -> int:
        return 2 * len(self.coordinates)

    def symbols(self) -> list[Symbol]:
        return self.coordinates + self.momenta

    def zero(self) -> RationalExpr:
        return RationalExpr.constant(self.table, 0)


def poisson_bracket(f: RationalExpr, g: RationalExpr, ps: PhaseSpace) -> RationalExpr:
    out = ps.zero()
    for q, p in zip(ps.coordinates, ps.momenta):
        out = out + f.differentiate(q) * g.differentiate(p)
        out = out - f.differentiate(p) * g.differentiate(q)
    return out


@dataclass
class VectorField:
    """Vector field on phase space (or on Q): symbol -> component expression.
    Missing components are zero."""

    components: dict[Symbol, RationalExpr]

    def component(self, sym: Symbol, table: SymbolTable) -> RationalExpr:
        return self.components.get(sym, RationalExpr.constant(table, 0))

    def apply(self, g: RationalExpr) -> RationalExpr:
        """Directional derivative X(g)."""
        out = None
        for sym, comp in self.components.items():
            piece = g.differentiate(sym) * comp
            out = piece if out is None else out + piece
        if out is None:
            raise ValueError("empty vector field")
        return out

    def nonzero_components(self) -> dict[Symbol, RationalExpr]:
        return {s: c for s, c in self.components.items() if not c.is_zero()}


def hamiltonian_vector_field(f: RationalExpr, ps: PhaseSpace) -> VectorField:
    comps = {}
    for q, p in zip(ps.coordinates, ps.momenta):
        comps[q] = f.differentiate(p)
        comps[p] = -f.differentiate(q)
    return VectorField(comps)


def commutator(a: VectorField, b: VectorField, ps: PhaseSpace) -> VectorField:
    """[a, b] computed componentwise: [a,b]^i = a(b^i) - b(a^i)."""
    comps = {}
    for s in ps.symbols():
        comps[s] = a.apply(b.component(s, ps.table)) - b.apply(a.component(s, ps.table))
    return VectorField(comps)


class GraphError(ExprError):
    pass


@dataclass
class SubstitutionGraph:
    """Ordered solved form of a set of constraint equalities: each binding
    (symbol, replacement) is applied in declaration order.  reduce(e) is the
    canonical representative of e on the constraint set."""

    bindings: list[tuple[Symbol, RationalExpr]]
    stratum: Stratum | None = None

    def solved_symbols(self) -> list[Symbol]:
        return [s for s, _ in self.bindings]

    def reduce(self, e: RationalExpr) -> RationalExpr:
        for sym, repl in self.bindings:
            e = e.substitute({sym: repl})
        return e

    def reduces_to_zero(self, e: RationalExpr) -> bool:
        return self.reduce(e).is_zero()

    def numeric_bindings(self, point: dict[Symbol, float]) -> dict[Symbol, float]:
        """Extend a numeric assignment of the free symbols by the solved ones
        (applied in reverse declaration order so later bindings feed earlier
        replacements)."""
        values = dict(point)
        for sym, repl in reversed(self.bindings):
            values[sym] = repl.eval_at(values)
        return values


def solve_graph(
    equalities: list[RationalExpr],
    ps: PhaseSpace,
    stratum: Stratum | None = None,
    name: str = "",
) -> SubstitutionGraph:
    """Solve each equality for one distinguished symbol (momenta preferred,
    then coordinates, in phase-space order), yielding a momenta-first graph.

    Each equality must be linear in the chosen symbol with a coefficient
    that is nonvanishing on the stratum.
    """
    candidates = list(ps.momenta) + list(ps.coordinates)
    bindings: list[tuple[Symbol, RationalExpr]] = []
    solved: set[Symbol] = set()
    check = stratum if stratum is not None else Stratum("everywhere")
    for e in equalities:
        # reduce by what is already solved so replacements never reference
        # previously solved symbols
        e = SubstitutionGraph(bindings).reduce(e)
        if e.is_zero():
            continue
        found = None
        for sym in candidates:
            if sym in solved:
                continue
            if e.num.degree_in(sym) != 1 or e.den.degree_in(sym) != 0:
                continue
            coeff = e.differentiate(sym)
            if sym in coeff.free_symbols():
                continue
            if not (coeff.is_constant() or check.certifies_nonzero(coeff)):
                continue
            found = (sym, coeff)
            break
        if found is None:
            raise GraphError(f"equality {e} is not graph-solvable on stratum {check.name or check.describe()}")
        sym, coeff = found
        repl = sym_expr(ps.table, sym) - e / coeff
        bindings.append((sym, repl))
        solved.add(sym)
    # fully back-substitute so no replacement mentions a solved symbol,
    # then order momenta before coordinates (declaration order otherwise)
    for _ in range(len(bindings)):
        changed = False
        for i, (sym, repl) in enumerate(bindings):
            others = SubstitutionGraph(bindings[:i] + bindings[i + 1 :])
            new = others.reduce(repl)
            if not (new - repl).is_zero():
                bindings[i] = (sym, new)
                changed = True
        if not changed:
            break
    bindings.sort(key=lambda b: 0 if b[0].kind == MOMENTUM else 1)
    graph = SubstitutionGraph(bindings, stratum)
    for e in equalities:
        if not graph.reduces_to_zero(e):
            raise GraphError(f"graph does not annihilate generator {e}")
    return graph


def sym_expr(table: SymbolTable, sym: Symbol) -> RationalExpr:
    return RationalExpr.symbol(table, sym)


def weak_reduce(e: RationalExpr, graph: SubstitutionGraph) -> RationalExpr:
    """Canonical representative of e restricted to the constraint set defined
    by the graph."""
    return graph.reduce(e)
