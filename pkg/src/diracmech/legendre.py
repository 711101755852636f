"""Degenerate Legendre analysis: momenta, velocity Hessian, rank
stratification, primary constraints, energy and its per-stratum Hamiltonian
pushforward, and the pullback two-form.

Only velocity-quadratic Lagrangians are analyzed structurally; the null
spaces involved are then linear-algebraic over the coordinate ring.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product

from . import linalg
from .phase import PhaseSpace, SubstitutionGraph, VectorField, solve_graph
from .strata import Stratum, StratifiedSet
from .symexpr import RationalExpr, Symbol, SymbolTable


class LegendreError(ValueError):
    pass


@dataclass
class ModelSpec:
    """A complete problem instance."""

    name: str
    table: SymbolTable
    coordinates: list[Symbol]
    lagrangian: RationalExpr
    symmetries: dict[str, VectorField] = field(default_factory=dict)
    phase_strata: StratifiedSet | None = None  # declared strata of the constraint set
    reduction_chart: "dict | None" = None  # filled by the model loader
    initial_data: list[RationalExpr] = field(default_factory=list)
    known: dict = field(default_factory=dict)
    discrepancies: list[dict] = field(default_factory=list)
    algebraic_roots: dict[str, float] = field(default_factory=dict)

    @property
    def velocities(self) -> list[Symbol]:
        return [self.table.velocity_of(q) for q in self.coordinates]

    @property
    def accelerations(self) -> list[Symbol]:
        return [self.table.acceleration_of(q) for q in self.coordinates]

    @property
    def momenta(self) -> list[Symbol]:
        return [self.table.momentum_of(q) for q in self.coordinates]

    def phase_space(self) -> PhaseSpace:
        return PhaseSpace.for_coordinates(self.table, self.coordinates)

    def parameter_values(self) -> dict[Symbol, float]:
        """Numeric values for algebraic parameters (real roots of their
        defining relations, largest root unless a hint was declared)."""
        out = {}
        for sym in self.table.symbols("algebraic-parameter"):
            out[sym] = self.table.real_root(sym, self.algebraic_roots.get(sym.name))
        return out


@dataclass
class ConstraintSystem:
    stratum: Stratum
    generators: list[RationalExpr]
    graph: SubstitutionGraph
    rank: int
    classes: "list | None" = None  # filled by the dirac module


def _check_quadratic(m: ModelSpec) -> None:
    l = m.lagrangian
    if not l.is_polynomial():
        raise LegendreError("lagrangian must be polynomial for structural analysis")
    vel_idx = {v.index for v in m.velocities}
    deg = 0
    for exps in l.num.terms:
        d = sum(e for i, e in enumerate(exps) if i in vel_idx)
        if d > 2:
            raise LegendreError("lagrangian has velocity degree > 2")
        deg = max(deg, d)
    if deg != 2:
        raise LegendreError("lagrangian is not of degree exactly 2 in velocities")


def velocity_hessian(m: ModelSpec) -> linalg.Matrix:
    _check_quadratic(m)
    vels = m.velocities
    return [[m.lagrangian.differentiate(vi).differentiate(vj) for vj in vels] for vi in vels]


def legendre_map(m: ModelSpec) -> list[RationalExpr]:
    return [m.lagrangian.differentiate(v) for v in m.velocities]


def energy(m: ModelSpec) -> RationalExpr:
    e = -m.lagrangian
    for p_expr, v in zip(legendre_map(m), m.velocities):
        e = e + p_expr * RationalExpr.symbol(m.table, v)
    return e


@dataclass
class RankStratum:
    stratum: Stratum
    rank: int
    hessian: linalg.Matrix  # Hessian with the stratum equalities substituted


def _minors(mat: linalg.Matrix, k: int) -> list[RationalExpr]:
    n = len(mat)
    out = []
    for rows in combinations(range(n), k):
        for cols in combinations(range(n), k):
            sub = [[mat[i][j] for j in cols] for i in rows]
            out.append(linalg.determinant(sub))
    return out


def _substitute_matrix(mat, bindings):
    return [[e.substitute(bindings) for e in row] for row in mat]


def _stratum_rank(mat: linalg.Matrix, stratum: Stratum) -> int:
    n = len(mat)
    rank = 0
    for k in range(1, n + 1):
        if any(stratum.certifies_nonzero(d) for d in _minors(mat, k)):
            rank = k
    return rank


def rank_strata(M: linalg.Matrix, m: ModelSpec) -> list[RankStratum]:
    """Auto-stratify configuration space by the Hessian rank.

    Supported when every nonzero minor is a rational constant times a
    monomial in the coordinates; otherwise the caller must declare strata.
    """
    n = len(M)
    table = m.table
    all_minors = [d for k in range(1, n + 1) for d in _minors(M, k)]
    nonzero = [d for d in all_minors if not d.is_zero()]
    r_max = 0
    for k in range(1, n + 1):
        if any(not d.is_zero() for d in _minors(M, k)):
            r_max = k
    if r_max == 0:
        return [RankStratum(Stratum("all"), 0, M)]
    if any(d.is_constant() for d in _minors(M, r_max)):
        return [RankStratum(Stratum("all"), r_max, M)]
    variables: set[Symbol] = set()
    for d in nonzero:
        if not (d.is_polynomial() and d.num.is_monomial()):
            raise LegendreError(
                f"auto-stratification unsupported: minor {d} is not a constant multiple "
                "of a monomial; declare strata in the model"
            )
        variables |= d.free_symbols()
    var_list = sorted(variables, key=lambda s: s.index)
    out = []
    for zero_flags in product((False, True), repeat=len(var_list)):
        zeros = [v for v, f in zip(var_list, zero_flags) if f]
        nonzeros = [v for v, f in zip(var_list, zero_flags) if not f]
        bits = [f"{v.name}=0" for v in zeros] + [f"{v.name}!=0" for v in nonzeros]
        stratum = Stratum(
            name=",".join(bits) if bits else "all",
            equalities=[RationalExpr.symbol(table, v) for v in zeros],
            nonvanishing=[RationalExpr.symbol(table, v) for v in nonzeros],
        )
        bindings = {v: RationalExpr.constant(table, 0) for v in zeros}
        M_sub = _substitute_matrix(M, bindings)
        out.append(RankStratum(stratum, _stratum_rank(M_sub, stratum), M_sub))
    out.sort(key=lambda rs: (-rs.rank, rs.stratum.name))
    return out


def _equality_bindings(stratum: Stratum, table: SymbolTable) -> dict[Symbol, RationalExpr]:
    """Stratum equalities as substitutions; supports the solved shapes the
    auto-stratifier and model files produce (single symbol = 0)."""
    out = {}
    for e in stratum.equalities:
        syms = sorted(e.free_symbols(), key=lambda s: s.index)
        if len(syms) == 1 and e.num.degree_in(syms[0]) == 1:
            coeff = e.differentiate(syms[0])
            if coeff.is_constant():
                sym = syms[0]
                out[sym] = RationalExpr.symbol(table, sym) - e / coeff
                continue
        raise LegendreError(f"unsupported stratum equality {e}")
    return out


def primary_constraints(m: ModelSpec, strata: list[RankStratum]) -> list[ConstraintSystem]:
    """Per-stratum primary constraint systems c_a = sum_i u_i^(a) p_i built
    from a basis of the (left) null space of the velocity Hessian."""
    ps = m.phase_space()
    table = m.table
    p_exprs = legendre_map(m)
    out = []
    for rs in strata:
        basis = linalg.null_space(rs.hessian, rs.stratum)
        generators = []
        for u in basis:
            c = RationalExpr.constant(table, 0)
            for ui, p in zip(u, m.momenta):
                c = c + ui * RationalExpr.symbol(table, p)
            generators.append(c)
        generators.sort(key=lambda g: (len(g.num.terms), str(g)))
        # each generator must annihilate the Legendre image on the stratum
        bindings = _equality_bindings(rs.stratum, table)
        for c in generators:
            img = c.substitute(dict(zip(m.momenta, p_exprs))).substitute(bindings)
            if not img.is_zero():
                raise LegendreError(
                    f"constraint {c} does not annihilate the Legendre image on {rs.stratum.name}"
                )
        graph = solve_graph(
            generators + list(rs.stratum.equalities), ps, rs.stratum, name=rs.stratum.name
        )
        out.append(ConstraintSystem(rs.stratum, generators, graph, rs.rank))
    return out


class FiberConstancyError(LegendreError):
    pass


def pushforward_hamiltonian(
    m: ModelSpec, strata: list[RankStratum]
) -> list[tuple[RankStratum, RationalExpr]]:
    """Per-stratum Hamiltonian h(q, p) with substitute(h, p -> p(q,v)) = e on
    the stratum; raises FiberConstancyError if the energy is not constant
    along Hessian-kernel fibres."""
    table = m.table
    vels = m.velocities
    e_full = energy(m)
    p_exprs_full = legendre_map(m)
    out = []
    for rs in strata:
        bindings = _equality_bindings(rs.stratum, table)
        e_sub = e_full.substitute(bindings)
        M_sub = rs.hessian
        # fibre-constancy certificate: kernel directional derivatives vanish
        for w in linalg.null_space(M_sub, rs.stratum):
            deriv = RationalExpr.constant(table, 0)
            for wi, v in zip(w, vels):
                deriv = deriv + wi * e_sub.differentiate(v)
            if not deriv.is_zero():
                raise FiberConstancyError(
                    f"energy varies along Hessian kernel on {rs.stratum.name}: {deriv}"
                )
        # solve M v = p for the pivot velocities
        n = len(vels)
        aug = [list(row) + irow for row, irow in zip(M_sub, linalg.identity(table, n))]
        rref, pivots = linalg.row_reduce(aug, rs.stratum, max_pivot_cols=n)
        vel_bindings = {}
        zero = RationalExpr.constant(table, 0)
        for r, pc in enumerate(pivots):
            rhs = zero
            for j in range(n):
                coeff = rref[r][n + j]
                if not coeff.is_zero():
                    rhs = rhs + coeff * RationalExpr.symbol(table, m.momenta[j])
            for j in range(n):
                if j == pc or rref[r][j].is_zero():
                    continue
                rhs = rhs - rref[r][j] * RationalExpr.symbol(table, vels[j])
            vel_bindings[vels[pc]] = rhs
        h = e_sub.substitute(vel_bindings)
        free = [v for v in vels if v not in vel_bindings]
        h = h.substitute({v: zero for v in free})
        leftover = {s for s in h.free_symbols() if s in set(vels)}
        if leftover:
            raise FiberConstancyError(
                f"pushforward on {rs.stratum.name} still depends on velocities {leftover}"
            )
        # verification: pull h back and compare with the energy
        check = h.substitute(dict(zip(m.momenta, p_exprs_full))).substitute(bindings)
        if not (check - e_sub).is_zero():
            raise LegendreError(f"pushforward verification failed on {rs.stratum.name}")
        out.append((rs, h))
    return out


def lagrange_two_form(m: ModelSpec) -> linalg.Matrix:
    """Coefficient matrix of the pullback two-form in the basis (dq, dv)."""
    table = m.table
    p_exprs = legendre_map(m)
    qs, vels = m.coordinates, m.velocities
    n = len(qs)
    size = 2 * n
    omega = linalg.zeros(table, size, size)
    for a in range(n):
        for b in range(n):
            omega[a][b] = p_exprs[b].differentiate(qs[a]) - p_exprs[a].differentiate(qs[b])
            dvb = p_exprs[b].differentiate(vels[a])
            omega[n + a][b] = dvb
            omega[b][n + a] = -dvb
    return omega
