"""Constraint classification and the second-class calculus: bracket matrix,
Dirac bracket, first-class modification map, stratified tangency tests, and
orbit/reduced-space bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import linalg
from .legendre import ConstraintSystem
from .phase import (
    PhaseSpace,
    SubstitutionGraph,
    hamiltonian_vector_field,
    poisson_bracket,
    solve_graph,
    weak_reduce,
)
from .strata import Stratum, StratifiedSet
from .symexpr import RationalExpr


class DiracError(ValueError):
    pass


def constraint_matrix(cs: ConstraintSystem, ps: PhaseSpace) -> linalg.Matrix:
    """S_ab = {c_a, c_b}, weak-reduced to the constraint set."""
    gens = cs.generators
    return [
        [weak_reduce(poisson_bracket(ca, cb, ps), cs.graph) for cb in gens] for ca in gens
    ]


@dataclass
class GeneratorClassification:
    generator: RationalExpr
    obstructions: list[RationalExpr]  # weak-reduced bracket entries blocking first class

    @property
    def first_class_everywhere(self) -> bool:
        return not self.obstructions

    def labels(self) -> list[tuple[str, str]]:
        """(class label, substratum condition) pairs."""
        if self.first_class_everywhere:
            return [("first", "everywhere")]
        conds = sorted({str(o) for o in self.obstructions})
        return [
            ("second", " or ".join(f"{c} != 0" for c in conds)),
            ("first", " and ".join(f"{c} = 0" for c in conds)),
        ]


def classify(cs: ConstraintSystem, ps: PhaseSpace) -> list[GeneratorClassification]:
    """A generator is first class on the substratum where its weak-reduced
    bracket row vanishes; elsewhere it is second class."""
    S = constraint_matrix(cs, ps)
    out = []
    for ci, row in zip(cs.generators, S):
        obstructions = []
        for e in row:
            if not e.is_zero() and all(not (e - o).is_zero() for o in obstructions):
                obstructions.append(e)
        out.append(GeneratorClassification(ci, obstructions))
    cs.classes = out
    return out


@dataclass
class DiracData:
    generators: list[RationalExpr]  # the second-class generators s_1..s_k
    S: linalg.Matrix
    A: linalg.Matrix
    stratum: Stratum  # validity stratum (where S is invertible)
    graph: SubstitutionGraph


def dirac_data(cs: ConstraintSystem, ps: PhaseSpace) -> DiracData:
    """Build the second-class data on the substratum where the bracket matrix
    is invertible, enlarging the stratum by the nonvanishing of monomial
    bracket entries when necessary."""
    S = constraint_matrix(cs, ps)
    if not cs.generators:
        raise DiracError("no generators: nothing is second class")
    try:
        A = linalg.invert(S, cs.stratum)
        validity = cs.stratum
    except linalg.PivotError:
        extra = []
        for row in S:
            for e in row:
                if e.is_zero() or e.is_constant():
                    continue
                if e.is_polynomial() and e.num.is_monomial():
                    if all(not (e - x).is_zero() and not (e + x).is_zero() for x in extra):
                        extra.append(e)
        validity = Stratum(
            name=",".join(f"{e}!=0" for e in extra) or cs.stratum.name,
            equalities=list(cs.stratum.equalities),
            nonvanishing=list(cs.stratum.nonvanishing) + extra,
            signs=list(cs.stratum.signs),
        )
        A = linalg.invert(S, validity)
    # invariant: A.S - I weak-reduces to zero
    err = linalg.mat_sub(linalg.mat_mul(A, S), linalg.identity(ps.table, len(S)))
    for row in err:
        for e in row:
            if not cs.graph.reduces_to_zero(e):
                raise DiracError("A*S - I does not weak-reduce to zero")
    return DiracData(list(cs.generators), S, A, validity, cs.graph)


def dirac_bracket(
    f: RationalExpr, g: RationalExpr, dd: DiracData, ps: PhaseSpace
) -> RationalExpr:
    """{f,g}* = {f,g} - {f,s_j} A^{jk} {s_k,g}, evaluated exactly."""
    out = poisson_bracket(f, g, ps)
    fb = [poisson_bracket(f, s, ps) for s in dd.generators]
    gb = [poisson_bracket(s, g, ps) for s in dd.generators]
    for j, fj in enumerate(fb):
        if fj.is_zero():
            continue
        for k, gk in enumerate(gb):
            if gk.is_zero() or dd.A[j][k].is_zero():
                continue
            out = out - fj * dd.A[j][k] * gk
    return out


def modify_first_class(f: RationalExpr, dd: DiracData, ps: PhaseSpace) -> RationalExpr:
    """f* = f - {f,s_j} A^{jl} s_l; agrees with f on the constraint set and
    has weakly vanishing brackets with every generator."""
    out = f
    fb = [poisson_bracket(f, s, ps) for s in dd.generators]
    for j, fj in enumerate(fb):
        if fj.is_zero():
            continue
        for l, s in enumerate(dd.generators):
            if dd.A[j][l].is_zero():
                continue
            out = out - fj * dd.A[j][l] * s
    return out


def constraint_systems_from_strata(
    strata: StratifiedSet, ps: PhaseSpace
) -> list[ConstraintSystem]:
    """Wrap declared phase-space strata as constraint systems (graph solved
    from the stratum equalities; generators are the momentum equalities)."""
    from .symexpr import MOMENTUM

    out = []
    for s in strata:
        graph = solve_graph(list(s.equalities), ps, s, name=s.name)
        gens = [e for e in s.equalities if all(x.kind == MOMENTUM for x in e.free_symbols())]
        out.append(ConstraintSystem(s, gens, graph, rank=-1))
    return out


@dataclass
class TangencyWitness:
    stratum_name: str
    equality: RationalExpr
    residual: RationalExpr  # weak-reduced X_f(equality), nonzero


@dataclass
class TangencyReport:
    function: RationalExpr
    passed: bool
    witnesses: list[TangencyWitness] = field(default_factory=list)


def first_class_tangency(
    f: RationalExpr, systems: list[ConstraintSystem], ps: PhaseSpace
) -> TangencyReport:
    """f is first class when its Hamiltonian vector field is tangent to every
    stratum of the constraint set: X_f(e) weak-reduces to 0 for each defining
    equality e of each stratum."""
    X = hamiltonian_vector_field(f, ps)
    witnesses = []
    for cs in systems:
        equalities = list(cs.generators)
        for e in cs.stratum.equalities:
            if all(not (e - g).is_zero() for g in equalities):
                equalities.append(e)
        for e in equalities:
            res = weak_reduce(X.apply(e), cs.graph)
            if not res.is_zero():
                witnesses.append(TangencyWitness(cs.stratum.name, e, res))
    return TangencyReport(f, not witnesses, witnesses)


@dataclass
class OrbitPiece:
    label: str
    stratum: Stratum
    dimension: int


@dataclass
class OrbitSet:
    pieces: list[OrbitPiece]

    def __len__(self):
        return len(self.pieces)


@dataclass
class ReducedClass:
    labels: list[str]
    separated: bool  # whether the sample functions separate points within


@dataclass
class ReducedSpaceReport:
    classes: list[ReducedClass]


def orbit_report(
    systems: list[ConstraintSystem],
    sample_fns: list[RationalExpr],
    ps: PhaseSpace,
) -> tuple[OrbitSet, ReducedSpaceReport]:
    """Connected orbit pieces (sign splits of nonvanishing conditions) plus
    the partition obtained by merging pieces on which every supplied
    first-class function restricts to the same constant."""
    pieces = []
    profiles = {}
    separated = {}
    for cs in systems:
        dim = ps.dim - len(cs.graph.bindings)
        for piece in cs.stratum.connected_pieces():
            pieces.append(OrbitPiece(piece.name, piece, dim))
            profile = []
            nonconst = False
            for fn in sample_fns:
                r = weak_reduce(fn, cs.graph)
                if r.is_constant():
                    profile.append(("const", r.constant_value()))
                else:
                    nonconst = True
                    profile.append(("var", piece.name))
            profiles[piece.name] = tuple(profile)
            separated[piece.name] = nonconst
    merged: dict[tuple, list[str]] = {}
    for p in pieces:
        merged.setdefault(profiles[p.label], []).append(p.label)
    classes = [
        ReducedClass(labels, any(separated[l] for l in labels))
        for labels in merged.values()
    ]
    classes.sort(key=lambda c: c.labels[0])
    return OrbitSet(pieces), ReducedSpaceReport(classes)
