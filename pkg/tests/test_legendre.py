"""Degenerate Legendre analysis: Hessians, rank strata, primary constraints,
Hamiltonian pushforward, two-form."""

import numpy as np
import pytest

from diracmech import legendre
from diracmech.legendre import (
    LegendreError,
    energy,
    lagrange_two_form,
    legendre_map,
    rank_strata,
    velocity_hessian,
)
from diracmech.modelfile import model_from_dict
from diracmech.symexpr import parse_expr

from conftest import SEED


def tiny_model(lagrangian, coords=("x", "y")):
    return model_from_dict({"coordinates": list(coords), "lagrangian": lagrangian})


def _expr_set_equal(got, expected_strs, table):
    if len(got) != len(expected_strs):
        return False
    want = [parse_expr(s, table) for s in expected_strs]
    used = [False] * len(want)
    for g in got:
        hit = False
        for i, w in enumerate(want):
            if not used[i] and (g - w).is_zero():
                used[i] = hit = True
                break
        if not hit:
            return False
    return True


def test_velocity_degree_enforcement():
    with pytest.raises(LegendreError):
        velocity_hessian(tiny_model("x_dot^3 + y_dot^2"))
    with pytest.raises(LegendreError):
        velocity_hessian(tiny_model("x_dot + y_dot"))
    with pytest.raises(LegendreError):
        velocity_hessian(tiny_model("x + y"))


def test_hessian_against_fd_oracle(model_a, rng):
    m, a = model_a
    M = a.hessian
    vels = m.velocities
    variables = list(m.coordinates) + vels
    h = 1e-5
    for _ in range(5):
        point = {s: float(v) for s, v in zip(variables, rng.uniform(0.5, 1.5, len(variables)))}
        for i, vi in enumerate(vels):
            for j, vj in enumerate(vels):
                def l_at(di, dj):
                    p = dict(point)
                    p[vi] = p[vi] + di
                    p[vj] = p[vj] + dj
                    return m.lagrangian.eval_at(p)

                fd = (l_at(h, h) - l_at(h, -h) - l_at(-h, h) + l_at(-h, -h)) / (4 * h * h)
                assert abs(M[i][j].eval_at(point) - fd) < 1e-5


def test_legendre_map_and_energy_identity(model_a):
    m, _ = model_a
    p_exprs = legendre_map(m)
    e = energy(m)
    # e = sum p_i v_i - l by construction; check against a direct expansion
    table = m.table
    acc = -m.lagrangian
    for p_expr, v in zip(p_exprs, m.velocities):
        acc = acc + p_expr * parse_expr(v.name, table)
    assert (e - acc).is_zero()


def test_rank_strata_constant_rank(model_a, model_free, model_gauge):
    for fixture, rank in ((model_a, 1), (model_free, 2), (model_gauge, 2)):
        m, a = fixture
        assert len(a.rank_strata) == 1
        assert a.rank_strata[0].stratum.name == "all"
        assert a.rank_strata[0].rank == rank


def test_rank_strata_nonconstant(model_b):
    m, a = model_b
    got = [(rs.stratum.name, rs.rank) for rs in a.rank_strata]
    assert got == [("x!=0,y!=0", 2), ("x=0,y!=0", 1), ("y=0,x!=0", 1), ("x=0,y=0", 0)]


def test_rank_strata_numeric_oracle(model_b, rng):
    """Sampled numeric matrix ranks agree with the symbolic stratification."""
    m, a = model_b
    variables = list(m.coordinates)
    for rs in a.rank_strata:
        zero_syms = set()
        for e in rs.stratum.equalities:
            zero_syms |= e.free_symbols()
        for _ in range(25):
            point = {}
            for q in variables:
                point[q] = 0.0 if q in zero_syms else float(rng.uniform(0.5, 1.5))
            M_num = np.array([[e.eval_at(point) for e in row] for row in a.hessian])
            assert np.linalg.matrix_rank(M_num, tol=1e-8) == rs.rank


def test_primary_constraints(model_a, model_b, model_free):
    m, a = model_a
    assert _expr_set_equal(a.systems[0].generators, ["p_y", "p_x + y*p_z"], m.table)
    m, a = model_free
    assert a.systems[0].generators == []
    m, a = model_b
    expected = {
        "x!=0,y!=0": [],
        "x=0,y!=0": ["p_y"],
        "y=0,x!=0": ["p_x"],
        "x=0,y=0": ["p_x", "p_y"],
    }
    for rs, cs in zip(a.rank_strata, a.systems):
        assert _expr_set_equal(cs.generators, expected[rs.stratum.name], m.table)


def test_pushforward_hamiltonian_values(model_a, model_b):
    m, a = model_a
    assert (a.hamiltonians[0] - parse_expr("1/2*p_z^2", m.table)).is_zero()
    m, a = model_b
    expected = {
        "x!=0,y!=0": "1/2*p_x^2/y^2 + 1/2*p_y^2/x^2",
        "x=0,y!=0": "1/2*p_x^2/y^2",
        "y=0,x!=0": "1/2*p_y^2/x^2",
        "x=0,y=0": "0",
    }
    for rs, h in zip(a.rank_strata, a.hamiltonians):
        assert (h - parse_expr(expected[rs.stratum.name], m.table)).is_zero()


def test_pushforward_pullback_identity(model_a, model_gauge):
    # substituting p = p(q, v) into h recovers the energy on the stratum
    for fixture in (model_a, model_gauge):
        m, a = fixture
        p_exprs = legendre_map(m)
        e = energy(m)
        h = a.hamiltonians[0]
        pulled = h.substitute(dict(zip(m.momenta, p_exprs)))
        assert (pulled - e).is_zero()


def test_pushforward_eliminates_velocities(model_a, model_b):
    # the pushforward is a genuine function of (q, p): no velocities survive
    for fixture in (model_a, model_b):
        m, a = fixture
        vels = set(m.velocities)
        for h in a.hamiltonians:
            assert not (h.free_symbols() & vels)


def test_two_form_antisymmetry_and_even_rank(model_a, model_b, rng):
    for fixture in (model_a, model_b):
        m, a = fixture
        omega = lagrange_two_form(m)
        n2 = len(omega)
        for i in range(n2):
            for j in range(n2):
                assert (omega[i][j] + omega[j][i]).is_zero()
        variables = list(m.coordinates) + list(m.velocities)
        point = {s: float(v) for s, v in zip(variables, rng.uniform(0.5, 1.5, len(variables)))}
        W = np.array([[e.eval_at(point) for e in row] for row in omega])
        # antisymmetric matrices have even rank; degeneracy leaves a kernel
        r = np.linalg.matrix_rank(W, tol=1e-8)
        assert r % 2 == 0
        assert r <= n2


def test_two_form_canonical_for_regular_lagrangian(model_free):
    # for l = (v^2)/2 the pullback two-form is the canonical symplectic form
    m, _ = model_free
    omega = lagrange_two_form(m)
    n = len(m.coordinates)
    table = m.table
    for i in range(n):
        for j in range(n):
            assert omega[i][j].is_zero()  # dq^dq block
            expected = "1" if i == j else "0"
            assert (omega[n + i][j] - parse_expr(expected, table)).is_zero()


def test_auto_stratification_rejects_nonmonomial_minors():
    # Hessian determinant x^2 + y^2 is not a monomial: must be declared
    m = tiny_model("1/2*(x^2 + y^2)*x_dot^2 + 1/2*y_dot^2")
    with pytest.raises(LegendreError):
        rank_strata(velocity_hessian(m), m)
