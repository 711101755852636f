"""Numeric dynamics: RK4 flows, guards, monitors, EL residuals, symmetry
certificates, reduction charts, reachability."""

import numpy as np
import pytest

from diracmech import dynamics
from diracmech.dynamics import (
    ChartError,
    DynamicsError,
    conserved_drift,
    el_residuals_sampled,
    euler_lagrange_residuals,
    explicit_accelerations,
    fd_acceleration,
    fd_velocity,
    hamiltonian_flow_exprs,
    integrate_field,
    killing_check,
    lagrangian_flow_exprs,
    noether,
    radial_closed_form,
    reach_connect,
    reduction_chart_verify,
)
from diracmech.modelfile import model_from_dict
from diracmech.phase import VectorField
from diracmech.symexpr import parse_expr


def test_euler_lagrange_residuals_free_particle(model_free):
    m, _ = model_free
    t = m.table
    res = euler_lagrange_residuals(m)
    assert (res[0] - parse_expr("x_ddot", t)).is_zero()
    assert (res[1] - parse_expr("y_ddot", t)).is_zero()


def test_explicit_accelerations(model_free, model_a):
    m, a = model_free
    for e in explicit_accelerations(m, a.rank_strata[0]):
        assert e.is_zero()
    m, a = model_a
    with pytest.raises(DynamicsError):
        explicit_accelerations(m, a.rank_strata[0])


def test_integrate_hamiltonian_flow(model_a):
    m, a = model_a
    t = m.table
    h = a.hamiltonians[0]
    exprs, variables = hamiltonian_flow_exprs(h, a.ps)
    init = a.systems[0].graph.numeric_bindings(
        {t.get("x"): 1.0, t.get("y"): 2.0, t.get("z"): 3.0, t.get("p_z"): 0.5}
    )
    traj = integrate_field(exprs, variables, init, T=2.0, dt=0.01, monitors={"h": h})
    assert traj.event is None
    z = traj.column(t.get("z"))
    assert np.max(np.abs(z - (3.0 + 0.5 * traj.times))) < 1e-12
    assert np.max(np.abs(traj.column(t.get("x")) - 1.0)) < 1e-14
    assert np.max(np.abs(traj.monitors["h"] - 0.125)) < 1e-14
    assert conserved_drift(traj, h) < 1e-14


def test_lagrangian_flow_matches_hamiltonian(model_free):
    m, a = model_free
    t = m.table
    exprs, variables = lagrangian_flow_exprs(m, a.rank_strata[0])
    init = {
        t.get("x"): 0.0, t.get("y"): 1.0,
        t.get("x_dot"): 1.0, t.get("y_dot"): -0.5,
    }
    traj = integrate_field(exprs, variables, init, T=1.0, dt=0.1)
    assert traj.column(t.get("x"))[-1] == pytest.approx(1.0, abs=1e-12)
    assert traj.column(t.get("y"))[-1] == pytest.approx(0.5, abs=1e-12)


def test_guard_event_truncates():
    m = model_from_dict(
        {"coordinates": ["x", "y"], "lagrangian": "1/2*x_dot^2*y^2 + 1/2*y_dot^2"}
    )
    from diracmech.report import run_analysis

    a = run_analysis(m)
    rs = a.rank_strata[0]
    assert rs.stratum.nonvanishing  # y != 0 guards the top stratum
    t = m.table
    h = a.hamiltonians[0]
    exprs, variables = hamiltonian_flow_exprs(h, a.ps)
    init = {t.get("x"): 0.0, t.get("y"): 1.0, t.get("p_x"): 0.0, t.get("p_y"): -1.0}
    guards = [(e, 1) for e in rs.stratum.nonvanishing]
    traj = integrate_field(exprs, variables, init, T=2.0, dt=0.01, guards=guards)
    assert traj.event is not None and "stratum exit" in traj.event
    assert traj.times[-1] < 1.0  # truncated strictly before the crossing
    assert np.all(traj.column(t.get("y")) > dynamics.TAU_GUARD / 2)


def test_csv_output(tmp_path, model_a):
    m, a = model_a
    t = m.table
    h = a.hamiltonians[0]
    exprs, variables = hamiltonian_flow_exprs(h, a.ps)
    init = a.systems[0].graph.numeric_bindings(
        {t.get("x"): 1.0, t.get("y"): 2.0, t.get("z"): 3.0, t.get("p_z"): 0.5}
    )
    traj = integrate_field(exprs, variables, init, T=0.5, dt=0.1, monitors={"energy": h})
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    traj.write_csv(str(p1))
    traj.write_csv(str(p2))
    assert p1.read_bytes() == p2.read_bytes()  # byte-deterministic
    lines = p1.read_text().splitlines()
    assert lines[0] == "t,x,y,z,p_x,p_y,p_z,energy"
    assert len(lines) == 7
    first = [float(v) for v in lines[1].split(",")]
    assert first[1] == 1.0 and first[-1] == 0.125


def test_pure_numpy_backend_matches(monkeypatch, model_a):
    m, a = model_a
    t = m.table
    exprs, variables = hamiltonian_flow_exprs(a.hamiltonians[0], a.ps)
    init = a.systems[0].graph.numeric_bindings(
        {t.get("x"): 1.0, t.get("y"): 2.0, t.get("z"): 3.0, t.get("p_z"): 0.5}
    )
    fast = integrate_field(exprs, variables, init, T=1.0, dt=0.01)
    monkeypatch.setenv("DIRAC_MECH_PURE_NUMPY", "1")
    slow = integrate_field(exprs, variables, init, T=1.0, dt=0.01)
    assert np.allclose(fast.states, slow.states, rtol=0, atol=1e-12)


def test_rk4_order_four(model_b):
    m, a = model_b
    t = m.table
    exprs, variables = hamiltonian_flow_exprs(a.hamiltonians[0], a.ps)
    init = {t.get("x"): 1.0, t.get("y"): 1.0, t.get("p_x"): 1.0, t.get("p_y"): 0.0}

    def endpoint(dt):
        return integrate_field(exprs, variables, init, T=1.0, dt=dt).states[-1]

    ref = endpoint(5e-4)
    e1 = np.max(np.abs(endpoint(4e-3) - ref))
    e2 = np.max(np.abs(endpoint(2e-3) - ref))
    assert 12.0 <= e1 / e2 <= 20.0


def test_noether_certificates(model_a, model_b):
    m, a = model_a
    t = m.table
    for name, mom in (("translate_x", "p_x"), ("translate_z", "p_z")):
        cert, j = noether(m, m.symmetries[name])
        assert cert.is_zero()
        assert (j - parse_expr(mom, t)).is_zero()
    # a non-symmetry is rejected by the certificate
    bad = VectorField({t.get("y"): parse_expr("1", t)})
    cert, _ = noether(m, bad)
    assert not cert.is_zero()
    m, a = model_b
    cert, j = noether(m, m.symmetries["hyperbolic_scaling"])
    assert cert.is_zero()
    assert (j - parse_expr("x*p_x - y*p_y", m.table)).is_zero()


def test_killing_field(model_b):
    m, _ = model_b
    t = m.table
    g = [[parse_expr("y^2", t), parse_expr("0", t)],
         [parse_expr("0", t), parse_expr("x^2", t)]]
    X = m.symmetries["hyperbolic_scaling"]
    lie = killing_check(g, X, m.coordinates)
    assert all(e.is_zero() for row in lie for e in row)
    # a non-Killing field leaves a residue
    Y = VectorField({t.get("x"): parse_expr("x", t)})
    lie = killing_check(g, Y, m.coordinates)
    assert not all(e.is_zero() for row in lie for e in row)


def test_reduction_chart(model_b):
    m, a = model_b
    hmu = reduction_chart_verify(m.reduction_chart, a.hamiltonians[0], a.ps)
    assert not hmu.is_zero()
    # a wrong template is rejected with a witness
    import dataclasses

    broken = dataclasses.replace(
        m.reduction_chart, reduced_h=parse_expr("qbar^2", m.table)
    )
    with pytest.raises(ChartError):
        reduction_chart_verify(broken, a.hamiltonians[0], a.ps)


def test_radial_closed_form():
    ts = np.linspace(0.0, 2.0, 5)
    q = radial_closed_form(0.5, 1.0, 0.5, ts)
    assert q[0] == pytest.approx(np.sqrt(0.5))
    assert np.all(np.diff(q) > 0)
    with pytest.raises(DynamicsError):
        radial_closed_form(-1.0, 1.0, 0.0, ts)


def test_fd_stencils():
    ts = np.linspace(0.0, 1.0, 101)
    h = ts[1] - ts[0]
    s = np.sin(2 * ts)
    v = fd_velocity(s, h)
    a = fd_acceleration(s, h)
    assert np.max(np.abs(v - 2 * np.cos(2 * ts[2:-2]))) < 1e-6
    assert np.max(np.abs(a + 4 * np.sin(2 * ts[2:-2]))) < 1e-4


def test_el_residuals_sampled_straight_line(model_free):
    m, _ = model_free
    ts = np.linspace(0.0, 1.0, 201)
    pos = np.column_stack([2 * ts + 1, -ts])
    res = el_residuals_sampled(m, ts, pos)
    assert np.max(np.abs(res)) < 1e-9


def test_reach_connect_certificates(model_a):
    m, _ = model_a
    r = reach_connect([0, 0, 0, 1, 0, 0], [1, 2, 1, 0.5, 0.25, 1.0], m)
    c = r.certificates
    assert c["endpoint_error"] < 1e-8
    assert c["area_residual"] < 1e-10
    assert c["membership_residual"] < 1e-12
    assert c["el_residual_max"] < 1e-5
    # trajectory columns are (x, y, z, x_dot, y_dot, z_dot)
    assert r.trajectory.states.shape[1] == 6
    assert r.trajectory.states[0, 0] == pytest.approx(0.0)
    assert r.trajectory.states[-1, 2] == pytest.approx(1.0, abs=1e-8)


def test_reach_connect_rejects_off_manifold_endpoints(model_a):
    m, _ = model_a
    with pytest.raises(DynamicsError):
        reach_connect([0, 0, 0, 1, 0, 0.5], [1, 1, 1, 0, 0, 0], m)
