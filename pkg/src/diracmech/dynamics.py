"""Equations of motion and numerics: Euler-Lagrange residuals, RK4 flows
with stratum guards and monitors, symmetry checks (Noether / Killing),
reduction-chart verification, radial closed forms, and the constructive
reachability curve on the zero-Lagrangian submanifold.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .legendre import ModelSpec, RankStratum, legendre_map, velocity_hessian
from .phase import PhaseSpace, VectorField, poisson_bracket
from .strata import TAU_EQ, Stratum
from .numeric import CompiledVector, rk4
from .symexpr import RationalExpr, Symbol

TAU_GUARD = 1e-8


class DynamicsError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Euler-Lagrange structure


def euler_lagrange_residuals(m: ModelSpec) -> list[RationalExpr]:
    """residual_i = d/dt(dl/dv_i) - dl/dq_i expanded over (q, v, a):
    sum_j (dp_i/dq_j) v_j + M_ij a_j - dl/dq_i."""
    table = m.table
    p_exprs = legendre_map(m)
    out = []
    for i, q in enumerate(m.coordinates):
        r = -m.lagrangian.differentiate(q)
        for j, qj in enumerate(m.coordinates):
            vj = RationalExpr.symbol(table, m.table.velocity_of(qj))
            aj = RationalExpr.symbol(table, m.table.acceleration_of(qj))
            r = r + p_exprs[i].differentiate(qj) * vj
            r = r + p_exprs[i].differentiate(m.table.velocity_of(qj)) * aj
        out.append(r)
    return out


def explicit_accelerations(m: ModelSpec, rs: RankStratum) -> list[RationalExpr]:
    """a = M^{-1}(dl/dq - (dp/dq)v) where the Hessian is invertible."""
    n = len(m.coordinates)
    if rs.rank != n:
        raise DynamicsError(
            f"explicit accelerations unavailable on degenerate stratum {rs.stratum.name} "
            f"(rank {rs.rank} < {n})"
        )
    table = m.table
    p_exprs = legendre_map(m)
    rhs = []
    for i, q in enumerate(m.coordinates):
        r = m.lagrangian.differentiate(q)
        for j, qj in enumerate(m.coordinates):
            vj = RationalExpr.symbol(table, m.table.velocity_of(qj))
            r = r - p_exprs[i].differentiate(qj) * vj
        rhs.append([r])
    Minv = linalg.invert(rs.hessian, rs.stratum)
    return [row[0] for row in linalg.mat_mul(Minv, rhs)]


# ---------------------------------------------------------------------------
# Trajectories


@dataclass
class Trajectory:
    times: np.ndarray
    symbols: list[Symbol]  # state layout, column order
    states: np.ndarray  # (n_times, dim)
    monitors: dict[str, np.ndarray] = field(default_factory=dict)
    event: str | None = None  # stratum exit / non-finite state, if any

    def state_at(self, k: int) -> dict[Symbol, float]:
        return dict(zip(self.symbols, self.states[k]))

    def column(self, sym: Symbol) -> np.ndarray:
        return self.states[:, self.symbols.index(sym)]

    def write_csv(self, path: str) -> None:
        names = [s.name for s in self.symbols] + sorted(self.monitors)
        cols = [self.times] + [self.states[:, i] for i in range(self.states.shape[1])]
        cols += [self.monitors[k] for k in sorted(self.monitors)]
        data = np.column_stack(cols)
        with open(path, "w") as fh:
            fh.write("t," + ",".join(names) + "\n")
            for row in data:
                fh.write(",".join("%.17g" % v for v in row) + "\n")


def integrate_field(
    exprs: list[RationalExpr],
    variables: list[Symbol],
    init: dict[Symbol, float],
    T: float,
    dt: float,
    monitors: dict[str, RationalExpr] | None = None,
    guards: list[tuple[RationalExpr, int]] | None = None,
    params: dict[Symbol, float] | None = None,
) -> Trajectory:
    """Fixed-step RK4 integration of dx/dt = exprs(x).  Guards are sign
    conditions; the trajectory is truncated with an event when a guarded
    expression's magnitude drops below TAU_GUARD or its sign flips."""
    if dt <= 0:
        raise DynamicsError("dt must be positive")
    missing = [s.name for s in variables if s not in init]
    if missing:
        raise DynamicsError(f"initial state missing values for {', '.join(missing)}")
    n_steps = int(round(T / dt))
    fieldc = CompiledVector.compile(exprs, variables, params)
    y0 = np.array([init[s] for s in variables], dtype=np.float64)
    states = rk4(fieldc, y0, dt, n_steps)
    times = dt * np.arange(n_steps + 1)
    event = None
    finite = np.isfinite(states).all(axis=1)
    if not finite.all():
        k = int(np.argmin(finite))
        states, times = states[:k], times[:k]
        event = f"non-finite state at t={k * dt:.6g}; last good t={(k - 1) * dt:.6g}"
    if guards and event is None and len(states):
        gvec = CompiledVector.compile([g for g, _ in guards], variables, params)
        gvals = gvec.eval_many(states)
        bad = np.zeros(len(states), dtype=bool)
        for col, (_, sign) in enumerate(guards):
            v = gvals[:, col]
            bad |= np.abs(v) < TAU_GUARD
            bad |= (v * sign) < 0
        if bad.any():
            k = int(np.argmax(bad))
            states, times = states[:k], times[:k]
            event = f"stratum exit at t={k * dt:.6g}; last good t={(k - 1) * dt:.6g}"
    traj = Trajectory(times, list(variables), states, {}, event)
    if monitors and len(states):
        mon = CompiledVector.compile(list(monitors.values()), variables, params)
        vals = mon.eval_many(states)
        traj.monitors = {name: vals[:, i] for i, name in enumerate(monitors)}
    return traj


def hamiltonian_flow_exprs(h: RationalExpr, ps: PhaseSpace) -> tuple[list[RationalExpr], list[Symbol]]:
    variables = ps.coordinates + ps.momenta
    exprs = [h.differentiate(p) for p in ps.momenta] + [-h.differentiate(q) for q in ps.coordinates]
    return exprs, variables


def lagrangian_flow_exprs(m: ModelSpec, rs: RankStratum) -> tuple[list[RationalExpr], list[Symbol]]:
    table = m.table
    vels = m.velocities
    exprs = [RationalExpr.symbol(table, v) for v in vels] + explicit_accelerations(m, rs)
    return exprs, list(m.coordinates) + list(vels)


def conserved_drift(traj: Trajectory, f: RationalExpr, params=None) -> float:
    cv = CompiledVector.compile([f], traj.symbols, params)
    vals = cv.eval_many(traj.states)[:, 0]
    return float(np.max(np.abs(vals - vals[0])))


# ---------------------------------------------------------------------------
# Symmetries


def noether(m: ModelSpec, X: VectorField) -> tuple[RationalExpr, RationalExpr]:
    """(invariance certificate, momentum).  The certificate is the derivative
    of l along the tangent lift of X and vanishes identically iff X is a
    Lagrangian symmetry; the momentum is j_X = sum_i p_i X^i(q)."""
    table = m.table
    cert = RationalExpr.constant(table, 0)
    mom = RationalExpr.constant(table, 0)
    for i, q in enumerate(m.coordinates):
        Xi = X.component(q, table)
        cert = cert + Xi * m.lagrangian.differentiate(q)
        lift = RationalExpr.constant(table, 0)
        for qj in m.coordinates:
            vj = RationalExpr.symbol(table, table.velocity_of(qj))
            lift = lift + vj * Xi.differentiate(qj)
        cert = cert + lift * m.lagrangian.differentiate(table.velocity_of(q))
        mom = mom + RationalExpr.symbol(table, table.momentum_of(q)) * Xi
    return cert, mom


def killing_check(g: linalg.Matrix, X: VectorField, coordinates: list[Symbol]) -> linalg.Matrix:
    """(Lie_X g)_ij = sum_k (X^k d_k g_ij + g_kj d_i X^k + g_ik d_j X^k);
    all-zero output certifies a Killing field."""
    table = g[0][0].table
    n = len(coordinates)
    out = linalg.zeros(table, n, n)
    for i in range(n):
        for j in range(n):
            acc = RationalExpr.constant(table, 0)
            for k, qk in enumerate(coordinates):
                Xk = X.component(qk, table)
                acc = acc + Xk * g[i][j].differentiate(qk)
                acc = acc + g[k][j] * Xk.differentiate(coordinates[i])
                acc = acc + g[i][k] * Xk.differentiate(coordinates[j])
            out[i][j] = acc
    return out


# ---------------------------------------------------------------------------
# Reduction chart


@dataclass
class ReductionChart:
    qbar: RationalExpr  # in (q, p)
    pbar: RationalExpr
    j: RationalExpr
    qbar_sym: Symbol  # auxiliary symbols of the reduced template
    pbar_sym: Symbol
    mu_sym: Symbol
    reduced_h: RationalExpr  # template over (qbar_sym, pbar_sym, mu_sym)


class ChartError(ValueError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


def reduction_chart_verify(
    chart: ReductionChart, h: RationalExpr, ps: PhaseSpace
) -> RationalExpr:
    """Verify {qbar,pbar}=1, {qbar,j}=0, {pbar,j}=0 exactly and that h equals
    the reduced template with (qbar, pbar, mu) -> (chart expressions, j).
    Returns the reduced Hamiltonian h_mu (template with mu a parameter)."""
    one = RationalExpr.constant(ps.table, 1)
    b = poisson_bracket(chart.qbar, chart.pbar, ps)
    if not (b - one).is_zero():
        raise ChartError(f"{{qbar,pbar}} = {b} != 1", b)
    for name, e in (("qbar", chart.qbar), ("pbar", chart.pbar)):
        b = poisson_bracket(e, chart.j, ps)
        if not b.is_zero():
            raise ChartError(f"{{{name},j}} = {b} != 0", b)
    back = chart.reduced_h.substitute(
        {chart.qbar_sym: chart.qbar, chart.pbar_sym: chart.pbar, chart.mu_sym: chart.j}
    )
    diff = h - back
    if not diff.is_zero():
        raise ChartError(f"h does not match the reduced template: residue {diff}", diff)
    return chart.reduced_h


def radial_closed_form(
    h_val: float, mu: float, t0: float, ts, k: float | None = None
):
    """q(t) = sqrt(2 h (t+t0)^2 + mu^2/(8h)); for mu = 0 and a given slope k,
    also returns x(t) = (4h/k^2)^(1/4) sqrt(t)."""
    if h_val <= 0:
        raise DynamicsError("h must be positive")
    ts = np.asarray(ts, dtype=np.float64)
    q = np.sqrt(2.0 * h_val * (ts + t0) ** 2 + mu**2 / (8.0 * h_val))
    if mu == 0 and k is not None:
        return q, (4.0 * h_val / k**2) ** 0.25 * np.sqrt(ts)
    return q


# ---------------------------------------------------------------------------
# Sampled-curve certification (finite-difference EL residuals)


def fd_velocity(samples: np.ndarray, h: float) -> np.ndarray:
    """5-point central first derivative at interior indices [2, n-2)."""
    s = samples
    return (-s[4:] + 8 * s[3:-1] - 8 * s[1:-3] + s[:-4]) / (12 * h)


def fd_acceleration(samples: np.ndarray, h: float) -> np.ndarray:
    s = samples
    return (-s[4:] + 16 * s[3:-1] - 30 * s[2:-2] + 16 * s[1:-3] - s[:-4]) / (12 * h**2)


def el_residuals_sampled(
    m: ModelSpec,
    times: np.ndarray,
    positions: np.ndarray,
    velocities: np.ndarray | None = None,
    params: dict[Symbol, float] | None = None,
) -> np.ndarray:
    """Evaluate the EL residuals along a uniformly sampled curve, taking
    velocities and accelerations from 5-point central stencils (velocities
    may instead be supplied analytically).  Returns (n_interior, n_coords)."""
    h = float(times[1] - times[0])
    if not np.allclose(np.diff(times), h):
        raise DynamicsError("times must be uniformly spaced")
    vels = fd_velocity(positions, h) if velocities is None else velocities[2:-2]
    accs = fd_acceleration(positions, h)
    state = np.hstack([positions[2:-2], vels, accs])
    variables = list(m.coordinates) + list(m.velocities) + list(m.accelerations)
    cv = CompiledVector.compile(euler_lagrange_residuals(m), variables, params)
    return cv.eval_many(state)


# ---------------------------------------------------------------------------
# Reachability on {l = 0} for the contact-form model


def _hermite_spline(knots, values, d1, d2):
    """Piecewise quintic with prescribed (value, first, second derivative)
    at each knot."""
    from scipy.interpolate import BPoly

    data = np.column_stack([values, d1, d2])
    return BPoly.from_derivatives(knots, data)


def _bump_data(knots, fn, dfn, d2fn):
    return [fn(knots), dfn(knots), d2fn(knots)]


def _segment_polys(pp, seg: int):
    """Local numpy Polynomial of one PPoly/BPoly segment."""
    from numpy.polynomial import Polynomial
    from scipy.interpolate import PPoly

    if not isinstance(pp, PPoly):
        pp = PPoly.from_bernstein_basis(pp)
    c = pp.c[:, seg][::-1]
    return Polynomial(c), pp.x[seg], pp.x[seg + 1]


def _integral_product(pa, pb) -> float:
    """Exact integral of pa * pb over their (shared) breakpoints via
    per-segment polynomial antiderivatives."""
    total = 0.0
    n_seg = len(pa.x) - 1
    for s in range(n_seg):
        qa, lo, hi = _segment_polys(pa, s)
        qb, _, _ = _segment_polys(pb, s)
        prod = (qa * qb).integ()
        total += prod(hi - lo) - prod(0.0)
    return total


def _cumulative_product_integral(pa, pb, ts) -> np.ndarray:
    """z(t) = integral_0^t pa*pb, exactly per segment, sampled at ts."""
    n_seg = len(pa.x) - 1
    seg_polys = []
    offsets = [0.0]
    for s in range(n_seg):
        qa, lo, hi = _segment_polys(pa, s)
        qb, _, _ = _segment_polys(pb, s)
        anti = (qa * qb).integ()
        seg_polys.append((anti, lo))
        offsets.append(offsets[-1] + anti(hi - lo) - anti(0.0))
    breaks = pa.x
    out = np.empty(len(ts))
    for i, t in enumerate(ts):
        s = min(np.searchsorted(breaks, t, side="right") - 1, n_seg - 1)
        s = max(s, 0)
        anti, lo = seg_polys[s]
        out[i] = offsets[s] + anti(t - lo) - anti(0.0)
    return out


@dataclass
class ReachResult:
    trajectory: Trajectory
    amplitude: float
    certificates: dict[str, float]


def reach_connect(p0, p1, m: ModelSpec, n_seg: int = 4, n_samples: int = 1601) -> ReachResult:
    """Join two points of the submanifold {vz = y*vx} (where the declared
    Lagrangian vanishes) by a curve Gamma(t) = (f, g, z0 + int f' g) with
    piecewise quintic-Hermite f, g on [0,1].  The free bump amplitude on g is
    root-solved so the area integral int_0^1 f' g equals z1 - z0."""
    from scipy.integrate import quad
    from scipy.optimize import brentq

    p0 = np.asarray(p0, dtype=np.float64)
    p1 = np.asarray(p1, dtype=np.float64)
    for p in (p0, p1):
        if abs(p[5] - p[1] * p[3]) > TAU_EQ:
            raise DynamicsError(f"endpoint {p[:3]} with velocity {p[3:]} is off the submanifold")
    knots = np.linspace(0.0, 1.0, n_seg + 1)

    def hermite_base(v0, dv0, v1, dv1):
        """Quintic Hermite base (zero end second derivatives) resampled to
        the knot grid with matching jet data, hence reproduced exactly."""
        from scipy.interpolate import BPoly

        base = BPoly.from_derivatives([0.0, 1.0], [[v0, dv0, 0.0], [v1, dv1, 0.0]])
        d1, d2 = base.derivative(), base.derivative(2)
        return _hermite_spline(knots, base(knots), d1(knots), d2(knots))

    # bumps normalized to unit sup norm so amplitudes are geometrically
    # meaningful
    bmax = (0.25) ** 3
    bump = lambda t: (t * (1 - t)) ** 3 / bmax
    dbump = lambda t: 3 * (t * (1 - t)) ** 2 * (1 - 2 * t) / bmax
    d2bump = lambda t: (6 * (t * (1 - t)) * (1 - 2 * t) ** 2 - 6 * (t * (1 - t)) ** 2) / bmax

    grid = np.linspace(0.0, 1.0, 4001)
    tbmax = float(np.max(grid * (grid * (1 - grid)) ** 3))
    tb = lambda t: t * (t * (1 - t)) ** 3 / tbmax
    dtb = lambda t: ((t * (1 - t)) ** 3 + 3 * t * (t * (1 - t)) ** 2 * (1 - 2 * t)) / tbmax
    d2tb = lambda t: (
        6 * (t * (1 - t)) ** 2 * (1 - 2 * t)
        + t * (6 * (t * (1 - t)) * (1 - 2 * t) ** 2 - 6 * (t * (1 - t)) ** 2)
    ) / tbmax

    f_base = hermite_base(p0[0], p0[3], p1[0], p1[3])
    g_base = hermite_base(p0[1], p0[4], p1[1], p1[4])
    f_bump = _hermite_spline(knots, bump(knots), dbump(knots), d2bump(knots))
    g_bump = _hermite_spline(knots, tb(knots), dtb(knots), d2tb(knots))

    target = p1[2] - p0[2]

    def make_f(beta):
        from scipy.interpolate import PPoly

        a = PPoly.from_bernstein_basis(f_base)
        b = PPoly.from_bernstein_basis(f_bump)
        return PPoly(a.c + beta * b.c, a.x)

    def solve_amplitude(beta):
        """Area is affine in the g-bump amplitude A for fixed f; root-find
        it with an expanding bracket."""
        f = make_f(beta)
        fp = f.derivative()
        slope = _integral_product(fp, _to_ppoly(g_bump))
        if abs(slope) < 1e-9:
            return f, fp, None
        area0 = _integral_product(fp, _to_ppoly(g_base))

        def area_residual(A):
            return area0 + A * slope - target

        lo, hi = -1.0, 1.0
        for _ in range(80):
            if area_residual(lo) * area_residual(hi) <= 0:
                break
            lo *= 2.0
            hi *= 2.0
        else:
            raise DynamicsError("failed to bracket the area equation; raise n_seg")
        return f, fp, brentq(area_residual, lo, hi, xtol=1e-15, rtol=8.9e-16)

    # pass 1: unit f-bump; pass 2: rebalance so the f and g excursions are
    # comparable (keeps curvature, and hence derivative noise, moderate)
    beta = 1.0
    f, fp, A = solve_amplitude(beta)
    if A is None:
        for _ in range(8):
            beta *= 2.0
            f, fp, A = solve_amplitude(beta)
            if A is not None:
                break
        else:
            raise DynamicsError("area equation degenerate; raise n_seg")
    if abs(A) > 4.0 * max(beta, 1.0):
        beta = float(np.copysign(np.sqrt(abs(A) * beta), beta))
        f, fp, A2 = solve_amplitude(beta)
        if A2 is not None:
            A = A2

    from scipy.interpolate import PPoly

    gb = _to_ppoly(g_base)
    gbump = _to_ppoly(g_bump)
    g = PPoly(gb.c + A * gbump.c, gb.x)

    ts = np.linspace(0.0, 1.0, n_samples)
    xs, ys = f(ts), g(ts)
    zs = p0[2] + _cumulative_product_integral(fp, g, ts)
    vxs, vys = f.derivative()(ts), g.derivative()(ts)
    vzs = fp(ts) * g(ts)

    # certify EL residuals segment by segment: the curve is only C^2 at the
    # knots, so difference stencils must not straddle them
    el_max = 0.0
    per_seg = max(401, n_samples // n_seg)
    for s in range(n_seg):
        seg_ts = np.linspace(knots[s], knots[s + 1], per_seg)
        seg_pos = np.column_stack(
            [f(seg_ts), g(seg_ts), p0[2] + _cumulative_product_integral(fp, g, seg_ts)]
        )
        res = el_residuals_sampled(m, seg_ts, seg_pos)
        el_max = max(el_max, float(np.max(np.abs(res))))

    area_oracle = quad(lambda t: fp(t) * g(t), 0.0, 1.0, limit=200, epsabs=1e-12, epsrel=1e-12)[0]
    endpoint_err = max(
        abs(xs[0] - p0[0]), abs(ys[0] - p0[1]), abs(zs[0] - p0[2]),
        abs(vxs[0] - p0[3]), abs(vys[0] - p0[4]), abs(vzs[0] - p0[5]),
        abs(xs[-1] - p1[0]), abs(ys[-1] - p1[1]), abs(zs[-1] - p1[2]),
        abs(vxs[-1] - p1[3]), abs(vys[-1] - p1[4]), abs(vzs[-1] - p1[5]),
    )
    membership = float(np.max(np.abs(vzs - ys * vxs)))
    certificates = {
        "endpoint_error": float(endpoint_err),
        "area_residual": float(abs(area_oracle - target)),
        "membership_residual": membership,
        "el_residual_max": el_max,
    }
    symbols = list(m.coordinates) + list(m.velocities)
    states = np.column_stack([xs, ys, zs, vxs, vys, vzs])
    traj = Trajectory(ts, symbols, states)
    return ReachResult(traj, float(A), certificates)


def _to_ppoly(b):
    from scipy.interpolate import PPoly

    return PPoly.from_bernstein_basis(b)
