"""Command-line front end.

Exit codes: 0 success; 1 bad input; 2 verification failure; 3 numeric event
(stratum exit or singular evaluation).
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import dirac, dynamics, legendre, linalg, report
from .modelfile import ModelError, load_model
from .strata import TAU_EQ
from .symexpr import ExprError, ParseError, SingularPointError, parse_expr

EXIT_OK = 0
EXIT_BAD_INPUT = 1
EXIT_VERIFY_FAIL = 2
EXIT_NUMERIC_EVENT = 3


def default_seed() -> int:
    return int(os.environ.get("DIRAC_MECH_SEED", "0"))


def _load(path: str):
    m = load_model(path)
    a = report.run_analysis(m)
    return m, a


def cmd_analyze(args) -> int:
    m, a = _load(args.model)
    if args.json:
        print(report.report_json(a))
    else:
        print(report.report_text(a), end="")
    return EXIT_OK


def cmd_bracket(args) -> int:
    m, a = _load(args.model)
    f = parse_expr(args.f, m.table)
    g = parse_expr(args.g, m.table)
    if args.dirac:
        cs = _system_with_generators(a, args.stratum)
        dd = dirac.dirac_data(cs, a.ps)
        print(dirac.dirac_bracket(f, g, dd, a.ps))
    else:
        from .phase import poisson_bracket

        print(poisson_bracket(f, g, a.ps))
    return EXIT_OK


def _system_with_generators(a, stratum_name=None):
    for cs in a.systems:
        if stratum_name is not None:
            if cs.stratum.name == stratum_name:
                return cs
        elif cs.generators:
            return cs
    raise ModelError(
        f"no constraint system {'named ' + stratum_name if stratum_name else 'with generators'}"
    )


def _rank_stratum(a, stratum_name=None):
    if stratum_name is None:
        return a.rank_strata[0], a.systems[0], a.hamiltonians[0]
    for rs, cs, h in zip(a.rank_strata, a.systems, a.hamiltonians):
        if rs.stratum.name == stratum_name:
            return rs, cs, h
    raise ModelError(f"no stratum named {stratum_name!r}")


def cmd_classify(args) -> int:
    m, a = _load(args.model)
    for rs, cls in zip(a.rank_strata, a.classifications):
        print(f"stratum {rs.stratum.name}:")
        if not cls:
            print("  no constraints")
        for c in cls:
            labels = "; ".join(
                f"{lab} everywhere" if cond == "everywhere" else f"{lab} where {cond}"
                for lab, cond in c.labels()
            )
            print(f"  {c.generator}: {labels}")
    return EXIT_OK


def cmd_modify(args) -> int:
    m, a = _load(args.model)
    f = parse_expr(args.f, m.table)
    cs = _system_with_generators(a, args.stratum)
    dd = dirac.dirac_data(cs, a.ps)
    print(dirac.modify_first_class(f, dd, a.ps))
    return EXIT_OK


def _parse_init(text: str, table):
    out = {}
    for item in text.split(","):
        if "=" not in item:
            raise ModelError(f"bad --init item {item!r} (expected name=value)")
        k, v = item.split("=", 1)
        out[table.get(k.strip())] = float(v)
    return out


def cmd_integrate(args) -> int:
    m, a = _load(args.model)
    rs, cs, h = _rank_stratum(a, args.stratum)
    init = _parse_init(args.init, m.table)
    params = m.parameter_values()
    monitors = {}
    if args.lagrangian:
        exprs, variables = dynamics.lagrangian_flow_exprs(m, rs)
        monitors["energy"] = legendre.energy(m)
    else:
        exprs, variables = dynamics.hamiltonian_flow_exprs(h, a.ps)
        monitors["energy"] = h
        for i, g in enumerate(cs.generators):
            monitors[f"constraint_{i}"] = g
        # complete the state via the constraint graph (projects onto the
        # constraint set); the graph-free symbols must all be supplied
        solved = set(cs.graph.solved_symbols())
        missing = [s.name for s in variables if s not in solved and s not in init]
        if missing:
            raise ModelError(f"--init missing values for {', '.join(missing)}")
        init = cs.graph.numeric_bindings(init)
    for name in sorted(m.symmetries):
        r = a.symmetry_results[name]
        if r["invariant"]:
            monitors[f"momentum_{name}"] = dynamics.noether(m, m.symmetries[name])[1]
    guards = list(rs.stratum.signs) + [(e, 0) for e in rs.stratum.nonvanishing]
    guards = [(e, s) for e, s in guards]
    # evaluate sign of nonvanishing guards at the start so flips are caught
    fixed_guards = []
    try:
        for e, s in guards:
            if s == 0:
                v = e.eval_at(init)
                s = 1 if v > 0 else -1
            fixed_guards.append((e, s))
        traj = dynamics.integrate_field(
            exprs, variables, init, args.t, args.dt, monitors=monitors,
            guards=fixed_guards, params=params,
        )
    except SingularPointError as e:
        print(f"numeric event: {e}", file=sys.stderr)
        return EXIT_NUMERIC_EVENT
    traj.write_csv(args.out)
    if traj.event:
        print(f"numeric event: {traj.event}", file=sys.stderr)
        return EXIT_NUMERIC_EVENT
    return EXIT_OK


def cmd_reach(args) -> int:
    m, a = _load(args.model)
    p0 = [float(v) for v in args.frm.split(",")]
    p1 = [float(v) for v in args.to.split(",")]
    if len(p0) != 6 or len(p1) != 6:
        raise ModelError("--from/--to must be x,y,z,vx,vy,vz")
    result = dynamics.reach_connect(p0, p1, m, n_seg=args.n_seg)
    result.trajectory.write_csv(args.out)
    for k in sorted(result.certificates):
        print(f"{k}: {result.certificates[k]:.3e}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


class _Checks:
    def __init__(self):
        self.failures = []
        self.count = 0

    def check(self, name: str, ok: bool, detail: str = ""):
        self.count += 1
        if not ok:
            self.failures.append((name, detail))


def _expr_list_equal(got, expected_strs, table):
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


def run_verify(m, a) -> _Checks:
    ch = _Checks()
    known = m.known
    table = m.table
    by_name = {rs.stratum.name: i for i, rs in enumerate(a.rank_strata)}

    for sname, exprs in known.get("constraints", {}).items():
        i = by_name.get(sname)
        ch.check(
            f"constraints[{sname}]",
            i is not None and _expr_list_equal(a.systems[i].generators, exprs, table),
            f"got {[str(g) for g in a.systems[i].generators] if i is not None else 'missing stratum'}",
        )
    for sname, mat in known.get("bracket_matrix", {}).items():
        i = by_name.get(sname)
        ok = i is not None
        if ok:
            S = a.bracket_matrices[i]
            ok = len(S) == len(mat) and all(
                (S[r][c] - parse_expr(mat[r][c], table)).is_zero()
                for r in range(len(mat))
                for c in range(len(mat))
            )
        ch.check(f"bracket_matrix[{sname}]", ok)
    for sname, hstr in known.get("hamiltonians", {}).items():
        i = by_name.get(sname)
        ch.check(
            f"hamiltonian[{sname}]",
            i is not None and (a.hamiltonians[i] - parse_expr(hstr, table)).is_zero(),
            f"got {a.hamiltonians[i] if i is not None else 'missing stratum'}",
        )
    for fstr, gstr, expected in known.get("brackets", []):
        from .phase import poisson_bracket

        b = poisson_bracket(parse_expr(fstr, table), parse_expr(gstr, table), a.ps)
        ch.check(f"bracket[{fstr},{gstr}]", (b - parse_expr(expected, table)).is_zero(), f"got {b}")

    dd = None
    try:
        cs2 = next(cs for cs in a.systems if cs.generators)
        dd = dirac.dirac_data(cs2, a.ps)
    except (StopIteration, dirac.DiracError, linalg.PivotError):
        pass
    if dd is not None:
        err = linalg.mat_sub(linalg.mat_mul(dd.A, dd.S), linalg.identity(table, len(dd.S)))
        ch.check("A.S=I", all(dd.graph.reduces_to_zero(e) for row in err for e in row))
        for fstr, gstr, expected in known.get("dirac_brackets", []):
            b = dirac.dirac_bracket(parse_expr(fstr, table), parse_expr(gstr, table), dd, a.ps)
            ch.check(
                f"dirac_bracket[{fstr},{gstr}]",
                (b - parse_expr(expected, table)).is_zero(),
                f"got {b}",
            )
        for fstr, expected in known.get("modified", {}).items():
            fs = dirac.modify_first_class(parse_expr(fstr, table), dd, a.ps)
            ch.check(f"modified[{fstr}]", (fs - parse_expr(expected, table)).is_zero(), f"got {fs}")
        # invariant suite: f* agrees weakly with f and is weakly first class
        from .phase import poisson_bracket

        rng = np.random.default_rng(default_seed())
        samples = [parse_expr(s, table) for s in ("1", "x")] if "x" in table else []
        for q in a.model.coordinates[:3]:
            samples.append(parse_expr(q.name, table))
        for f in samples:
            fs = dirac.modify_first_class(f, dd, a.ps)
            ch.check(f"f*~f[{f}]", dd.graph.reduces_to_zero(fs - f))
            for c in dd.generators:
                ch.check(
                    f"{{f*,c}}~0[{f}]",
                    dd.graph.reduces_to_zero(poisson_bracket(fs, c, a.ps)),
                )
    for fstr in known.get("first_class", []):
        r = dirac.first_class_tangency(parse_expr(fstr, table), a.c_systems, a.ps)
        ch.check(f"first_class[{fstr}]", r.passed,
                 "; ".join(f"X({w.equality})={w.residual} on {w.stratum_name}" for w in r.witnesses))
    for fstr in known.get("not_first_class", []):
        r = dirac.first_class_tangency(parse_expr(fstr, table), a.c_systems, a.ps)
        ch.check(f"not_first_class[{fstr}]", not r.passed)
    if "orbit_count" in known:
        ch.check("orbit_count", len(a.orbit_set) == known["orbit_count"],
                 f"got {len(a.orbit_set)}")
    if "reduced_class_count" in known:
        ch.check(
            "reduced_class_count",
            len(a.reduced.classes) == known["reduced_class_count"],
            f"got {len(a.reduced.classes)}",
        )
    # structural invariants
    omega = legendre.lagrange_two_form(m)
    ch.check(
        "omega_antisymmetric",
        all((omega[i][j] + omega[j][i]).is_zero() for i in range(len(omega)) for j in range(len(omega))),
    )
    for name, X in sorted(m.symmetries.items()):
        cert, mom = dynamics.noether(m, X)
        ch.check(f"noether[{name}]", cert.is_zero(), f"witness {cert}")
    if m.reduction_chart is not None:
        try:
            dynamics.reduction_chart_verify(m.reduction_chart, a.hamiltonians[0], a.ps)
            ch.check("reduction_chart", True)
        except dynamics.ChartError as e:
            ch.check("reduction_chart", False, str(e))
    if m.initial_data and len(m.coordinates) == 3:
        # sample the initial-data conditions along constructed solutions
        try:
            r = dynamics.reach_connect([0, 0, 0, 1, 0, 0], [1, 1, 1, 0.5, 0.25, 0.5], m)
            from .numeric import CompiledVector

            cv = CompiledVector.compile(m.initial_data, r.trajectory.symbols)
            vals = cv.eval_many(r.trajectory.states)
            ch.check("initial_data", float(np.max(np.abs(vals))) < 1e-8,
                     f"max residual {float(np.max(np.abs(vals))):.3e}")
        except dynamics.DynamicsError:
            pass
    return ch


def cmd_verify(args) -> int:
    m, a = _load(args.model)
    ch = run_verify(m, a)
    if ch.failures:
        for name, detail in ch.failures:
            print(f"FAIL {name}" + (f": {detail}" if detail else ""), file=sys.stderr)
        print(f"{len(ch.failures)} of {ch.count} checks failed", file=sys.stderr)
        return EXIT_VERIFY_FAIL
    print(f"ok: {ch.count} checks passed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dirac-mech",
        description="Symbolic and numeric workbench for degenerate Lagrangian systems",
    )
    sub = p.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="full analysis report")
    pa.add_argument("model")
    pa.add_argument("--json", action="store_true")
    pa.set_defaults(fn=cmd_analyze)

    pb = sub.add_parser("bracket", help="Poisson or Dirac bracket of two expressions")
    pb.add_argument("model")
    pb.add_argument("--f", required=True)
    pb.add_argument("--g", required=True)
    pb.add_argument("--dirac", action="store_true")
    pb.add_argument("--stratum")
    pb.set_defaults(fn=cmd_bracket)

    pc = sub.add_parser("classify", help="constraint classes per stratum")
    pc.add_argument("model")
    pc.set_defaults(fn=cmd_classify)

    pm = sub.add_parser("modify", help="first-class modification f*")
    pm.add_argument("model")
    pm.add_argument("--f", required=True)
    pm.add_argument("--stratum")
    pm.set_defaults(fn=cmd_modify)

    pi = sub.add_parser("integrate", help="integrate a flow, write CSV")
    pi.add_argument("model")
    pi.add_argument("--init", required=True)
    pi.add_argument("--t", type=float, required=True)
    pi.add_argument("--dt", type=float, required=True)
    pi.add_argument("--out", required=True)
    group = pi.add_mutually_exclusive_group()
    group.add_argument("--hamiltonian", action="store_true", default=True)
    group.add_argument("--lagrangian", action="store_true")
    pi.add_argument("--stratum")
    pi.set_defaults(fn=cmd_integrate)

    pr = sub.add_parser("reach", help="connect two points of the zero-Lagrangian set")
    pr.add_argument("model")
    pr.add_argument("--from", dest="frm", required=True)
    pr.add_argument("--to", required=True)
    pr.add_argument("--out", required=True)
    pr.add_argument("--n-seg", type=int, default=4)
    pr.set_defaults(fn=cmd_reach)

    pv = sub.add_parser("verify", help="run the model's verification suite")
    pv.add_argument("model")
    pv.set_defaults(fn=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ModelError, ParseError, dynamics.DynamicsError, KeyError, OSError, ValueError) as e:
        if isinstance(e, SingularPointError):
            print(f"numeric event: {e}", file=sys.stderr)
            return EXIT_NUMERIC_EVENT
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
