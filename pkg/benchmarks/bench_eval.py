"""Benchmark the two numeric backends (numba kernels vs pure numpy) on the
RK4 Hamiltonian flow of the nonconstant-rank model's interior stratum.

Run:  python3 benchmarks/bench_eval.py [--steps N]
"""

import argparse
import os
import pathlib
import sys
import time

import numpy as np

ROOT = pathlib.Path(__file__).resolve().parents[1]

from diracmech.dynamics import hamiltonian_flow_exprs
from diracmech.modelfile import load_model
from diracmech.numeric import CompiledVector, rk4
from diracmech.report import run_analysis


def build_field():
    m = load_model(str(ROOT / "models" / "nonconstant_rank_b.json"))
    a = run_analysis(m)
    exprs, variables = hamiltonian_flow_exprs(a.hamiltonians[0], a.ps)
    cv = CompiledVector.compile(exprs, variables, m.parameter_values())
    t = m.table
    init = {t.get("x"): 1.0, t.get("y"): 1.0, t.get("p_x"): 1.0, t.get("p_y"): 0.0}
    y0 = np.array([init[s] for s in variables])
    return cv, y0


def time_backend(cv, y0, dt, n_steps, pure_numpy, repeats=5):
    os.environ["DIRAC_MECH_PURE_NUMPY"] = "1" if pure_numpy else ""
    rk4(cv, y0, dt, min(n_steps, 10))  # warm up (JIT compile / cache load)
    best = float("inf")
    out = None
    for _ in range(repeats):
        start = time.perf_counter()
        out = rk4(cv, y0, dt, n_steps)
        best = min(best, time.perf_counter() - start)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=100_000)
    ap.add_argument("--dt", type=float, default=1e-4)
    args = ap.parse_args(argv)

    cv, y0 = build_field()
    t_numba, out_numba = time_backend(cv, y0, args.dt, args.steps, pure_numpy=False)
    t_numpy, out_numpy = time_backend(cv, y0, args.dt, args.steps, pure_numpy=True)
    dev = float(np.max(np.abs(out_numba - out_numpy)))

    print(f"RK4 steps: {args.steps}, dt = {args.dt:g}, state dim = {len(y0)}")
    print(f"numba kernels : {t_numba:8.4f} s  ({args.steps / t_numba:12.0f} steps/s)")
    print(f"pure numpy    : {t_numpy:8.4f} s  ({args.steps / t_numpy:12.0f} steps/s)")
    print(f"speedup       : {t_numpy / t_numba:8.1f}x")
    print(f"max state deviation between backends: {dev:.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
