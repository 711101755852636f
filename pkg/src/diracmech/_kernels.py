"""Numba-compiled hot loops: flattened rational-vector evaluation and the
RK4 trajectory runner.  Imported lazily; the pure-numpy fallback in numeric.py
never touches this module."""

import numba
import numpy as np


@numba.njit(cache=True)
def _eval_into(coeffs, exps, starts, dcoeffs, dexps, dstarts, state, out):
    n = out.shape[0]
    n_vars = exps.shape[1]
    for i in range(n):
        num = 0.0
        for t in range(starts[i], starts[i + 1]):
            term = coeffs[t]
            for j in range(n_vars):
                e = exps[t, j]
                if e == 1:
                    term *= state[j]
                elif e > 1:
                    term *= state[j] ** e
            num += term
        den = 0.0
        for t in range(dstarts[i], dstarts[i + 1]):
            term = dcoeffs[t]
            for j in range(n_vars):
                e = dexps[t, j]
                if e == 1:
                    term *= state[j]
                elif e > 1:
                    term *= state[j] ** e
            den += term
        out[i] = num / den


@numba.njit(cache=True)
def eval_vector(coeffs, exps, starts, dcoeffs, dexps, dstarts, state, out):
    _eval_into(coeffs, exps, starts, dcoeffs, dexps, dstarts, state, out)


@numba.njit(cache=True)
def rk4_run(coeffs, exps, starts, dcoeffs, dexps, dstarts, dt, out):
    n_steps = out.shape[0] - 1
    dim = out.shape[1]
    y = out[0].copy()
    k1 = np.empty(dim)
    k2 = np.empty(dim)
    k3 = np.empty(dim)
    k4 = np.empty(dim)
    tmp = np.empty(dim)
    for step in range(n_steps):
        _eval_into(coeffs, exps, starts, dcoeffs, dexps, dstarts, y, k1)
        for j in range(dim):
            tmp[j] = y[j] + 0.5 * dt * k1[j]
        _eval_into(coeffs, exps, starts, dcoeffs, dexps, dstarts, tmp, k2)
        for j in range(dim):
            tmp[j] = y[j] + 0.5 * dt * k2[j]
        _eval_into(coeffs, exps, starts, dcoeffs, dexps, dstarts, tmp, k3)
        for j in range(dim):
            tmp[j] = y[j] + dt * k3[j]
        _eval_into(coeffs, exps, starts, dcoeffs, dexps, dstarts, tmp, k4)
        for j in range(dim):
            y[j] = y[j] + (dt / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
            out[step + 1, j] = y[j]
