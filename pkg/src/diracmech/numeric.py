"""Compiled numeric evaluation of rational expressions and the RK4 runner.

Expressions are flattened into coefficient/exponent arrays so the hot loops
are plain float array code.  Two backends evaluate them: numba-compiled
kernels (default) and a pure-numpy fallback, selected by the environment
variable DIRAC_MECH_PURE_NUMPY=1.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .symexpr import RationalExpr, Symbol


def use_pure_numpy() -> bool:
    return os.environ.get("DIRAC_MECH_PURE_NUMPY", "") == "1"


def _poly_arrays(poly, var_index: dict[int, int], params: dict[Symbol, float]):
    """Flatten a polynomial into (coeffs, exps) over the state variables,
    folding fixed parameter values into the coefficients."""
    n_vars = len(var_index)
    coeffs, rows = [], []
    param_index = {s.index: v for s, v in params.items()}
    for exps, c in sorted(poly.terms.items()):
        coeff = float(c)
        row = [0] * n_vars
        for i, e in enumerate(exps):
            if not e:
                continue
            if i in var_index:
                row[var_index[i]] = e
            elif i in param_index:
                coeff *= param_index[i] ** e
            else:
                name = poly.table.by_index(i).name
                raise ValueError(f"symbol {name} is neither a state variable nor a parameter")
        coeffs.append(coeff)
        rows.append(row)
    if not coeffs:  # zero polynomial
        coeffs, rows = [0.0], [[0] * n_vars]
    return np.asarray(coeffs, dtype=np.float64), np.asarray(rows, dtype=np.int64)


@dataclass
class CompiledVector:
    """A list of rational expressions compiled against an ordered state
    vector; evaluates all components at once."""

    variables: list[Symbol]
    num_coeffs: np.ndarray
    num_exps: np.ndarray
    num_starts: np.ndarray
    den_coeffs: np.ndarray
    den_exps: np.ndarray
    den_starts: np.ndarray

    @classmethod
    def compile(
        cls,
        exprs: list[RationalExpr],
        variables: list[Symbol],
        params: dict[Symbol, float] | None = None,
    ) -> "CompiledVector":
        params = params or {}
        var_index = {s.index: k for k, s in enumerate(variables)}
        nc, ne, ns = [], [], [0]
        dc, de, ds = [], [], [0]
        for e in exprs:
            c, x = _poly_arrays(e.num, var_index, params)
            nc.append(c)
            ne.append(x)
            ns.append(ns[-1] + len(c))
            c, x = _poly_arrays(e.den, var_index, params)
            dc.append(c)
            de.append(x)
            ds.append(ds[-1] + len(c))
        return cls(
            list(variables),
            np.concatenate(nc),
            np.concatenate(ne),
            np.asarray(ns, dtype=np.int64),
            np.concatenate(dc),
            np.concatenate(de),
            np.asarray(ds, dtype=np.int64),
        )

    @property
    def n_components(self) -> int:
        return len(self.num_starts) - 1

    def __call__(self, state: np.ndarray) -> np.ndarray:
        if use_pure_numpy():
            return _eval_vector_numpy(self, state)
        from . import _kernels

        out = np.empty(self.n_components)
        _kernels.eval_vector(
            self.num_coeffs, self.num_exps, self.num_starts,
            self.den_coeffs, self.den_exps, self.den_starts,
            np.asarray(state, dtype=np.float64), out,
        )
        return out

    def eval_many(self, states: np.ndarray) -> np.ndarray:
        """Vectorized evaluation over an (n_states, n_vars) array; used for
        post-hoc monitor computation."""
        states = np.asarray(states, dtype=np.float64)
        num = _eval_terms_batch(self.num_coeffs, self.num_exps, states)
        den = _eval_terms_batch(self.den_coeffs, self.den_exps, states)
        out = np.empty((len(states), self.n_components))
        for i in range(self.n_components):
            out[:, i] = num[:, self.num_starts[i]:self.num_starts[i + 1]].sum(axis=1) / \
                den[:, self.den_starts[i]:self.den_starts[i + 1]].sum(axis=1)
        return out


def _eval_terms_batch(coeffs, exps, states):
    # states: (m, v); exps: (t, v) -> (m, t)
    return coeffs[None, :] * np.prod(states[:, None, :] ** exps[None, :, :], axis=2)


def _eval_vector_numpy(cv: CompiledVector, state) -> np.ndarray:
    state = np.asarray(state, dtype=np.float64)
    num = cv.num_coeffs * np.prod(state[None, :] ** cv.num_exps, axis=1)
    den = cv.den_coeffs * np.prod(state[None, :] ** cv.den_exps, axis=1)
    out = np.empty(cv.n_components)
    for i in range(cv.n_components):
        out[i] = num[cv.num_starts[i]:cv.num_starts[i + 1]].sum() / \
            den[cv.den_starts[i]:cv.den_starts[i + 1]].sum()
    return out


def rk4(field: CompiledVector, y0: np.ndarray, dt: float, n_steps: int) -> np.ndarray:
    """Fixed-step classical Runge-Kutta; returns states of shape
    (n_steps + 1, dim) including the initial state."""
    y0 = np.asarray(y0, dtype=np.float64)
    if use_pure_numpy():
        return _rk4_python(field, y0, dt, n_steps)
    from . import _kernels

    out = np.empty((n_steps + 1, len(y0)))
    out[0] = y0
    _kernels.rk4_run(
        field.num_coeffs, field.num_exps, field.num_starts,
        field.den_coeffs, field.den_exps, field.den_starts,
        dt, out,
    )
    return out


def _rk4_python(field, y0, dt, n_steps):
    out = np.empty((n_steps + 1, len(y0)))
    out[0] = y0
    y = y0.copy()
    for k in range(n_steps):
        k1 = field(y)
        k2 = field(y + 0.5 * dt * k1)
        k3 = field(y + 0.5 * dt * k2)
        k4 = field(y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = y
    return out
