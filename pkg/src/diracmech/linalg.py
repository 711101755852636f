"""Small exact linear algebra over the rational-function field.

Matrices are lists of lists of RationalExpr.  Pivot selection is
stratum-aware: an entry may only be used as a pivot (or divisor) when the
stratum certifies it nonvanishing.  Sizes in scope are tiny (k <= 6), so
Gaussian elimination and cofactor expansion are fine.
"""

from __future__ import annotations

from .strata import Stratum
from .symexpr import RationalExpr, SymbolTable

Matrix = list[list[RationalExpr]]


class PivotError(ValueError):
    """No admissible (certified nonvanishing) pivot on the given stratum."""


def zeros(table: SymbolTable, rows: int, cols: int) -> Matrix:
    z = RationalExpr.constant(table, 0)
    return [[z for _ in range(cols)] for _ in range(rows)]


def identity(table: SymbolTable, n: int) -> Matrix:
    m = zeros(table, n, n)
    one = RationalExpr.constant(table, 1)
    for i in range(n):
        m[i][i] = one
    return m


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    rows, inner, cols = len(a), len(b), len(b[0])
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = a[i][0] * b[0][j]
            for k in range(1, inner):
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)]


def determinant(a: Matrix) -> RationalExpr:
    """Exact determinant by cofactor expansion along the column with the most
    structural zeros."""
    n = len(a)
    table = a[0][0].table
    if n == 1:
        return a[0][0]
    best_col = max(range(n), key=lambda j: sum(a[i][j].is_zero() for i in range(n)))
    out = RationalExpr.constant(table, 0)
    for i in range(n):
        entry = a[i][best_col]
        if entry.is_zero():
            continue
        minor = [[a[r][c] for c in range(n) if c != best_col] for r in range(n) if r != i]
        cof = entry * determinant(minor)
        out = out + cof if (i + best_col) % 2 == 0 else out - cof
    return out


def _pick_pivot(a: Matrix, row0: int, used_cols: set[int], stratum: Stratum, n_cols: int):
    n_rows = len(a)
    # prefer nonzero constants, then stratum-certified nonvanishing entries
    for constant_pass in (True, False):
        for j in range(n_cols):
            if j in used_cols:
                continue
            for i in range(row0, n_rows):
                e = a[i][j]
                if e.is_zero():
                    continue
                if constant_pass and not e.is_constant():
                    continue
                if e.is_constant() or stratum.certifies_nonzero(e):
                    return i, j
    return None


def row_reduce(
    a: Matrix, stratum: Stratum | None = None, max_pivot_cols: int | None = None
) -> tuple[Matrix, list[int]]:
    """Stratum-aware reduced row echelon form.  Returns (rref, pivot_cols).

    Pivots are restricted to the first max_pivot_cols columns (all by
    default); raises PivotError if a nonzero row (within the pivot block)
    remains with no certifiable pivot.
    """
    stratum = stratum if stratum is not None else Stratum("everywhere")
    m = [list(row) for row in a]
    n_rows = len(m)
    n_piv = len(m[0]) if max_pivot_cols is None else max_pivot_cols
    pivots: list[int] = []
    used: set[int] = set()
    row = 0
    while row < n_rows:
        pick = _pick_pivot(m, row, used, stratum, n_piv)
        if pick is None:
            for i in range(row, n_rows):
                if any(not e.is_zero() for e in m[i][:n_piv]):
                    raise PivotError(
                        "no admissible pivot on stratum "
                        f"{stratum.name or stratum.describe()} in row {i}: "
                        + ", ".join(str(e) for e in m[i] if not e.is_zero())
                    )
            break
        i, j = pick
        m[row], m[i] = m[i], m[row]
        piv = m[row][j]
        m[row] = [e / piv for e in m[row]]
        for k in range(n_rows):
            if k == row:
                continue
            factor = m[k][j]
            if factor.is_zero():
                continue
            m[k] = [e - factor * x for e, x in zip(m[k], m[row])]
        pivots.append(j)
        used.add(j)
        row += 1
    return m, pivots


def null_space(a: Matrix, stratum: Stratum | None = None) -> list[list[RationalExpr]]:
    """Basis of the right null space {v : a v = 0}, free variables in column
    order, each basis vector having a 1 in its free slot."""
    table = a[0][0].table
    n_cols = len(a[0])
    rref, pivots = row_reduce(a, stratum)
    free = [j for j in range(n_cols) if j not in pivots]
    basis = []
    one = RationalExpr.constant(table, 1)
    zero = RationalExpr.constant(table, 0)
    for f in free:
        v = [zero] * n_cols
        v[f] = one
        for r, pc in enumerate(pivots):
            v[pc] = -rref[r][f]
        basis.append(v)
    return basis


def invert(a: Matrix, stratum: Stratum | None = None) -> Matrix:
    """Exact inverse by Gaussian elimination with stratum-certified pivots."""
    n = len(a)
    table = a[0][0].table
    aug = [list(row) + list(idrow) for row, idrow in zip(a, identity(table, n))]
    rref, pivots = row_reduce(aug, stratum, max_pivot_cols=n)
    if sorted(pivots) != list(range(n)):
        raise PivotError("matrix is not invertible on the given stratum")
    # reorder rows so pivot i sits in row i
    out = [None] * n
    for r, pc in enumerate(pivots):
        out[pc] = rref[r][n:]
    return out


def numeric_rank(a: Matrix, point, tol: float = 1e-8) -> int:
    import numpy as np

    vals = np.array([[e.eval_at(point) for e in row] for row in a], dtype=float)
    return int(np.linalg.matrix_rank(vals, tol=tol))
