"""Exact linear algebra over Gaussian rationals.

Small dense systems only (resonant order solves and indicial systems).
Elimination is deterministic: pivots are chosen as the first nonzero entry
in column order, so identical inputs give identical solutions.
"""

from __future__ import annotations

from .errors import LogsingError
from .scalar import QQi


class InconsistentSystemError(LogsingError):
    kind = "inconsistent-system"


def solve_linear_system(rows, rhs, ncols=None):
    """Solve A x = b exactly; free variables are set to zero.

    rows: list of lists of QQi (the matrix A, row-major); rhs: list of QQi.
    ncols fixes the variable count when rows may be empty.
    Returns (solution: list of QQi, free_indices: list of int).
    Raises InconsistentSystemError when no solution exists.
    """
    nrows = len(rows)
    if ncols is None:
        ncols = len(rows[0]) if nrows else 0
    a = [[QQi.of(v) for v in row] for row in rows]
    b = [QQi.of(v) for v in rhs]
    if len(b) != nrows:
        raise LogsingError("matrix/right-hand-side size mismatch")

    pivot_of_col = {}
    prow = 0
    for col in range(ncols):
        sel = None
        for r in range(prow, nrows):
            if not a[r][col].is_zero():
                sel = r
                break
        if sel is None:
            continue
        if sel != prow:
            a[prow], a[sel] = a[sel], a[prow]
            b[prow], b[sel] = b[sel], b[prow]
        inv = QQi.of(1) / a[prow][col]
        a[prow] = [v * inv for v in a[prow]]
        b[prow] = b[prow] * inv
        for r in range(nrows):
            if r != prow and not a[r][col].is_zero():
                f = a[r][col]
                a[r] = [a[r][c] - f * a[prow][c] for c in range(ncols)]
                b[r] = b[r] - f * b[prow]
        pivot_of_col[col] = prow
        prow += 1
        if prow == nrows:
            break

    for r in range(nrows):
        if all(v.is_zero() for v in a[r]) and not b[r].is_zero():
            raise InconsistentSystemError(
                "linear system is inconsistent (no solution)")

    x = [QQi.of(0)] * ncols
    free = [c for c in range(ncols) if c not in pivot_of_col]
    for col, r in pivot_of_col.items():
        x[col] = b[r]
    return x, free
