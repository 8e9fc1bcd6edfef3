"""Exact Gaussian elimination over Q(i) (and Scalar right-hand sides)."""
from __future__ import annotations

from .qi import QI
from .scalar import Scalar


def rref(rows: list[list[QI]]) -> tuple[list[list[QI]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [list(r) for r in rows]
    pivots = []
    ncols = len(m[0]) if m else 0
    r = 0
    for col in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][col]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = m[r][col].inverse()
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col]:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: list[list[QI]]) -> int:
    if not rows:
        return 0
    return len(rref(rows)[1])


def left_kernel(rows: list[list[QI]]) -> list[list[QI]]:
    """Basis of ``{y : y^T M = 0}`` for the matrix with the given rows."""
    n = len(rows)
    if n == 0:
        return []
    ncols = len(rows[0])
    # transpose and take the right kernel
    t = [[rows[i][j] for i in range(n)] for j in range(ncols)]
    return right_kernel(t, n)


def right_kernel(rows: list[list[QI]], ncols: int) -> list[list[QI]]:
    if not rows:
        return [[QI(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    m, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [QI(0)] * ncols
        v[f] = QI(1)
        for r, p in enumerate(pivots):
            v[p] = -m[r][f]
        basis.append(v)
    return basis


def in_row_space(vec: list[QI], rows: list[list[QI]]) -> bool:
    return rank(rows + [vec]) == rank(rows)


def solve_affine(equations) -> dict:
    """Solve ``sum_k c_k u_k + rest = 0`` for uniquely determined unknowns.

    ``equations`` is a list of ``(coeffs, rest)`` with ``coeffs`` a mapping
    from unknown key to QI and ``rest`` a :class:`Scalar`.
    """
    keys = sorted({k for coeffs, _ in equations for k in coeffs})
    if not keys:
        return {}
    rows = []
    for coeffs, rest in equations:
        rows.append([QI.coerce(coeffs.get(k, 0)) if not isinstance(coeffs.get(k, 0), QI) else coeffs[k]
                     for k in keys] + [rest])
    nk = len(keys)
    # elimination with Scalar in the last column
    m = rows
    pivots = []
    r = 0
    for col in range(nk):
        p = next((i for i in range(r, len(m)) if m[i][col]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = m[r][col].inverse()
        m[r] = [x * inv for x in m[r][:nk]] + [m[r][nk] * Scalar.const(inv)]
        for i in range(len(m)):
            if i != r and m[i][col]:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i][:nk], m[r][:nk])] + [m[i][nk] - m[r][nk] * Scalar.const(f)]
        pivots.append(col)
        r += 1
    out = {}
    for i, col in enumerate(pivots):
        if all(not m[i][j] for j in range(nk) if j != col):
            out[keys[col]] = -m[i][nk]
    return out
