"""Exact Gaussian elimination over a :class:`~jointkit.field.Field`.

Matrices are lists of rows of raw field values.  Pivoting is deterministic:
the pivot in each column is the first row (from the top of the unreduced
block) with a nonzero entry.  Large systems over F_p are eliminated with
vectorised int64 arithmetic; the pivot rule is the same, so results agree
with the pure-Python path.
"""

from __future__ import annotations

import numpy as np

from .field import Field, PrimeField

# below this many entries the pure-Python path is faster than numpy setup
_NUMPY_MIN_ENTRIES = 4096


def _rref_python(rows, field: Field):
    M = [list(r) for r in rows]
    nrows = len(M)
    ncols = len(M[0]) if M else 0
    pivots = []
    r = 0
    red = field.reduce
    for c in range(ncols):
        if r == nrows:
            break
        piv = None
        for i in range(r, nrows):
            if red(M[i][c]) != 0:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            M[r], M[piv] = M[piv], M[r]
        inv = field.inv(M[r][c])
        M[r] = [red(v * inv) for v in M[r]]
        prow = M[r]
        for i in range(nrows):
            if i == r:
                continue
            f = M[i][c]
            if red(f) == 0:
                continue
            row = M[i]
            M[i] = [red(row[j] - f * prow[j]) if prow[j] else row[j] for j in range(ncols)]
        pivots.append(c)
        r += 1
    return M, pivots


def _rref_numpy(rows, field: PrimeField):
    p = field.p
    A = np.array([[int(v) % p for v in r] for r in rows], dtype=np.int64)
    nrows, ncols = A.shape
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        inv = field.inv(int(A[r, c]))
        A[r] = (A[r] * inv) % p
        col = A[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            A[hit] = (A[hit] - np.outer(col[hit], A[r])) % p
        pivots.append(c)
        r += 1
    return [[int(v) for v in row] for row in A], pivots


def rref(rows, field: Field):
    """Reduced row echelon form.  Returns ``(R, pivot_columns)``."""
    rows = list(rows)
    if not rows:
        return [], []
    size = len(rows) * len(rows[0])
    if isinstance(field, PrimeField) and size >= _NUMPY_MIN_ENTRIES:
        return _rref_numpy(rows, field)
    return _rref_python(rows, field)


def rank(rows, field: Field) -> int:
    rows = [r for r in rows]
    if not rows or not rows[0]:
        return 0
    return len(rref(rows, field)[1])


def nullspace(rows, ncols: int, field: Field) -> list[list]:
    """Basis of {v : A v = 0}, one vector per free column (free entry = 1)."""
    if not rows:
        return [[field.one if j == i else field.zero for j in range(ncols)] for i in range(ncols)]
    R, pivots = rref(rows, field)
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [field.zero] * ncols
        v[f] = field.one
        for i, c in enumerate(pivots):
            v[c] = field.reduce(-R[i][f])
        basis.append(v)
    return basis


def solve(A, b, field: Field):
    """One solution x of A x = b, or ``None`` when the system is inconsistent."""
    if not A:
        return None if any(field.reduce(v) != 0 for v in b) else []
    ncols = len(A[0])
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, pivots = rref(aug, field)
    if ncols in pivots:
        return None
    x = [field.zero] * ncols
    for i, c in enumerate(pivots):
        x[c] = R[i][ncols]
    return x


def inverse(M, field: Field):
    n = len(M)
    aug = [list(row) + [field.one if i == j else field.zero for j in range(n)] for i, row in enumerate(M)]
    R, pivots = rref(aug, field)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ValueError("matrix is singular")
    return [row[n:] for row in R]


def transpose(M):
    return [list(col) for col in zip(*M)]


def matvec(M, v, field: Field):
    return [field.reduce(sum(a * b for a, b in zip(row, v))) for row in M]


def columns_to_matrix(cols, n: int):
    """n x k matrix whose columns are the given vectors."""
    return [[col[i] for col in cols] for i in range(n)]
