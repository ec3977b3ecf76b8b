"""Scalar modes and exact-rational linear algebra helpers.

Every computation in this package runs either in ``exact`` mode (arbitrary
precision :class:`fractions.Fraction`) or in ``float`` mode (double
precision).  The two modes never mix inside one computation; coercion
happens only at explicit conversion points.
"""

from __future__ import annotations

import math
from fractions import Fraction

EXACT = "exact"
FLOAT = "float"

Scalar = Fraction | float


class ModeError(TypeError):
    """Exact and float scalars were mixed inside one computation."""


class ExactnessError(ArithmeticError):
    """An exact-mode computation would require an irrational value."""


def coerce(value, mode: str) -> Scalar:
    """Coerce ``value`` into the scalar type of ``mode``."""
    if mode == EXACT:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        raise ModeError(f"exact mode requires int/Fraction scalars, got {type(value).__name__}")
    if isinstance(value, (int, float, Fraction)):
        return float(value)
    raise ModeError(f"float mode requires numeric scalars, got {type(value).__name__}")


def zero(mode: str) -> Scalar:
    return Fraction(0) if mode == EXACT else 0.0


def one(mode: str) -> Scalar:
    return Fraction(1) if mode == EXACT else 1.0


def _int_nth_root(m: int, n: int) -> int | None:
    """Exact integer n-th root of m >= 0, or None if m is not a perfect power."""
    if m < 0:
        raise ValueError("negative radicand")
    if m in (0, 1):
        return m
    if n == 1:
        return m
    if n == 2:
        r = math.isqrt(m)
        return r if r * r == m else None
    r = round(m ** (1.0 / n))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**n == m:
            return cand
    return None


def rational_nth_root(q: Fraction, n: int) -> Fraction:
    """Real n-th root of a rational, exact or raising ExactnessError.

    For odd n the sign of q is preserved; for even n, q must be >= 0.
    """
    q = Fraction(q)
    neg = q < 0
    if neg and n % 2 == 0:
        raise ExactnessError("even root of a negative rational")
    num = _int_nth_root(abs(q.numerator), n)
    den = _int_nth_root(q.denominator, n)
    if num is None or den is None:
        raise ExactnessError(f"{q} has no rational {n}-th root; use float mode")
    root = Fraction(num, den)
    return -root if neg else root


def rational_sqrt(q: Fraction) -> Fraction:
    return rational_nth_root(q, 2)


def scalar_nth_root(value: Scalar, n: int, mode: str) -> Scalar:
    if mode == EXACT:
        return rational_nth_root(value, n)
    v = float(value)
    return math.copysign(abs(v) ** (1.0 / n), v) if n % 2 else v ** (1.0 / n)


# ---------------------------------------------------------------------------
# Small dense linear algebra over either scalar type (lists of lists).
# Sizes here are at most 48x48, so plain Gaussian elimination is fine.
# ---------------------------------------------------------------------------


def det(rows) -> Scalar:
    """Determinant by Gaussian elimination; exact when entries are Fractions."""
    n = len(rows)
    a = [list(r) for r in rows]
    exact = n > 0 and isinstance(a[0][0], Fraction)
    sign = 1
    prod = Fraction(1) if exact else 1.0
    for col in range(n):
        piv = None
        if exact:
            for r in range(col, n):
                if a[r][col] != 0:
                    piv = r
                    break
        else:
            piv = max(range(col, n), key=lambda r: abs(a[r][col]))
            if a[piv][col] == 0:
                piv = None
        if piv is None:
            return Fraction(0) if exact else 0.0
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            sign = -sign
        pivot = a[col][col]
        prod *= pivot
        inv = 1 / pivot if exact else 1.0 / pivot
        for r in range(col + 1, n):
            factor = a[r][col] * inv
            if factor:
                row_r, row_c = a[r], a[col]
                for c in range(col, n):
                    row_r[c] -= factor * row_c[c]
    return sign * prod


def submatrix_det(rows, row_idx, col_idx) -> Scalar:
    k = len(row_idx)
    if k == 0:
        return Fraction(1) if isinstance(rows[0][0], Fraction) else 1.0
    if k == 1:
        return rows[row_idx[0]][col_idx[0]]
    if k == 2:
        (r0, r1), (c0, c1) = row_idx, col_idx
        return rows[r0][c0] * rows[r1][c1] - rows[r0][c1] * rows[r1][c0]
    return det([[rows[r][c] for c in col_idx] for r in row_idx])


def invert(rows):
    """Inverse by Gauss-Jordan elimination, exact on Fractions."""
    n = len(rows)
    exact = isinstance(rows[0][0], Fraction)
    a = [list(r) + [Fraction(int(i == j)) if exact else float(i == j) for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        piv = None
        if exact:
            for r in range(col, n):
                if a[r][col] != 0:
                    piv = r
                    break
        else:
            piv = max(range(col, n), key=lambda r: abs(a[r][col]))
            if a[piv][col] == 0:
                piv = None
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
        pivot = a[col][col]
        a[col] = [x / pivot for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                factor = a[r][col]
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    return tuple(tuple(row[n:]) for row in a)


def rref(rows):
    """Reduced row echelon form, returning (rref_rows, pivot_columns)."""
    if not rows:
        return [], []
    a = [list(r) for r in rows]
    nrow, ncol = len(a), len(a[0])
    exact = isinstance(a[0][0], Fraction)
    pivots = []
    r = 0
    for c in range(ncol):
        if r >= nrow:
            break
        piv = None
        if exact:
            for rr in range(r, nrow):
                if a[rr][c] != 0:
                    piv = rr
                    break
        else:
            piv = max(range(r, nrow), key=lambda rr: abs(a[rr][c]))
            if abs(a[piv][c]) < 1e-12:
                piv = None
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        pivot = a[r][c]
        a[r] = [x / pivot for x in a[r]]
        for rr in range(nrow):
            if rr != r and a[rr][c]:
                factor = a[rr][c]
                a[rr] = [x - factor * y for x, y in zip(a[rr], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(rows) -> int:
    return len(rref(rows)[1])


def nullspace(rows):
    """Basis of the right kernel of an exact matrix, as a list of tuples."""
    if not rows:
        return []
    ncol = len(rows[0])
    red, pivots = rref(rows)
    free = [c for c in range(ncol) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncol
        vec[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -red[r][fc]
        basis.append(tuple(vec))
    return basis


def is_positive_definite_exact(rows) -> bool:
    """Sylvester criterion on a symmetric matrix of Fractions."""
    n = len(rows)
    for k in range(1, n + 1):
        idx = tuple(range(k))
        if submatrix_det(rows, idx, idx) <= 0:
            return False
    return True


def mat_vec(rows, vec):
    return tuple(sum(r[j] * vec[j] for j in range(len(vec))) for r in rows)


def mat_mul(a, b):
    n, m, p = len(a), len(b), len(b[0])
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(m)) for j in range(p)) for i in range(n))


def mat_transpose(a):
    return tuple(tuple(row[i] for row in a) for i in range(len(a[0])))
