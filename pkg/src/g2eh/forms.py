"""Exterior algebra over oriented inner-product model spaces (dims 3, 4, 7).

Forms are stored sparsely as maps from strictly increasing index tuples to
scalars.  All operations are pure; spaces and forms are immutable after
construction, so everything here is safe to evaluate in parallel over
points.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .scalars import (
    EXACT,
    FLOAT,
    ExactnessError,
    ModeError,
    coerce,
    det,
    invert,
    rational_sqrt,
    submatrix_det,
    zero,
)

ALLOWED_DIMS = (3, 4, 7)


class SpaceMismatchError(ValueError):
    """Operands live on different model spaces."""


class DegreeError(ValueError):
    """Operation requested on an unsupported form degree."""


@lru_cache(maxsize=None)
def increasing_tuples(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    return tuple(itertools.combinations(range(n), k))


@lru_cache(maxsize=None)
def basis_index(n: int, k: int) -> dict:
    return {idx: pos for pos, idx in enumerate(increasing_tuples(n, k))}


def merge_sign(left: tuple[int, ...], right: tuple[int, ...]):
    """Sign and sorted tuple for the concatenation of two increasing tuples.

    Returns (0, None) when the tuples intersect.
    """
    if set(left) & set(right):
        return 0, None
    merged = left + right
    inversions = 0
    li = len(left)
    for i, a in enumerate(left):
        # elements of `right` smaller than `a` each contribute one inversion
        inversions += sum(1 for b in right if b < a)
    return (-1) ** (inversions % 2), tuple(sorted(merged))


def permutation_sign(seq) -> int:
    seq = list(seq)
    inversions = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inversions += 1
    return (-1) ** (inversions % 2)


@lru_cache(maxsize=None)
def complement_table(n: int, k: int):
    """For each increasing (n-k)-tuple J: (J, complement Ic, sign of (Ic, J))."""
    full = set(range(n))
    out = []
    for J in increasing_tuples(n, n - k):
        Ic = tuple(sorted(full - set(J)))
        out.append((J, Ic, permutation_sign(Ic + J)))
    return tuple(out)


class ModelSpace:
    """An oriented inner-product model space of dimension 3, 4 or 7.

    The metric is a symmetric positive-definite matrix in the coordinate
    basis; ``orientation`` is the sign of the canonical basis.  ``sqrt_det``
    may be supplied by callers that know it exactly (e.g. induced metrics
    whose determinant is a perfect power).
    """

    __slots__ = ("dim", "metric", "orientation", "mode", "_inv", "_sqrt_det", "_hodge_cache", "_is_diagonal")

    def __init__(self, dim, metric, orientation=1, mode=EXACT, sqrt_det=None):
        if dim not in ALLOWED_DIMS:
            raise ValueError(f"model space dimension must be one of {ALLOWED_DIMS}")
        if orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        self.dim = dim
        self.mode = mode
        rows = tuple(tuple(coerce(x, mode) for x in row) for row in metric)
        if len(rows) != dim or any(len(r) != dim for r in rows):
            raise ValueError("metric shape does not match dimension")
        for i in range(dim):
            for j in range(i):
                if not _close(rows[i][j], rows[j][i], mode):
                    raise ValueError("metric must be symmetric")
        self.metric = rows
        self.orientation = orientation
        self._inv = None
        self._sqrt_det = coerce(sqrt_det, mode) if sqrt_det is not None else None
        self._hodge_cache = {}
        self._is_diagonal = all(rows[i][j] == 0 for i in range(dim) for j in range(dim) if i != j)

    # -- equality is structural so that spaces built twice are interchangeable
    def __eq__(self, other):
        return (
            isinstance(other, ModelSpace)
            and self.dim == other.dim
            and self.mode == other.mode
            and self.orientation == other.orientation
            and self.metric == other.metric
        )

    def __hash__(self):
        return hash((self.dim, self.mode, self.orientation, self.metric))

    def __repr__(self):
        kind = "euclidean" if self.is_euclidean else "general"
        return f"ModelSpace(dim={self.dim}, mode={self.mode}, orientation={self.orientation:+d}, {kind})"

    @property
    def is_euclidean(self) -> bool:
        one_ = 1 if self.mode == EXACT else 1.0
        return self._is_diagonal and all(self.metric[i][i] == one_ for i in range(self.dim))

    @property
    def metric_inv(self):
        if self._inv is None:
            if self._is_diagonal:
                z = zero(self.mode)
                self._inv = tuple(
                    tuple((1 / self.metric[i][i] if i == j else z) for j in range(self.dim)) for i in range(self.dim)
                )
            else:
                self._inv = invert(self.metric)
        return self._inv

    @property
    def sqrt_det(self):
        if self._sqrt_det is None:
            d = det(self.metric)
            if self.mode == EXACT:
                self._sqrt_det = rational_sqrt(d)
            else:
                self._sqrt_det = math.sqrt(d)
        return self._sqrt_det

    def volume_form(self) -> "KForm":
        idx = tuple(range(self.dim))
        sign = 1 if self.orientation > 0 else -1
        return KForm(self, self.dim, {idx: sign * self.sqrt_det})

    # Cached dense hodge matrix for a given degree (general-metric path).
    def _hodge_matrix(self, k: int):
        cached = self._hodge_cache.get(k)
        if cached is not None:
            return cached
        n = self.dim
        ginv = self.metric_inv
        rows_in = increasing_tuples(n, k)
        table = complement_table(n, k)
        if self.mode == FLOAT:
            ginv_np = np.array(ginv, dtype=float)
            if k == 0:
                mat = np.array([[sgn] for _, _, sgn in table], dtype=float)
            else:
                rows_arr = np.array([Ic for _, Ic, _ in table])  # (n_out, k)
                cols_arr = np.array(rows_in)  # (n_in, k)
                stack = ginv_np[rows_arr[:, None, :, None], cols_arr[None, :, None, :]]
                mat = np.linalg.det(stack)
                mat *= np.array([sgn for _, _, sgn in table], dtype=float)[:, None]
            mat = mat * (self.orientation * self.sqrt_det)
        else:
            scale = self.orientation * self.sqrt_det
            mat = []
            for J, Ic, sgn in table:
                mat.append(tuple(scale * sgn * submatrix_det(ginv, Ic, K) for K in rows_in))
            mat = tuple(mat)
        self._hodge_cache[k] = mat
        return mat


def _close(a, b, mode):
    if mode == EXACT:
        return a == b
    return abs(a - b) <= 1e-12 * max(1.0, abs(a), abs(b))


@lru_cache(maxsize=None)
def euclidean_space(dim: int, mode: str = EXACT, orientation: int = 1) -> ModelSpace:
    one_ = 1 if mode == EXACT else 1.0
    zero_ = 0 if mode == EXACT else 0.0
    metric = tuple(tuple(one_ if i == j else zero_ for j in range(dim)) for i in range(dim))
    return ModelSpace(dim, metric, orientation=orientation, mode=mode)


class KForm:
    """A degree-k alternating form with sparse coefficients.

    ``coeffs`` maps strictly increasing index tuples (0-based) to scalars;
    zero coefficients are pruned in exact mode and kept only if nonzero in
    float mode.
    """

    __slots__ = ("space", "degree", "coeffs")

    def __init__(self, space: ModelSpace, degree: int, coeffs=None, _normalized=False):
        if not 0 <= degree <= space.dim:
            raise DegreeError(f"degree {degree} out of range for dim {space.dim}")
        self.space = space
        self.degree = degree
        if coeffs is None:
            coeffs = {}
        if _normalized:
            self.coeffs = coeffs
            return
        norm: dict = {}
        for idx, val in coeffs.items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise DegreeError(f"index {idx} does not have degree {degree}")
            if len(set(idx)) != degree:
                continue
            sign = permutation_sign(idx)
            key = tuple(sorted(idx))
            if any(i < 0 or i >= space.dim for i in key):
                raise ValueError(f"index {idx} out of range")
            val = coerce(val, space.mode)
            acc = norm.get(key, zero(space.mode)) + sign * val
            norm[key] = acc
        self.coeffs = {k: v for k, v in norm.items() if v != 0}

    # -- construction helpers ------------------------------------------------
    @classmethod
    def zero_form(cls, space, degree):
        return cls(space, degree, {}, _normalized=True)

    @classmethod
    def basis(cls, space, idx):
        idx = tuple(idx)
        return cls(space, len(idx), {idx: 1 if space.mode == EXACT else 1.0})

    def __repr__(self):
        if not self.coeffs:
            return f"KForm<deg {self.degree}, 0>"
        terms = ", ".join(f"{idx}:{val}" for idx, val in sorted(self.coeffs.items()))
        return f"KForm<deg {self.degree}, {terms}>"

    # -- linear structure ----------------------------------------------------
    def _check_space(self, other: "KForm"):
        if self.space != other.space:
            raise SpaceMismatchError("forms live on different model spaces")

    def __add__(self, other: "KForm") -> "KForm":
        self._check_space(other)
        if self.degree != other.degree:
            raise DegreeError("cannot add forms of different degree")
        out = dict(self.coeffs)
        for idx, val in other.coeffs.items():
            acc = out.get(idx, zero(self.space.mode)) + val
            if acc == 0:
                out.pop(idx, None)
            else:
                out[idx] = acc
        return KForm(self.space, self.degree, out, _normalized=True)

    def __neg__(self) -> "KForm":
        return KForm(self.space, self.degree, {i: -v for i, v in self.coeffs.items()}, _normalized=True)

    def __sub__(self, other: "KForm") -> "KForm":
        return self + (-other)

    def scale(self, c) -> "KForm":
        c = coerce(c, self.space.mode)
        if c == 0:
            return KForm.zero_form(self.space, self.degree)
        return KForm(self.space, self.degree, {i: c * v for i, v in self.coeffs.items()}, _normalized=True)

    __mul__ = scale
    __rmul__ = scale

    def __eq__(self, other):
        return (
            isinstance(other, KForm)
            and self.space == other.space
            and self.degree == other.degree
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.space, self.degree, tuple(sorted(self.coeffs.items()))))

    def get(self, idx):
        idx = tuple(idx)
        sign = permutation_sign(idx)
        return sign * self.coeffs.get(tuple(sorted(idx)), zero(self.space.mode))

    def is_zero(self, tol: float = 0.0) -> bool:
        if tol == 0.0:
            return not self.coeffs
        return all(abs(v) <= tol for v in self.coeffs.values())

    def dense(self):
        """Coefficient vector over the canonical (lexicographic) basis."""
        n, k = self.space.dim, self.degree
        base = increasing_tuples(n, k)
        z = zero(self.space.mode)
        return [self.coeffs.get(idx, z) for idx in base]

    @classmethod
    def from_dense(cls, space, degree, vec):
        base = increasing_tuples(space.dim, degree)
        return cls(space, degree, {idx: v for idx, v in zip(base, vec) if v != 0}, _normalized=False)

    def max_abs(self) -> float:
        return max((abs(float(v)) for v in self.coeffs.values()), default=0.0)

    def to_float(self, space_float: ModelSpace | None = None) -> "KForm":
        space = space_float or euclidean_space(self.space.dim, FLOAT, self.space.orientation)
        return KForm(space, self.degree, {i: float(v) for i, v in self.coeffs.items()})


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def wedge(a: KForm, b: KForm) -> KForm:
    """Exterior product; bilinear and graded-anticommutative."""
    a._check_space(b)
    deg = a.degree + b.degree
    if deg > a.space.dim:
        raise DegreeError(f"wedge degree {deg} exceeds dimension {a.space.dim}")
    out: dict = {}
    z = zero(a.space.mode)
    for idx_a, va in a.coeffs.items():
        for idx_b, vb in b.coeffs.items():
            sign, merged = merge_sign(idx_a, idx_b)
            if sign == 0:
                continue
            acc = out.get(merged, z) + sign * va * vb
            if acc == 0:
                out.pop(merged, None)
            else:
                out[merged] = acc
    return KForm(a.space, deg, out, _normalized=True)


def hodge(a: KForm) -> KForm:
    """Hodge star for the space's metric and orientation.

    Satisfies ``hodge(hodge(a)) == (-1)^(k(n-k)) a`` and is an isometry for
    the induced inner product on forms.
    """
    space, n, k = a.space, a.space.dim, a.degree
    scale = space.orientation * space.sqrt_det
    out: dict = {}
    if space._is_diagonal:
        ginv = space.metric_inv
        for J, Ic, sgn in complement_table(n, k):
            val = a.coeffs.get(Ic)
            if val is None or val == 0:
                continue
            raised = val
            for i in Ic:
                raised = raised * ginv[i][i]
            out[J] = scale * sgn * raised
        return KForm(space, n - k, {i: v for i, v in out.items() if v != 0}, _normalized=True)
    if space.mode == FLOAT:
        mat = space._hodge_matrix(k)
        vec = np.array(a.dense(), dtype=float)
        res = mat @ vec
        base_out = increasing_tuples(n, n - k)
        return KForm(space, n - k, {idx: v for idx, v in zip(base_out, res) if v != 0.0}, _normalized=True)
    ginv = space.metric_inv
    nz = list(a.coeffs.items())
    for J, Ic, sgn in complement_table(n, k):
        acc = Fraction(0)
        for K, val in nz:
            acc += submatrix_det(ginv, Ic, K) * val
        if acc:
            out[J] = scale * sgn * acc
    return KForm(space, n - k, out, _normalized=True)


def interior(v, a: KForm) -> KForm:
    """Interior product (contraction) of a vector with a form."""
    if a.degree == 0:
        raise DegreeError("cannot contract a 0-form")
    space = a.space
    comps = [coerce(x, space.mode) for x in v]
    if len(comps) != space.dim:
        raise SpaceMismatchError("vector dimension does not match the model space")
    out: dict = {}
    z = zero(space.mode)
    for idx, val in a.coeffs.items():
        for pos, i in enumerate(idx):
            if comps[i] == 0:
                continue
            rest = idx[:pos] + idx[pos + 1 :]
            sign = (-1) ** pos
            acc = out.get(rest, z) + sign * comps[i] * val
            if acc == 0:
                out.pop(rest, None)
            else:
                out[rest] = acc
    return KForm(space, a.degree - 1, out, _normalized=True)


def inner(a: KForm, b: KForm):
    """Metric inner product on k-forms, via a wedge hodge(b) = <a,b> vol."""
    a._check_space(b)
    if a.degree != b.degree:
        raise DegreeError("inner product needs equal degrees")
    top = wedge(a, hodge(b))
    full = tuple(range(a.space.dim))
    coeff = top.coeffs.get(full, zero(a.space.mode))
    # a wedge *b = <a,b> vol with vol = orientation * sqrt_det * dx^{1..n}
    return coeff / (a.space.sqrt_det * a.space.orientation)


def norm(a: KForm) -> float:
    return math.sqrt(max(float(inner(a, a)), 0.0))


def pullback(matrix, a: KForm) -> KForm:
    """Pullback of ``a`` under the linear map with the given matrix rows.

    ``matrix[i][j]`` is the (i,j) entry of A acting on column vectors; the
    coefficient rule is (A^* alpha)_J = sum_I alpha_I det(A[I, J]).
    """
    space = a.space
    rows = tuple(tuple(coerce(x, space.mode) for x in r) for r in matrix)
    k = a.degree
    out: dict = {}
    z = zero(space.mode)
    for J in increasing_tuples(space.dim, k):
        acc = z
        for I, val in a.coeffs.items():
            acc += submatrix_det(rows, I, J) * val
        if acc != 0:
            out[J] = acc
    return KForm(space, k, out, _normalized=True)


# ---------------------------------------------------------------------------
# Finite-difference exterior derivative (float mode oracle for d)
# ---------------------------------------------------------------------------

_STENCILS = {
    2: ((1, Fraction(1, 2)), (-1, Fraction(-1, 2))),
    4: ((1, Fraction(2, 3)), (-1, Fraction(-2, 3)), (2, Fraction(-1, 12)), (-2, Fraction(1, 12))),
}


def fd_exterior_derivative(field, p, h: float, order: int = 2) -> KForm:
    """Central-difference approximation of (d field) at point p.

    ``field`` maps a coordinate point (sequence of floats) to a KForm on a
    fixed float-mode space.  Truncation error is O(h^order) for order in
    {2, 4}.
    """
    if order not in _STENCILS:
        raise ValueError("order must be 2 or 4")
    p = np.asarray(p, dtype=float)
    sample = field(p)
    space = sample.space
    if space.mode != FLOAT:
        raise ModeError("finite differences require float mode")
    n = space.dim
    if len(p) != n:
        raise SpaceMismatchError("point dimension does not match the field's space")
    result = KForm.zero_form(space, sample.degree + 1)
    for direction in range(n):
        partial: dict = {}
        for offset, weight in _STENCILS[order]:
            q = p.copy()
            q[direction] += offset * h
            fq = field(q)
            w = float(weight) / h
            for idx, val in fq.coeffs.items():
                if not math.isfinite(val):
                    raise ValueError(f"non-finite field value at {q}")
                partial[idx] = partial.get(idx, 0.0) + w * val
        dpart = KForm(space, sample.degree, partial, _normalized=True)
        result = result + wedge(KForm.basis(space, (direction,)), dpart)
    return result
