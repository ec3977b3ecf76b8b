"""Pointwise calculus of G2-structures on the 7-dimensional model space.

A positive 3-form determines a metric, an orientation, the dual 4-form
Theta(phi), the type projections of 2- and 3-forms, the linearization of
Theta and its quadratic remainder.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .forms import (
    DegreeError,
    KForm,
    ModelSpace,
    euclidean_space,
    fd_exterior_derivative,
    hodge,
    increasing_tuples,
    inner,
    interior,
    norm,
    wedge,
)
from .scalars import EXACT, FLOAT, coerce, det, scalar_nth_root, is_positive_definite_exact


class PositivityError(ValueError):
    """The 3-form is not positive (not pointwise equivalent to the model form)."""


def standard_phi(mode: str = EXACT) -> KForm:
    """The standard positive 3-form on R^7 (associative calibration)."""
    space = euclidean_space(7, mode)
    terms = {
        (0, 1, 2): 1,
        (0, 3, 4): -1,
        (0, 5, 6): -1,
        (1, 3, 5): -1,
        (1, 4, 6): 1,
        (2, 3, 6): -1,
        (2, 4, 5): -1,
    }
    return KForm(space, 3, terms)


def standard_psi(mode: str = EXACT) -> KForm:
    """The coassociative 4-form dual to :func:`standard_phi` for the flat metric."""
    space = euclidean_space(7, mode)
    terms = {
        (3, 4, 5, 6): 1,
        (1, 2, 5, 6): -1,
        (1, 2, 3, 4): -1,
        (0, 2, 4, 6): -1,
        (0, 2, 3, 5): 1,
        (0, 1, 4, 5): -1,
        (0, 1, 3, 6): -1,
    }
    return KForm(space, 4, terms)


_B_TENSOR = None


def _b_tensor():
    """Sparse structure constants of the trilinear map phi -> B matrix.

    Entries (out, a, b, c, sign) with out = 7*i + j encode
    b_ij = (1/6) sum sign * phi[a] phi[b] phi[c] over the dense degree-3 basis.
    """
    global _B_TENSOR
    if _B_TENSOR is not None:
        return _B_TENSOR
    from .forms import merge_sign

    base3 = increasing_tuples(7, 3)
    pos3 = {idx: p for p, idx in enumerate(base3)}
    complement = {}
    for idx in base3:
        complement[idx] = tuple(sorted(set(range(7)) - set(idx)))
    out_l, a_l, b_l, c_l, s_l = [], [], [], [], []
    for ia, I in enumerate(base3):
        for pos_i, i in enumerate(I):
            rest_i = I[:pos_i] + I[pos_i + 1 :]
            sign_i = (-1) ** pos_i
            for ib, J in enumerate(base3):
                for pos_j, j in enumerate(J):
                    rest_j = J[:pos_j] + J[pos_j + 1 :]
                    sign_j = (-1) ** pos_j
                    s1, merged = merge_sign(rest_i, rest_j)
                    if s1 == 0:
                        continue
                    K = tuple(sorted(set(range(7)) - set(merged)))
                    s2, _ = merge_sign(merged, K)
                    out_l.append(7 * i + j)
                    a_l.append(ia)
                    b_l.append(ib)
                    c_l.append(pos3[K])
                    s_l.append(sign_i * sign_j * s1 * s2)
    _B_TENSOR = (
        np.array(out_l, dtype=np.int64),
        np.array(a_l, dtype=np.int64),
        np.array(b_l, dtype=np.int64),
        np.array(c_l, dtype=np.int64),
        np.array(s_l, dtype=float),
    )
    return _B_TENSOR


def bilinear_matrix(phi: KForm):
    """B(u, v) = (1/6) (u . phi) ^ (v . phi) ^ phi, as a symmetric matrix.

    The value of B is a 7-form; the matrix entries are its coefficients over
    the coordinate volume element.
    """
    if phi.space.dim != 7 or phi.degree != 3:
        raise DegreeError("positivity is defined for 3-forms on the 7-dimensional space")
    mode = phi.space.mode
    n = 7
    if mode == FLOAT:
        out, a, b, c, s = _b_tensor()
        vec = np.array(phi.dense(), dtype=float)
        flat = np.zeros(49)
        np.add.at(flat, out, s * vec[a] * vec[b] * vec[c])
        flat /= 6.0
        return tuple(tuple(flat[7 * i + j] for j in range(7)) for i in range(7))
    full = tuple(range(n))
    sixth = Fraction(1, 6)
    contractions = []
    for i in range(n):
        e = [0] * n
        e[i] = 1
        contractions.append(interior(e, phi))
    rows = []
    for i in range(n):
        row = []
        wi = contractions[i]
        for j in range(n):
            if j < i:
                row.append(rows[j][i])
                continue
            top = wedge(wedge(wi, contractions[j]), phi)
            row.append(sixth * top.coeffs.get(full, coerce(0, mode)))
        rows.append(row)
    return tuple(tuple(r) for r in rows)


def is_positive(phi: KForm, tol: float = 1e-9) -> bool:
    """Whether phi is a positive 3-form.

    Positivity is equivalent to definiteness of the normalized bilinear form
    det(B)^(-1/9) B.  In exact mode this is checked without roots: B must be
    positive definite when det(B) > 0, negative definite when det(B) < 0.
    In float mode the smallest eigenvalue of the normalized matrix must
    exceed ``tol``.
    """
    try:
        b = bilinear_matrix(phi)
    except DegreeError:
        raise
    d = det(b)
    if phi.space.mode == EXACT:
        if d == 0:
            return False
        if d > 0:
            return is_positive_definite_exact(b)
        return is_positive_definite_exact(tuple(tuple(-x for x in row) for row in b))
    if d == 0 or not math.isfinite(d):
        return False
    scale = scalar_nth_root(d, 9, FLOAT)
    mat = np.array(b, dtype=float) / scale
    eigs = np.linalg.eigvalsh(mat)
    return bool(eigs.min() > tol)


def metric_from_phi(phi: KForm):
    """Metric, orientation and exact sqrt(det g) induced by a positive 3-form.

    g = det(B)^(-1/9) B with the real ninth root, so the standard form maps
    to the Euclidean metric and -phi reverses orientation.  For the induced
    metric, sqrt(det g) = |det B|^(1/9), which is returned so exact-mode
    Hodge stars avoid a redundant (possibly irrational) square root.
    """
    b = bilinear_matrix(phi)
    mode = phi.space.mode
    d = det(b) if mode == EXACT else float(np.linalg.det(np.array(b, dtype=float)))
    if mode == EXACT:
        if d == 0:
            raise PositivityError("degenerate 3-form")
        ok = is_positive_definite_exact(b) if d > 0 else is_positive_definite_exact(tuple(tuple(-x for x in r) for r in b))
        if not ok:
            raise PositivityError("3-form is not positive")
    else:
        if d == 0 or not math.isfinite(d):
            raise PositivityError("degenerate 3-form")
        scale0 = scalar_nth_root(d, 9, FLOAT)
        eigs = np.linalg.eigvalsh(np.array(b, dtype=float) / scale0)
        if not eigs.min() > 1e-9:
            raise PositivityError("3-form is not positive")
    scale = scalar_nth_root(d, 9, mode)  # real ninth root, sign-preserving
    metric = tuple(tuple(x / scale for x in row) for row in b)
    orientation = phi.space.orientation * (1 if d > 0 else -1)
    sqrt_det = scalar_nth_root(abs(d), 9, mode)
    return metric, orientation, sqrt_det


class G2Structure:
    """A positive 3-form with its induced metric, orientation and dual 4-form."""

    __slots__ = ("phi", "metric", "orientation", "coordinate_space", "induced_space", "psi", "volume")

    def __init__(self, phi: KForm):
        metric, orientation, sqrt_det = metric_from_phi(phi)
        self.coordinate_space = phi.space
        self.metric = metric
        self.orientation = orientation
        self.induced_space = ModelSpace(7, metric, orientation=orientation, mode=phi.space.mode, sqrt_det=sqrt_det)
        phi_ind = KForm(self.induced_space, 3, dict(phi.coeffs), _normalized=True)
        self.phi = phi_ind
        self.psi = hodge(phi_ind)
        self.volume = self.induced_space.volume_form()

    @property
    def mode(self):
        return self.induced_space.mode

    def embed(self, form: KForm) -> KForm:
        """Reinterpret a coordinate form as living on the induced space."""
        if form.space.dim != 7 or form.space.mode != self.mode:
            raise DegreeError("can only embed 7-dimensional forms of matching mode")
        return KForm(self.induced_space, form.degree, dict(form.coeffs), _normalized=True)

    def hodge(self, form: KForm) -> KForm:
        return hodge(self.embed(form))

    def norm(self, form: KForm) -> float:
        return norm(self.embed(form))

    # -- type decomposition ----------------------------------------------
    def project(self, xi: KForm) -> dict:
        """Orthogonal type components of a 2-, 3-, 4- or 5-form.

        Returns a dict keyed by the component dimension labels (7, 14) in
        degrees 2 and 5, and (1, 7, 27) in degrees 3 and 4.
        """
        xi = self.embed(xi)
        k = xi.degree
        if k == 2:
            t_xi = hodge(wedge(self.phi, xi))
            third = Fraction(1, 3) if self.mode == EXACT else 1.0 / 3.0
            pi7 = (t_xi + xi).scale(third)
            pi14 = (xi.scale(2) - t_xi).scale(third)
            return {7: pi7, 14: pi14}
        if k == 3:
            seventh = Fraction(1, 7) if self.mode == EXACT else 1.0 / 7.0
            quarter = Fraction(1, 4) if self.mode == EXACT else 0.25
            s = hodge(wedge(xi, self.psi))  # 0-form coefficient
            pi1 = self.phi.scale(seventh * s.coeffs.get((), 0))
            pi7 = hodge(wedge(self.phi, hodge(wedge(self.phi, xi)))).scale(-quarter)
            pi27 = xi - pi1 - pi7
            return {1: pi1, 7: pi7, 27: pi27}
        if k in (4, 5):
            parts = self.project(hodge(xi))
            sign = 1  # ** on degree 3 and 2 is +1 after pairing (k(n-k) even)
            return {label: hodge(part).scale(sign) for label, part in parts.items()}
        raise DegreeError("type projection is defined for degrees 2..5")

    def projector_matrices(self, degree: int) -> "TypeProjector":
        return TypeProjector(self, degree)

    # -- Theta, its linearization, and the quadratic remainder -------------
    def linearize_theta(self, xi: KForm) -> KForm:
        """D Theta at phi: star(4/3 pi1 + pi7 - pi27) applied to a 3-form."""
        parts = self.project(xi)
        if self.mode == EXACT:
            combo = parts[1].scale(Fraction(4, 3)) + parts[7] - parts[27]
        else:
            combo = parts[1].scale(4.0 / 3.0) + parts[7] - parts[27]
        return hodge(combo)

    def remainder(self, xi: KForm) -> KForm:
        """F(xi) = Theta(phi + xi) - Theta(phi) - D Theta(xi); quadratically small."""
        perturbed = self.embed(xi) + self.phi
        plain = KForm(self.coordinate_space, 3, dict(perturbed.coeffs), _normalized=True)
        if not is_positive(plain):
            raise PositivityError("phi + xi left the positive cone")
        theta_new = theta(plain)
        return self.embed(theta_new) - self.psi - self.linearize_theta(xi)


class TypeProjector:
    """Explicit projection matrices on the coefficient space of k-forms."""

    def __init__(self, structure: G2Structure, degree: int):
        if degree not in (2, 3):
            raise DegreeError("explicit projectors are built for degrees 2 and 3")
        self.degree = degree
        self.structure = structure
        space = structure.induced_space
        base = increasing_tuples(7, degree)
        labels = (7, 14) if degree == 2 else (1, 7, 27)
        cols = {label: [] for label in labels}
        for idx in base:
            parts = structure.project(KForm.basis(space, idx))
            for label in labels:
                cols[label].append(parts[label].dense())
        # columns were produced per basis vector; transpose into matrices
        self.components = {
            label: tuple(tuple(cols[label][j][i] for j in range(len(base))) for i in range(len(base)))
            for label in labels
        }

    def validate(self) -> dict:
        """Idempotency, mutual annihilation, completeness, and ranks."""
        from .scalars import mat_mul, rank

        labels = sorted(self.components)
        n = len(next(iter(self.components.values())))
        mode = self.structure.mode
        idn = tuple(tuple(coerce(int(i == j), mode) for j in range(n)) for i in range(n))

        def close(a, b):
            if mode == EXACT:
                return a == b
            return all(abs(a[i][j] - b[i][j]) < 1e-10 for i in range(n) for j in range(n))

        zero_mat = tuple(tuple(coerce(0, mode) for _ in range(n)) for _ in range(n))
        report = {"idempotent": {}, "annihilate": {}, "ranks": {}}
        total = zero_mat
        for la in labels:
            p = self.components[la]
            report["idempotent"][la] = close(mat_mul(p, p), p)
            if mode == EXACT:
                report["ranks"][la] = rank([list(r) for r in p])
            else:
                report["ranks"][la] = int(np.linalg.matrix_rank(np.array(p, dtype=float), tol=1e-8))
            total = tuple(tuple(total[i][j] + p[i][j] for j in range(n)) for i in range(n))
            for lb in labels:
                if lb > la:
                    prod = mat_mul(p, self.components[lb])
                    report["annihilate"][(la, lb)] = close(prod, zero_mat)
        report["complete"] = close(total, idn)
        return report


def theta(phi: KForm) -> KForm:
    """Theta(phi) = the Hodge dual of phi in its own induced metric."""
    return G2Structure(phi).psi


def project(structure: G2Structure, xi: KForm) -> dict:
    return structure.project(xi)


def linearize_theta(structure: G2Structure, xi: KForm) -> KForm:
    return structure.linearize_theta(xi)


def remainder_F(structure: G2Structure, xi: KForm) -> KForm:
    return structure.remainder(xi)


def fundamental_relation_residual(phi_field, p, h: float, order: int = 2) -> float:
    """Norm of phi ^ *(d phi) - psi ^ *(d psi) at p for a positive-3-form field.

    Vanishes identically for fields whose 4-form is the dual of the 3-form,
    so the finite-difference value measures pure discretization error.
    """
    phi_p = phi_field(np.asarray(p, dtype=float))
    struct = G2Structure(phi_p)

    def psi_field(q):
        return theta(phi_field(q))

    dphi = fd_exterior_derivative(phi_field, p, h, order=order)
    dpsi = fd_exterior_derivative(psi_field, p, h, order=order)
    lhs = wedge(struct.phi, struct.hodge(dphi))
    rhs = wedge(struct.psi, struct.hodge(dpsi))
    return norm(lhs - rhs)


def numeric_theta_jacobian(phi: KForm, eps: float = 1e-5):
    """Finite-difference Jacobian of Theta at phi over all 35 coordinate directions."""
    space = phi.space
    if space.mode != FLOAT:
        raise ValueError("the numeric Jacobian runs in float mode")
    base = increasing_tuples(7, 3)
    cols = []
    for idx in base:
        bump = KForm.basis(space, idx).scale(eps)
        plus = theta(phi + bump)
        minus = theta(phi - bump)
        cols.append([(pv - mv) / (2 * eps) for pv, mv in zip(plus.dense(), minus.dense())])
    return np.array(cols, dtype=float).T  # (35 out, 35 in)


def linearization_matrix(structure: G2Structure):
    """D Theta as an explicit 35x35 matrix (float)."""
    base = increasing_tuples(7, 3)
    cols = []
    for idx in base:
        img = structure.linearize_theta(KForm.basis(structure.induced_space, idx))
        cols.append([float(v) for v in img.dense()])
    return np.array(cols, dtype=float).T
