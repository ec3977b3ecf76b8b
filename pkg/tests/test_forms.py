"""Exterior algebra core: wedge, Hodge star, contraction, stencils."""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from g2eh.forms import (
    DegreeError,
    KForm,
    SpaceMismatchError,
    euclidean_space,
    fd_exterior_derivative,
    hodge,
    increasing_tuples,
    inner,
    interior,
    norm,
    permutation_sign,
    pullback,
    wedge,
)
from g2eh.g2 import standard_phi, standard_psi
from g2eh.scalars import ExactnessError, ModeError


def shuffle_wedge_value(idx_a, idx_b, vectors):
    """Independent wedge oracle: evaluate dx^A ^ dx^B on basis vectors via
    the shuffle expansion of the alternating product."""
    p, q = len(idx_a), len(idx_b)

    def eval_basis(idx, vecs):
        if set(idx) != set(vecs):
            return 0
        perm = [list(idx).index(v) for v in vecs]
        return permutation_sign(perm)

    total = 0
    for subset in itertools.combinations(range(p + q), p):
        rest = [i for i in range(p + q) if i not in subset]
        sign = permutation_sign(list(subset) + rest)
        total += sign * eval_basis(idx_a, [vectors[i] for i in subset]) * eval_basis(idx_b, [vectors[i] for i in rest])
    return total


@pytest.mark.parametrize("dim", [3, 4, 7])
def test_wedge_matches_shuffle_expansion(dim):
    space = euclidean_space(dim)
    rng = np.random.default_rng(dim)
    degrees = [(p, q) for p in range(1, dim) for q in range(1, dim) if p + q <= dim]
    for p, q in degrees:
        pairs = list(itertools.product(increasing_tuples(dim, p), increasing_tuples(dim, q)))
        if dim == 7 and len(pairs) > 40:
            pairs = [pairs[i] for i in rng.choice(len(pairs), size=40, replace=False)]
        for ia, ib in pairs:
            w = wedge(KForm.basis(space, ia), KForm.basis(space, ib))
            for out_idx in increasing_tuples(dim, p + q):
                assert w.get(out_idx) == shuffle_wedge_value(ia, ib, list(out_idx))


def test_wedge_basis_case():
    space = euclidean_space(4)
    w = wedge(KForm.basis(space, (0, 1)), KForm.basis(space, (2, 3)))
    assert w == KForm(space, 4, {(0, 1, 2, 3): 1})


def test_wedge_one_form_squares_to_zero():
    space = euclidean_space(7)
    rng = np.random.default_rng(5)
    for _ in range(5):
        alpha = KForm(space, 1, {(i,): Fraction(int(rng.integers(-5, 6))) for i in range(7)})
        assert wedge(alpha, alpha).is_zero()


def test_wedge_graded_anticommutative():
    space = euclidean_space(7)
    rng = np.random.default_rng(6)
    for p, q in ((1, 2), (2, 2), (3, 2), (1, 3)):
        a = KForm(space, p, {idx: Fraction(int(rng.integers(-4, 5))) for idx in increasing_tuples(7, p)})
        b = KForm(space, q, {idx: Fraction(int(rng.integers(-4, 5))) for idx in increasing_tuples(7, q)})
        assert wedge(a, b) == wedge(b, a).scale(Fraction((-1) ** (p * q)))


def test_wedge_standard_forms_give_seven_volumes():
    phi = standard_phi()
    psi = standard_psi()
    assert wedge(phi, psi).coeffs == {tuple(range(7)): Fraction(7)}


def test_wedge_errors():
    with pytest.raises(SpaceMismatchError):
        wedge(KForm.basis(euclidean_space(3), (0,)), KForm.basis(euclidean_space(4), (0,)))
    space = euclidean_space(3)
    with pytest.raises(DegreeError):
        wedge(KForm.basis(space, (0, 1)), KForm.basis(space, (1, 2)))


def test_zero_form_propagates():
    space = euclidean_space(7)
    zero = KForm.zero_form(space, 2)
    assert wedge(zero, KForm.basis(space, (0, 1))).is_zero()
    assert hodge(zero).is_zero()
    assert interior([1, 0, 0, 0, 0, 0, 0], zero).is_zero()


def test_hodge_orthonormal_basis_case():
    space = euclidean_space(7)
    assert hodge(KForm.basis(space, (0, 1, 2))) == KForm.basis(space, (3, 4, 5, 6))


def test_hodge_standard_golden():
    # the coassociative 4-form, coefficient for coefficient
    from g2eh.g2 import theta

    assert hodge(standard_phi()) == standard_psi()


def test_hodge_selfdual_two_form():
    space = euclidean_space(4)
    w = KForm(space, 2, {(0, 1): 1, (2, 3): 1})
    assert hodge(w) == w


@pytest.mark.parametrize("dim", [3, 4, 7])
def test_hodge_involution_sign(dim):
    space = euclidean_space(dim)
    for k in range(dim + 1):
        for idx in increasing_tuples(dim, k):
            b = KForm.basis(space, idx)
            assert hodge(hodge(b)) == b.scale(Fraction((-1) ** (k * (dim - k))))


def test_hodge_isometry_and_pairing_random_rational():
    space = euclidean_space(7)
    rng = np.random.default_rng(9)
    vol = space.volume_form()
    for degree in (1, 2, 3, 4):
        for _ in range(3):
            a = KForm(space, degree, {idx: Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 7))) for idx in increasing_tuples(7, degree) if rng.random() < 0.5})
            b = KForm(space, degree, {idx: Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 7))) for idx in increasing_tuples(7, degree) if rng.random() < 0.5})
            assert inner(a, b) == inner(hodge(a), hodge(b))
            assert wedge(a, hodge(b)) == vol.scale(inner(a, b))


def test_hodge_general_diagonal_metric_exact():
    t = Fraction(2, 3)
    metric = tuple(tuple((t * t if i == j and i >= 3 else (1 if i == j else 0)) for j in range(7)) for i in range(7))
    from g2eh.forms import ModelSpace

    space = ModelSpace(7, metric, sqrt_det=t**4)
    b = KForm.basis(space, (0, 3))
    ss = hodge(hodge(b))
    assert ss == b.scale(Fraction((-1) ** (2 * 5)))


def test_hodge_irrational_sqrt_raises_in_exact_mode():
    from g2eh.forms import ModelSpace

    metric = tuple(tuple((2 if i == j else 0) for j in range(3)) for i in range(3))
    space = ModelSpace(3, metric)
    with pytest.raises(ExactnessError):
        hodge(KForm.basis(space, (0,)))


def test_interior_basis_and_antiderivation():
    space = euclidean_space(4)
    e1 = [1, 0, 0, 0]
    assert interior(e1, KForm.basis(space, (0, 1))) == KForm.basis(space, (1,))
    rng = np.random.default_rng(3)
    for _ in range(4):
        v = [Fraction(int(rng.integers(-3, 4))) for _ in range(4)]
        alpha = KForm(space, 1, {(i,): Fraction(int(rng.integers(-3, 4))) for i in range(4)})
        beta = KForm(space, 1, {(i,): Fraction(int(rng.integers(-3, 4))) for i in range(4)})
        va = interior(v, alpha).coeffs.get((), Fraction(0))
        vb = interior(v, beta).coeffs.get((), Fraction(0))
        # v . (a ^ b) = (v . a) b - (v . b) a for 1-forms
        assert interior(v, wedge(alpha, beta)) == beta.scale(va) - alpha.scale(vb)


def test_interior_degree_zero_raises():
    space = euclidean_space(3)
    with pytest.raises(DegreeError):
        interior([1, 0, 0], KForm(space, 0, {(): 1}))


def test_interior_dilation_on_holomorphic_pair():
    """Contraction of the dilation field with the holomorphic 2-form pair
    gives the coordinates of z1 dz2 - z2 dz1."""
    from g2eh.hk import QuaternionicFrame

    fr = QuaternionicFrame.standard("float")
    rng = np.random.default_rng(11)
    for _ in range(5):
        y = rng.uniform(-2, 2, 4)
        z1 = complex(y[0], y[1])
        z2 = complex(y[2], y[3])
        cj = interior(list(y), fr.omegas[1])
        ck = interior(list(y), fr.omegas[2])
        target = [z1 * 1, 0]  # z1 dz2 - z2 dz1 in complex components
        # real coordinates of z1 dz2 - z2 dz1 over dy1..dy4
        expected = np.array(
            [-(z2.real), z2.imag, z1.real, -(z1.imag)]
        )
        measured_real = np.array([cj.get((i,)) for i in range(4)])
        measured_imag = np.array([ck.get((i,)) for i in range(4)])
        # z1 dz2 - z2 dz1 = (Re parts) + i (Im parts) with dz = dy_real + i dy_imag
        combo = measured_real + 1j * measured_imag
        target_complex = np.array([-z2, -1j * z2, z1, 1j * z1])
        assert np.allclose(combo, target_complex, atol=1e-12)


def test_fd_exterior_derivative_constant_and_linear():
    space = euclidean_space(4, "float")
    const = lambda p: KForm(space, 1, {(1,): 2.5})
    d = fd_exterior_derivative(const, np.zeros(4), 1e-3)
    assert d.max_abs() < 1e-12
    linear = lambda p: KForm(space, 1, {(1,): p[0]})
    d2 = fd_exterior_derivative(linear, np.array([0.3, 0.1, 0.0, 0.0]), 1e-3)
    assert abs(d2.get((0, 1)) - 1.0) < 1e-10
    assert norm(d2 - KForm(space, 2, {(0, 1): 1.0})) < 1e-10


def test_fd_convergence_order_on_polynomial_field():
    space = euclidean_space(4, "float")

    def field(p):
        return KForm(space, 1, {(0,): p[1] ** 3 * p[2], (2,): math.sin(p[0])})

    p0 = np.array([0.4, 0.7, -0.2, 0.1])
    errs = []
    steps = (2e-2, 1e-2, 5e-3)
    exact = fd_exterior_derivative(field, p0, 1e-5, order=4)
    for h in steps:
        approx = fd_exterior_derivative(field, p0, h, order=2)
        errs.append(norm(approx - exact))
    slope = np.polyfit(np.log(steps), np.log(errs), 1)[0]
    assert slope >= 1.9


def test_fd_nonfinite_raises():
    space = euclidean_space(3, "float")

    def field(p):
        val = math.inf if p[0] == 0 else 1.0 / p[0]
        return KForm(space, 1, {(0,): val})

    with pytest.raises(ValueError):
        fd_exterior_derivative(field, np.zeros(3), 1e-3)


def test_pullback_composition():
    space = euclidean_space(4)
    rng = np.random.default_rng(2)
    a = tuple(tuple(int(rng.integers(-2, 3)) for _ in range(4)) for _ in range(4))
    form = KForm(space, 2, {(0, 1): 1, (1, 3): Fraction(2, 3)})
    double = pullback(a, pullback(a, form))
    from g2eh.scalars import mat_mul

    assert double == pullback(mat_mul(a, a), form)


def test_mode_never_mixes():
    with pytest.raises(ModeError):
        KForm(euclidean_space(3), 1, {(0,): 0.5})
    f = KForm(euclidean_space(3), 1, {(0,): Fraction(1, 3)})
    assert isinstance(f.coeffs[(0,)], Fraction)
