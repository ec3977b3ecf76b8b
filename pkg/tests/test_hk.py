"""HyperKahler frame checks, product projections, exact linear-algebra maps,
fibre identities, and the synthetic closed-pair relations."""

import math
from fractions import Fraction

import numpy as np
import pytest

from g2eh.forms import DegreeError, KForm, euclidean_space, fd_exterior_derivative, hodge, increasing_tuples, norm, wedge
from g2eh.hk import (
    ProductG2Point,
    QuaternionicFrame,
    RotatingPairModel,
    appendix_maps,
    b_map_single,
    check_frame,
    dstar_fd,
    dtheta_bruteforce,
    dtheta_formula,
    embed_vertical,
    laplacian_fd,
    lemma51_residuals,
    pi7_bruteforce,
    pi7_formula,
    restrict_vertical,
    type_component,
)

T_VALUES = (Fraction(1), Fraction(2), Fraction(1, 3))


def test_standard_frame_passes_all_identities():
    rep = check_frame(QuaternionicFrame.standard())
    assert rep["passed"], rep["failures"]


@pytest.mark.parametrize("axis", [1, 2, 3])
def test_rotated_frame_passes(axis):
    frame = QuaternionicFrame.standard().rotated(axis, Fraction(3, 5), Fraction(4, 5))
    assert check_frame(frame)["passed"]


def test_negated_omega_fails_with_named_identities():
    fr = QuaternionicFrame.standard()
    bad = QuaternionicFrame(fr.space, (fr.omegas[0], fr.omegas[1], fr.omegas[2].scale(-1)), fr.jmats)
    rep = check_frame(bad)
    assert not rep["passed"]
    names = {f[0] for f in rep["failures"]}
    assert "compatibility" in names and "star-wedge" in names


def test_rotation_requires_unit_pair():
    with pytest.raises(ValueError):
        QuaternionicFrame.standard().rotated(1, Fraction(1, 2), Fraction(1, 2))


def test_wedge_square_normalization():
    fr = QuaternionicFrame.standard()
    vol = fr.volume()
    for i in range(3):
        assert wedge(fr.omegas[i], fr.omegas[i]) == vol.scale(2)
        for j in range(3):
            if i != j:
                assert wedge(fr.omegas[i], fr.omegas[j]).is_zero()


def test_product_point_dual_form_exact():
    fr = QuaternionicFrame.standard()
    for t in T_VALUES:
        pt = ProductG2Point(fr, t)
        st = pt.structure
        assert st.psi == KForm(st.induced_space, 4, dict(pt.psi.coeffs))
        assert st.metric[3][3] == t * t and st.metric[0][0] == 1


def test_product_star_splitting_sample():
    fr = QuaternionicFrame.standard()
    sp3 = euclidean_space(3)
    for t in T_VALUES:
        pt = ProductG2Point(fr, t)
        for k, l in ((1, 1), (2, 0), (2, 2), (0, 3), (3, 1)):
            for va in increasing_tuples(4, k)[:2]:
                for vb in increasing_tuples(3, l)[:2]:
                    alpha = embed_vertical(pt.space, KForm.basis(fr.space, va))
                    beta = KForm(pt.space, l, {vb: 1})
                    lhs = pt.star(wedge(alpha, beta))
                    s3 = hodge(KForm.basis(sp3, vb))
                    rhs = wedge(pt.star_vertical(alpha), KForm(pt.space, s3.degree, dict(s3.coeffs)))
                    assert lhs == rhs.scale(Fraction((-1) ** (k * l)) * t ** (4 - 2 * k))


def _spanning_set(pt: ProductG2Point):
    out = []
    for T in increasing_tuples(4, 3):
        out.append(embed_vertical(pt.space, KForm.basis(pt.frame.space, T)))
    for m in range(4):
        for k in range(3):
            i, j = (k + 1) % 3, (k + 2) % 3
            z = embed_vertical(pt.space, KForm.basis(pt.frame.space, (m,)))
            out.append(wedge(wedge(z, KForm.basis(pt.space, (i,))), KForm.basis(pt.space, (j,))))
    return out


@pytest.mark.parametrize("t", T_VALUES)
def test_pi7_formula_equals_bruteforce(t):
    pt = ProductG2Point(QuaternionicFrame.standard(), t)
    for gamma in _spanning_set(pt):
        assert pi7_formula(pt, gamma) == pi7_bruteforce(pt, gamma)


@pytest.mark.parametrize("t", T_VALUES)
def test_dtheta_formula_equals_linearization(t):
    pt = ProductG2Point(QuaternionicFrame.standard(), t)
    for gamma in _spanning_set(pt):
        assert dtheta_formula(pt, gamma) == dtheta_bruteforce(pt, gamma)


def test_formulas_on_rotated_frame():
    fr = QuaternionicFrame.standard().rotated(3, Fraction(3, 5), Fraction(4, 5))
    pt = ProductG2Point(fr, Fraction(2))
    for gamma in _spanning_set(pt)[:8]:
        assert pi7_formula(pt, gamma) == pi7_bruteforce(pt, gamma)
        assert dtheta_formula(pt, gamma) == dtheta_bruteforce(pt, gamma)


def test_zero_input_and_unsupported_type():
    pt = ProductG2Point(QuaternionicFrame.standard(), 1)
    zero = KForm.zero_form(pt.space, 3)
    assert pi7_formula(pt, zero).is_zero()
    mixed = wedge(KForm.basis(pt.space, (3, 4)), KForm.basis(pt.space, (0,)))  # type (2,1)
    with pytest.raises(DegreeError):
        pi7_formula(pt, mixed)
    with pytest.raises(DegreeError):
        dtheta_formula(pt, mixed)


def test_appendix_map_ranks():
    rep = appendix_maps(QuaternionicFrame.standard())
    assert rep["dim_ker_A"] == 15
    assert rep["rank_B"] == 15
    assert rep["image_B_equals_ker_A"]
    assert rep["rank_C"] == 48


def test_appendix_maps_on_rotated_frame():
    rep = appendix_maps(QuaternionicFrame.standard().rotated(2, Fraction(3, 5), Fraction(4, 5)))
    assert rep["dim_ker_A"] == 15 and rep["rank_B"] == 15 and rep["rank_C"] == 48


def test_appendix_single_element_kernel_member():
    fr = QuaternionicFrame.standard()
    img = b_map_single(fr, 1, 0, 0, Fraction(1, 2))
    expect = hodge(fr.j_oneform(1, KForm.basis(fr.space, (0,))))
    assert img == {(0, idx): v for idx, v in expect.coeffs.items()}
    # the image lies in the kernel of the wedge contraction
    total = KForm.zero_form(fr.space, 4)
    for (p, tri), val in img.items():
        total = total + wedge(KForm.basis(fr.space, (p,)), KForm.basis(fr.space, tri)).scale(val)
    assert total.is_zero()


def test_lemma_residuals_quadratic_fields():
    fr = QuaternionicFrame.standard("float")
    sp = fr.space
    res0 = lemma51_residuals(fr, lambda q: KForm(sp, 1, {(1,): 2.0}), [0.1, 0.2, 0.3, 0.4], 1e-3)
    assert max(res0.values()) < 1e-12

    def alpha(q):
        return KForm(sp, 1, {(0,): q[1]})

    res = lemma51_residuals(fr, alpha, [0.3, 0.7, -0.2, 0.5], 1e-3, f_field=lambda q: q[0] * q[2])
    assert max(res.values()) < 1e-9


def test_flat_laplacian_acts_componentwise_on_selfdual_forms():
    fr = QuaternionicFrame.standard("float")
    f = lambda q: q[0] * q[2] + q[1] ** 2
    p = np.array([0.4, -0.3, 0.8, 0.2])
    lap_f = laplacian_fd(lambda q: KForm(fr.space, 0, {(): f(q)}), p, 5e-3).coeffs.get((), 0.0)
    for k in range(3):
        lap_form = laplacian_fd(lambda q, kk=k: fr.omegas[kk].scale(f(q)), p, 5e-3)
        assert norm(lap_form - fr.omegas[k].scale(lap_f)) < 1e-9


def test_dstar_is_adjoint_grade():
    """d* = -*d* reproduces minus the divergence on linear 1-forms."""
    fr = QuaternionicFrame.standard("float")
    sp = fr.space

    def field(q):
        return KForm(sp, 1, {(0,): 2 * q[0], (1,): -q[1], (2,): 3 * q[3]})

    val = dstar_fd(field, np.array([0.1, 0.4, -0.2, 0.3]), 1e-3)
    assert abs(val.coeffs.get((), 0.0) - (-(2 - 1))) < 1e-10


@pytest.mark.parametrize("axis", [1, 3])
def test_rotating_pair_is_closed(axis):
    theta_fn = lambda x: 0.3 * x[0] + 0.7 * x[1] * x[2] - 0.2 * x[2] ** 2
    theta_grad = lambda x: (0.3, 0.7 * x[2], 0.7 * x[1] - 0.4 * x[2])
    model = RotatingPairModel(axis, theta_fn, theta_grad)
    p7 = np.array([0.2, -0.4, 0.6, 0.5, -0.3, 0.8, 0.1])
    assert fd_exterior_derivative(model.phi_tilde, p7, 1e-3).max_abs() < 1e-6
    assert fd_exterior_derivative(model.psi_tilde, p7, 1e-3).max_abs() < 1e-6
    # the unperturbed pair is pointwise dual
    pt = model.point_at(p7[:3])
    st = pt.structure
    assert norm(st.psi - st.embed(pt.psi)) < 1e-12


@pytest.mark.parametrize("axis", [1, 3])
def test_divergence_relations_on_synthetic_pair(axis):
    theta_fn = lambda x: 0.3 * x[0] + 0.7 * x[1] * x[2] - 0.2 * x[2] ** 2
    theta_grad = lambda x: (0.3, 0.7 * x[2], 0.7 * x[1] - 0.4 * x[2])
    model = RotatingPairModel(axis, theta_fn, theta_grad)
    x = np.array([0.2, -0.4, 0.6])
    y = np.array([0.5, -0.3, 0.8, 0.1])
    residuals = model.divergence_relation_residuals(x, y, h=2e-3)
    assert max(residuals) < 1e-9
    # the relation is nontrivial: at least one side is order one
    fr = model.frame_at(x)
    xi_at, _ = model.correction_fields(x)
    sides = []
    for a in range(3):
        b, c = (a + 1) % 3, (a + 2) % 3
        term = dstar_fd(lambda q: fr.j_oneform(b + 1, restrict_vertical(xi_at(q)[c], fr.space)), y, 2e-3)
        sides.append(abs(term.coeffs.get((), 0.0)))
    assert max(sides) > 0.1


def test_type_extraction_roundtrip():
    pt = ProductG2Point(QuaternionicFrame.standard(), 1)
    zetas = [embed_vertical(pt.space, KForm.basis(pt.frame.space, (m,))).scale(Fraction(m + 1, 2)) for m in range(3)]
    built = KForm.zero_form(pt.space, 3)
    for k in range(3):
        i, j = (k + 1) % 3, (k + 2) % 3
        built = built + wedge(wedge(zetas[k], KForm.basis(pt.space, (i,))), KForm.basis(pt.space, (j,)))
    assert type_component(built, 1, 2) == built
    recovered = pt.extract_zetas(built)
    for k in range(3):
        assert recovered[k] == zetas[k]
    chi = embed_vertical(pt.space, KForm.basis(pt.frame.space, (2,)))
    e123 = wedge(wedge(KForm.basis(pt.space, (0,)), KForm.basis(pt.space, (1,))), KForm.basis(pt.space, (2,)))
    assert pt.extract_chi(wedge(chi, e123)) == chi
