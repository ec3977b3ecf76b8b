"""Region schedule, cutoff, and the exact power-law exponent calculus."""

import math
from fractions import Fraction

import numpy as np
import pytest

from g2eh.schedule import (
    GAMMA,
    CutoffFn,
    GammaExpr,
    LogarithmicThresholdError,
    PowerLawBound,
    RegionSchedule,
    alpha_window,
    boundary_consistency,
    c0_exponent,
    form_bound,
    golden_verdict,
    lp_exponent,
    lp_norm_quadrature,
    pointwise_bound,
    region_of,
    torsion_table,
)


def test_gamma_expr_arithmetic_and_order():
    e = GammaExpr.of(Fraction(2)) + GAMMA * Fraction(-1, 9)
    assert str(e) == "2-1/9*g"
    assert e.at(Fraction(1, 100)) == Fraction(2) - Fraction(1, 900)
    assert GammaExpr.of(1) < GammaExpr.of(2)
    # for infinitesimally small positive gamma, the constant term decides first
    assert GammaExpr.of(2) + GAMMA * (-1) < GammaExpr.of(2)
    assert min(GammaExpr.of(Fraction(32, 9)), GammaExpr.of(4) + GAMMA * Fraction(-4, 5)) == GammaExpr.of(Fraction(32, 9))


def test_cutoff_plateaus_and_smooth_joins():
    c = CutoffFn()
    assert c(0.0) == 0.0 and c(1.0) == 0.0 and c(2.0) == 1.0 and c(5.0) == 1.0
    assert 0.0 < c(1.5) < 1.0
    for x in (1.0, 2.0):
        eps = 1e-4
        inside = min(max(x + (eps if x == 1.0 else -eps), 1.0), 2.0)
        # value, first and second derivative all continuous at the joins
        assert abs(c(inside) - c(x)) < 1e-7
        assert abs(c.derivative(inside, 1)) < 1e-6
        assert abs(c.derivative(inside, 2)) < 1e-2
    assert c.derivative(1.5, 1) > 0


def test_region_schedule_examples():
    assert region_of(1e-3, 1.0, 0.5) == 1
    assert region_of(1e-3, 1.0, 1e-3 ** (-0.5)) == 4
    assert region_of(1e-3, 1.0, 3.0 * 1e-3 ** (-0.8)) == 6
    # boundaries belong to the lower-indexed region
    assert region_of(1e-3, 1.0, 1.0) == 1
    assert region_of(1e-3, 1.0, 1e-3 ** (-1.0 / 9.0)) == 2
    with pytest.raises(ValueError):
        region_of(1e-3, 1.0, 2e3)
    assert region_of(1e-3, 1.0, 2e3, outer=True) == 7


def test_schedule_validity_threshold():
    assert RegionSchedule(1e-3, 1.0).is_valid()
    assert not RegionSchedule(0.9, 1.0).is_valid()
    with pytest.raises(ValueError):
        RegionSchedule(0.9, 1.0).region_of(1.5)


def test_pointwise_bounds_tabulated():
    bounds = pointwise_bound()
    defect = bounds["defect"]
    assert (defect[1].a_exp, defect[1].b_exp) == (GammaExpr.of(2), GammaExpr.of(0))
    assert (defect[2].a_exp, defect[2].b_exp) == (GammaExpr.of(2), GammaExpr.of(2))
    assert defect[3].a_exp == GammaExpr.of(Fraction(16, 9))
    assert defect[4].b_exp == GammaExpr.of(-2) + GAMMA
    assert defect[5].a_exp == GammaExpr.of(Fraction(16, 5))
    assert defect[6] is None and defect[7] is None
    deriv = bounds["derivative"]
    assert deriv[4].b_exp == GammaExpr.of(-3) + GAMMA
    assert deriv[5].a_exp == GammaExpr.of(3)


def test_lp_exponent_examples():
    pb = PowerLawBound("x", GammaExpr.of(2), GammaExpr.of(2), "r")
    assert lp_exponent(pb, 2, Fraction(0), Fraction(-1, 9)) == GammaExpr.of(Fraction(32, 9))
    inner = PowerLawBound("x", GammaExpr.of(1), GammaExpr.of(0), "r")
    assert lp_exponent(inner, 14, None, Fraction(0)) == GammaExpr.of(Fraction(9, 7))
    b4 = PowerLawBound("x", GammaExpr.of(1), GammaExpr.of(-3) + GAMMA, "r")
    assert lp_exponent(b4, 14, Fraction(-1, 9), Fraction(-4, 5)) == GammaExpr.of(Fraction(100, 63)) + GAMMA * Fraction(-1, 9)
    # sup-norm column
    assert c0_exponent(pb, Fraction(0), Fraction(-1, 9)) == GammaExpr.of(Fraction(16, 9))


def test_logarithmic_threshold_flagged():
    pb = PowerLawBound("x", GammaExpr.of(1), GammaExpr.of(-2), "r")
    with pytest.raises(LogarithmicThresholdError):
        lp_exponent(pb, 2, Fraction(0), Fraction(-1))


def test_table_cells_exact_and_golden():
    table = torsion_table()
    verdict = golden_verdict()
    assert verdict["passed"], verdict["failures"]
    nonzero = [cell for cell in table.cells() if cell[2] is not None]
    assert len(nonzero) == 15
    for _, _, val in nonzero:
        assert isinstance(val, GammaExpr)
        assert isinstance(val.c0, Fraction) and isinstance(val.c1, Fraction)
    assert tuple(str(x) for x in table.aggregate) == ("16/9", "32/9", "8/7")


def test_alpha_window_values():
    assert alpha_window() == Fraction(1, 18)
    assert alpha_window(2, 4, 2) == Fraction(1, 2)
    assert alpha_window(Fraction(16, 9), Fraction(7, 2), Fraction(8, 7)) == 0


def test_boundary_consistency_matched_at_first_interface():
    rep = boundary_consistency()
    assert rep["defect"]["matched_2_3"]
    assert rep["derivative"]["matched_2_3"]
    # outer evaluation of the second region: t^2 (t^-1/9)^2 = t^16/9
    assert rep["defect"]["values"][2][1] == GammaExpr.of(Fraction(16, 9))


def test_form_bound_records():
    fb = form_bound("t2_tau_11", "outer")
    assert (fb.a_exp, fb.b_exp) == (GammaExpr.of(1), GammaExpr.of(-3))
    fb2 = form_bound("t2_xi_03", "outer", k=1)
    assert (fb2.a_exp, fb2.b_exp) == (GammaExpr.of(1), GammaExpr.of(1))
    fb3 = form_bound("t2_alpha_02", "outer")
    assert fb3.b_exp == GammaExpr.of(-2) + GAMMA
    vanish = form_bound("t4_theta_31", "outer")
    assert vanish.a_exp == GammaExpr.of(0) and "vanishes" in vanish.region
    with pytest.raises(KeyError):
        form_bound("t2_tau_11", "inner")


def test_quadrature_cross_check():
    rng = np.random.default_rng(11)
    for _ in range(5):
        a = Fraction(int(rng.integers(1, 4)))
        b = Fraction(int(rng.integers(-4, 3)), int(rng.integers(1, 4)))
        p = int(rng.choice([2, 14]))
        if b + Fraction(4, p) == 0:
            b += Fraction(1, 7)
        lo = Fraction(-1, int(rng.integers(2, 10)))
        n1 = lp_norm_quadrature(float(a), float(b), p, float(lo), -0.8, 1e-2)
        n2 = lp_norm_quadrature(float(a), float(b), p, float(lo), -0.8, 1e-3)
        measured = math.log10(n1 / n2)
        sym = lp_exponent(PowerLawBound("x", GammaExpr.of(a), GammaExpr.of(b), "r"), p, lo, Fraction(-4, 5))
        assert abs(measured - float(sym.c0)) <= 0.01 * abs(float(sym.c0))
