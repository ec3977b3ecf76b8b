"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Every criterion runs through the same suite functions the CLI drives, at
the tolerances pinned here; run with ``pytest tests/test_acceptance.py -s``
to see the per-criterion lines.
"""

import time
from fractions import Fraction

import numpy as np
import pytest

from g2eh import suites
from g2eh.forms import KForm, increasing_tuples
from g2eh.report import Check


def _drive(label: str, checks: list, budget: float | None, elapsed: float):
    failing = [c for c in checks if c.status != "pass"]
    status = "PASS" if not failing and (budget is None or elapsed <= budget) else "FAIL"
    budget_note = f", budget {budget:.0f}s" if budget is not None else ""
    print(f"ACCEPTANCE {label}: {status} ({len(checks)} checks, {elapsed:.2f}s{budget_note})")
    for c in failing:
        print(f"    failing: {c.id}  measured={c.measured}  expected={c.expected}")
    assert not failing, [c.id for c in failing]
    if budget is not None:
        assert elapsed <= budget, f"{label} exceeded its {budget}s budget ({elapsed:.2f}s)"


def test_criterion_1_exact_identities():
    """Exact identities in rational arithmetic, under five seconds."""
    t0 = time.time()
    checks = suites.identities_suite(seed=0)
    wanted = {
        "identity.theta_standard",
        "identity.quaternionic_frame",
        "identity.double_wedge_contraction",
        "identity.projector_ranks_deg2",
        "identity.projector_ranks_deg3",
        "identity.product_star_splitting",
    }
    assert wanted <= {c.id for c in checks}
    _drive("1 exact identities", checks, 5.0, time.time() - t0)


def test_criterion_2_linearization_oracle():
    """Analytic linearization vs the finite-difference Jacobian, and the
    quadratic remainder slope."""
    t0 = time.time()
    checks = suites.linearization_suite(seed=0, n_random=10, eps=1e-5)
    jac = next(c for c in checks if c.id == "linearization.jacobian_oracle")
    assert jac.tol == 1e-4
    slope = next(c for c in checks if c.id == "linearization.remainder_slope")
    assert slope.tol == 0.05
    _drive("2 linearization oracle", checks, None, time.time() - t0)


def test_criterion_3_projection_formulas():
    """Closed-form fibre projections equal the brute-force route exactly on
    spanning sets at three rational scales."""
    t0 = time.time()
    checks = suites.projection_formula_suite(seed=0)
    _drive("3 projection formulas", checks, None, time.time() - t0)


def test_criterion_4_exact_linear_algebra():
    """Kernel and rank bookkeeping of the contraction maps, under a second."""
    t0 = time.time()
    checks = suites.appendix_suite(seed=0)
    _drive("4 contraction-map ranks", checks, 1.0, time.time() - t0)


def test_criterion_5_metric_family():
    """The resolved metric family: potentials, decay, curvature, areas,
    dual forms, pair relation; under sixty seconds."""
    t0 = time.time()
    checks = suites.eh_suite(seed=0, a_values=(1.0, 2.5))
    ids = {c.id for c in checks}
    assert "eh.potential_forms_agree" in ids
    assert "eh.ale_decay" in ids
    assert "eh.ricci_flat" in ids
    assert "eh.bolt_area_a1p0" in ids and "eh.bolt_area_a2p5" in ids
    assert "eh.product_dual_form" in ids
    assert "eh.fundamental_relation_product" in ids and "eh.fundamental_relation_order" in ids
    _drive("5 metric family", checks, 60.0, time.time() - t0)


def test_criterion_6_fibre_solver():
    """Radial solver: triviality, far-field decay, flat oracle, rates."""
    t0 = time.time()
    checks = suites.fibre_suite(seed=0, a=1.0, gamma=0.25)
    ids = {c.id for c in checks}
    assert {"fibre.zero_source", "fibre.farfield_slope", "fibre.flat_oracle", "fibre.indicial_roots"} <= ids
    zero = next(c for c in checks if c.id == "fibre.zero_source")
    assert zero.tol == 1e-10
    oracle = next(c for c in checks if c.id == "fibre.flat_oracle")
    assert oracle.tol == 1e-3
    _drive("6 fibre solver", checks, None, time.time() - t0)


def test_criterion_7_torsion_calculus():
    """All exponent-table cells exact, aggregates 16/9, 32/9, 8/7, window
    1/18; under a second."""
    t0 = time.time()
    checks = suites.torsion_suite(seed=0)
    _drive("7 torsion calculus", checks, 1.0, time.time() - t0)


def test_criterion_8_topology_presets():
    """The four worked examples with intermediates, exact integers, under a
    second."""
    t0 = time.time()
    checks = suites.betti_suite(seed=0)
    ids = {c.id for c in checks}
    assert {"betti.preset_ex7_1", "betti.preset_ex7_2", "betti.preset_ex7_3", "betti.preset_ex7_5"} <= ids
    assert {"betti.resolution_formula", "betti.twisted_resolution_formula"} <= ids
    _drive("8 topology presets", checks, 1.0, time.time() - t0)
