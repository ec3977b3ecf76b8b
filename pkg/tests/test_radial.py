"""Invariant radial Poisson problems with decay verification."""

import numpy as np
import pytest

from g2eh.radial import (
    RadialGrid,
    RadialOperator,
    SourceDecayError,
    decaying_bump_source,
    flat_radial_oracle,
    powerlaw_source,
    solve_poisson,
    solve_twice_iteratively,
    verify_rates,
)


def test_grid_validation():
    with pytest.raises(ValueError):
        RadialGrid(np.linspace(0.0, 10.0, 100))  # starts at zero
    with pytest.raises(ValueError):
        RadialGrid(np.geomspace(1.0, 10.0, 100))  # under three decades
    g = RadialGrid.log(0.05, 400.0, 800)
    assert g.nodes[0] == pytest.approx(0.05)
    refined = g.refined()
    assert len(refined.nodes) == 2 * len(g.nodes) - 1
    assert np.allclose(refined.nodes[::2], g.nodes)


def test_operator_samples_unit_volume_density():
    op = RadialOperator(1.0, RadialGrid.log(0.05, 400.0, 200))
    r = op.grid.nodes
    # the resolved metric has flat volume, so rho = r^3 exactly
    assert np.max(np.abs(op.rho / r**3 - 1.0)) < 1e-10
    # radial conductivity sqrt(r^4 + a^2) / r^2: large near the bolt, 1 at infinity
    expected = np.sqrt(r**4 + 1.0) / r**2
    assert np.max(np.abs(op.kappa / expected - 1.0)) < 1e-9


def test_discrete_self_adjointness():
    op = RadialOperator(1.0)
    rng = np.random.default_rng(0)
    n = len(op.grid.nodes)
    u = np.zeros(n)
    v = np.zeros(n)
    u[100:900] = rng.standard_normal(800)
    v[150:950] = rng.standard_normal(800)
    lhs = op.inner(op.apply(u), v)
    rhs = op.inner(u, op.apply(v))
    assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), 1.0)


def test_zero_source_gives_zero():
    sol = solve_poisson(1.0, lambda r: 0.0)
    assert np.max(np.abs(sol.values)) <= 1e-10


def test_bump_source_far_field_slope():
    sol = solve_poisson(1.0, decaying_bump_source())
    assert sol.residual < 1e-8
    assert abs(sol.slope(20.0, 100.0) + 2.0) < 0.1


def test_refinement_is_second_order():
    grid = RadialGrid.log(0.05, 400.0, 800)
    s1 = solve_poisson(1.0, decaying_bump_source(), grid=grid)
    s2 = solve_poisson(1.0, decaying_bump_source(), grid=grid.refined())
    s3 = solve_poisson(1.0, decaying_bump_source(), grid=grid.refined().refined())
    d1 = np.max(np.abs(s2.values[::2] - s1.values))
    d2 = np.max(np.abs(s3.values[::2] - s2.values))
    assert d1 / d2 > 3.0  # ratio 4 for a second-order scheme


def test_flat_limit_matches_quadrature_oracle():
    grid = RadialGrid.log(0.05, 400.0, 1600)
    src = decaying_bump_source()
    sol = solve_poisson(1e-6, src, grid=grid)
    mask = (grid.nodes >= 3.0) & (grid.nodes <= 60.0)
    oracle = flat_radial_oracle(src, grid.nodes[mask])
    assert np.max(np.abs(sol.values[mask] - oracle) / np.abs(oracle)) < 1e-3


def test_indicial_roots_and_shooting():
    rep = verify_rates(1.0)
    assert abs(rep["indicial_roots"][0]) < 1e-9
    assert abs(rep["indicial_roots"][1] + 2.0) < 0.05
    assert abs(rep["shooting_slopes"]["constant"]) < 0.05
    assert abs(rep["shooting_slopes"]["decaying"] + 2.0) < 0.1
    assert rep["window"] == (-2.0, 0.0)


@pytest.mark.parametrize("gamma", [0.25, 0.4])
def test_decay_window_for_powerlaw_sources(gamma):
    grid = RadialGrid.log(0.05, 8000.0, 2600)
    sol = solve_poisson(1.0, powerlaw_source(gamma), gamma=gamma, grid=grid)
    slope = sol.slope(200.0, 1000.0)
    assert -2.0 <= slope <= -2.0 + gamma + 0.1


def test_uniqueness_from_different_starts():
    u1, u2 = solve_twice_iteratively(1.0, decaying_bump_source(), seed=5)
    assert np.max(np.abs(u1 - u2)) / np.max(np.abs(u1)) < 1e-10


def test_non_decaying_source_flagged():
    with pytest.raises(SourceDecayError):
        solve_poisson(1.0, lambda r: 1.0)
    with pytest.raises(SourceDecayError):
        solve_poisson(1.0, lambda r: 1.0 / (1.0 + r))


def test_growth_mode_outside_window_detected():
    sol = solve_poisson(1.0, decaying_bump_source(), outer="neumann")
    assert abs(sol.slope(50.0, 300.0)) < 0.2  # flat tail: not in the decay window


def test_gamma_validation():
    with pytest.raises(ValueError):
        solve_poisson(1.0, decaying_bump_source(), gamma=0.75)
    with pytest.raises(ValueError):
        solve_poisson(1.0, decaying_bump_source(), gamma=0.0)
