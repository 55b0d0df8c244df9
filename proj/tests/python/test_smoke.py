"""Smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import fvrb


def default_setup(level):
    grid = fvrb.tag_boundary(fvrb.build_grid(level, 5.0, 1.0), 2.0, 3.0)
    cat = fvrb.catalytic_index(grid)
    op = fvrb.assemble(grid, fvrb.hagen_poiseuille(1.0, 1.0), 1e-2, [0.2, 0.8, 0.0])
    return grid, cat, op


def test_dof_counts():
    expected = {0: 4, 1: 6, 2: 10, 3: 18}
    for level, n_cat in expected.items():
        grid = fvrb.tag_boundary(fvrb.build_grid(level, 5.0, 1.0), 2.0, 3.0)
        assert grid.n_nodes * 3 == 300 * 4**level
        assert len(fvrb.catalytic_index(grid)) == n_cat


def test_bernoulli():
    assert fvrb.bernoulli(0.0) == 1.0
    assert fvrb.bernoulli(1.0) == pytest.approx(1.0 / (math.e - 1.0), abs=1e-15)
    for x in (-30.0, -1.0, 0.3, 7.0):
        assert fvrb.bernoulli(-x) - fvrb.bernoulli(x) == pytest.approx(x, abs=1e-13)


def test_zero_rate_matches_inlet_state():
    grid, cat, op = default_setup(0)
    basis = fvrb.offline(op, grid, cat)
    sol = fvrb.online(basis, fvrb.mass_action_co_oxidation(0.0))
    assert sol.newton_iters == 1
    assert np.allclose(sol.boundary_trace[0], 0.2)
    fields = fvrb.reconstruct(op, basis, sol)
    assert np.allclose(fields[:, 1], 0.8, atol=1e-14)


def test_reduced_matches_global():
    grid, cat, op = default_setup(1)
    basis = fvrb.offline(op, grid, cat)
    model = fvrb.mass_action_co_oxidation(1e10)
    sol = fvrb.online(basis, model)
    fields = fvrb.reconstruct(op, basis, sol)
    ref = fvrb.global_solve(op, grid, cat, model)
    assert np.abs(fields - ref.fields).max() <= 1e-9
    assert abs(sol.newton_iters - ref.newton_iters) <= 3


def test_basis_reuse_without_refactorization():
    grid, cat, op = default_setup(1)
    basis = fvrb.offline(op, grid, cat)
    assert op.n_factorizations == 1
    solves = op.n_solves
    for k in (1e2, 1e6, 1e10):
        fvrb.online(basis, fvrb.mass_action_co_oxidation(k))
    assert op.n_factorizations == 1
    assert op.n_solves == solves


def test_custom_rate_law():
    grid, cat, op = default_setup(0)
    basis = fvrb.offline(op, grid, cat)
    model = fvrb.reaction_model(
        3,
        [-2.0, -1.0, 1.0],
        lambda y: 0.5 * y[0],
        lambda y: [0.5, 0.0, 0.0],
        name="linear_co",
    )
    sol = fvrb.online(basis, model)
    assert sol.residual_norm <= 1e-11
    assert (sol.boundary_trace[0] < 0.2).all()


def test_basis_file_roundtrip(tmp_path):
    grid, cat, op = default_setup(0)
    basis = fvrb.offline(op, grid, cat)
    path = str(tmp_path / "basis.csv")
    fvrb.save_basis(basis, path)
    loaded = fvrb.load_basis(path)
    assert np.array_equal(loaded.G, basis.G)
    a = fvrb.online(basis, fvrb.mass_action_co_oxidation(1e8))
    b = fvrb.online(loaded, fvrb.mass_action_co_oxidation(1e8))
    assert np.array_equal(a.alpha, b.alpha)


def test_run_scenario_report():
    cfg = fvrb.ScenarioConfig()
    cfg.level = 0
    cfg.repeats = 1
    rep = fvrb.run_scenario(cfg)
    assert rep.n_global == 300
    assert rep.n_reduced == 4
    assert rep.max_diff <= 1e-9
