"""End-to-end smoke tests for the saddlebench Python module."""

import json
import math

import numpy as np
import pytest

import saddlebench as sbm


def test_fixture_equilibrium():
    g = sbm.make_illcond_game(0.25)
    eq = sbm.solve_exact(g)
    expected = np.array([4.0, 2.0, 1.0]) / 7.0
    np.testing.assert_allclose(eq.x_star.values, expected, atol=1e-9)
    np.testing.assert_allclose(eq.y_star.values, expected, atol=1e-9)
    assert eq.value == pytest.approx(1.0 / 7.0, abs=1e-9)
    assert eq.support_x == [0, 1, 2]
    assert eq.support_y == [0, 1, 2]


def test_gap_and_projection():
    g = sbm.make_illcond_game(0.25)
    z = sbm.JointStrategy(sbm.SimplexVector.uniform(3),
                          sbm.SimplexVector.uniform(3))
    assert sbm.duality_gap(g, z) == pytest.approx(0.25, abs=1e-12)

    p = sbm.project_simplex(np.array([1.0, 0.6, 0.2]))
    np.testing.assert_allclose(p.values, [0.7, 0.3, 0.0], atol=1e-12)
    assert p.values.sum() == pytest.approx(1.0, abs=1e-12)


def test_simplex_vector_validation():
    with pytest.raises(Exception):
        sbm.SimplexVector(np.array([0.5, 0.6]))
    v = sbm.SimplexVector.uniform(4)
    assert v.dim == 4
    assert v[0] == pytest.approx(0.25)
    with pytest.raises(IndexError):
        v[4]


def test_diagnostics_fixture_values():
    g = sbm.make_illcond_game(0.25)
    eq = sbm.solve_exact(g)
    cert = sbm.certify_nondegenerate(g, eq)
    assert cert.is_nondegenerate
    assert cert.unique
    assert cert.complementarity_ok

    qs = sbm.q_transform(g, eq)
    np.testing.assert_allclose(qs.Q, [[0.75, 0.25], [0.25, 1.25]], atol=0)
    assert qs.d == 0.25

    diag = sbm.compute_diagnostics(g, eq, n_samples=100, seed=0)
    assert diag.gamma_P == pytest.approx(7.0 * math.sqrt(26.0) / 52.0,
                                         abs=1e-12)
    assert diag.sigma_min_Qbar == pytest.approx(0.5, abs=1e-12)
    assert 0.0 < diag.kappa_empirical <= 0.5

    bounds = sbm.stability_bounds(g, eq, qs, n_directions=8, seed=0)
    report = json.loads(sbm.report_json(diag, bounds))
    assert report["gamma_P"] == diag.gamma_P
    assert report["delta_ub_sigma"] == bounds.delta_ub_sigma
    assert "delta_ub_beta" not in report  # full support: no slack to lose


def test_solver_converges():
    g = sbm.make_illcond_game(0.25)
    eq = sbm.solve_exact(g)
    cfg = sbm.SolverConfig()
    cfg.algorithm = sbm.Algorithm.OGDA
    cfg.eps = 1e-5
    cfg.record_every = 100
    result = sbm.run_solver(g, cfg, eq=eq)
    assert result.converged
    assert result.phi_final <= 1e-5
    assert result.trajectory[0].phi == pytest.approx(0.25, abs=1e-12)
    assert result.trajectory[-1].dist_to_eq < 0.05


def test_perturbation_is_deterministic():
    base = np.zeros((4, 4))
    g1 = sbm.gaussian_perturb(base, 0.5, 42)
    g2 = sbm.gaussian_perturb(base, 0.5, 42)
    g3 = sbm.gaussian_perturb(base, 0.5, 43)
    np.testing.assert_array_equal(g1.A, g2.A)
    assert not np.array_equal(g1.A, g3.A)


def test_json_round_trip():
    g = sbm.gaussian_perturb(np.zeros((3, 5)), 0.25, 7)
    back = sbm.game_from_json(sbm.game_to_json(g))
    np.testing.assert_array_equal(back.A, g.A)


def test_iteration_bound_fixture():
    assert sbm.iteration_bound(0.1, 1.0, 1e-3) == 627296
    assert sbm.iteration_bound(18.0, 1.0, 1e-3) == 28
