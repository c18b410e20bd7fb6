"""Smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import pfflow


def test_sampling_is_deterministic():
    a = pfflow.sample_reference(100, seed=7)
    b = pfflow.sample_reference(100, seed=7)
    assert np.array_equal(a.points, b.points)
    assert a.count == 100


def test_map_and_gradient():
    m = pfflow.PushforwardMap1D("sinusoidal", 2, 3.0, np.array([0.0, 1.0]))
    assert m.value(3.7) == pytest.approx(3.7)
    assert list(m.grad_theta(2.0)) == [1.0, 2.0]


def test_metric_identity():
    ens = pfflow.sample_reference(200000, seed=3)
    m = pfflow.PushforwardMap1D("sinusoidal", 2, 3.0, np.array([0.0, 1.0]))
    G = pfflow.metric_1d(m, ens)
    assert np.allclose(G.entries, np.eye(2), atol=1e-2)
    u, ridge = pfflow.solve_regularized(G, np.array([1.0, -2.0]), 0.0)
    assert np.allclose(G.entries @ u, [1.0, -2.0], atol=1e-12)


def test_dual_entropy_gaussian():
    ens = pfflow.sample_reference(20000, seed=5)
    m = pfflow.PushforwardMap1D("sinusoidal", 2, 3.0, np.array([0.0, 1.0]))
    r = pfflow.solve_dual_entropy(m, ens)
    assert r.entropy == pytest.approx(-1.41894, abs=5e-2)
    assert r.entropy <= pfflow.entropy_change_of_variables(m, ens) + 0.01


def test_affine_integration_matches_closed_form():
    V = pfflow.Potential.quadratic1d(1.0, 0.0, 1.0)
    states = pfflow.integrate_affine(np.array([[4.0]]), np.array([1.0]), V, 1e-3, 1.0)
    mean, cov = pfflow.gaussian_moments(states[-1])
    assert cov[0, 0] == pytest.approx(1.0 + 3.0 * math.exp(-2.0), abs=1e-6)
    assert mean[0] == pytest.approx(math.exp(-1.0), abs=1e-6)


def test_run_flow_descends():
    V = pfflow.Potential.quadratic1d(1.0, 0.0, 1.0)
    basis = pfflow.BasisSet("sinusoidal", 2, 3.0)
    cfg = pfflow.FlowConfig()
    cfg.dt = 1e-3
    cfg.steps = 200
    cfg.sample_count = 2000
    cfg.seed = 11
    traj = pfflow.run_flow(np.array([1.0, 2.0]), basis, V, cfg)
    assert traj.complete
    assert len(traj.times) == 201
    assert traj.free_energies[-1] < traj.free_energies[0]


def test_oracles():
    V = pfflow.Potential.double_well(0.25)
    gibbs = pfflow.gibbs_density(V, -3.0, 3.0, 1001)
    assert gibbs.mass() == pytest.approx(1.0, abs=1e-10)
    particles = pfflow.sde_simulate(2000, V, 0.0, 1.0, 1e-2, 1.0, seed=3)
    w = pfflow.wasserstein1(particles, gibbs)
    assert 0.0 < w < 2.0


def test_errors_are_python_exceptions():
    with pytest.raises(pfflow.PfflowError):
        pfflow.sample_reference(0, seed=1)
