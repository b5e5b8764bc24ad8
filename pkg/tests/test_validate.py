import numpy as np
import pytest

from hamspec import krein, validate
from hamspec.acceptance import gaussian_initial_data


def test_exact_propagator_at_zero(small_problem):
    pr = small_problem
    psi, psid = gaussian_initial_data(pr.grid.points)
    p, q = validate.exact_spectral_propagate(pr.spectral, psi, psid, 0.0)
    np.testing.assert_allclose(p, psi, atol=1e-12)
    np.testing.assert_allclose(q, psid, atol=1e-12)


def test_exact_propagator_matches_krein_reconstruction(small_problem):
    pr = small_problem
    psi, psid = gaussian_initial_data(pr.grid.points)
    X0 = np.concatenate([psi, psid])
    for t in (0.5, 7.0):
        p, q = validate.exact_spectral_propagate(pr.spectral, psi, psid, t)
        np.testing.assert_allclose(np.concatenate([p, q]), krein.reconstruct_X(pr.system, X0, t).real, atol=1e-10)


def test_zero_mode_drifts_linearly(small_problem):
    pr = small_problem
    ds = pr.zero_mode
    p, q = validate.exact_spectral_propagate(pr.spectral, np.zeros_like(ds), ds, 4.0)
    np.testing.assert_allclose(p, 4.0 * ds, atol=1e-10)
    np.testing.assert_allclose(q, ds, atol=1e-10)


def test_sinc_series_is_continuous():
    t = 3.0
    roots = np.array([0.0, 0.99e-4, 1.01e-4, 1.0])
    f = validate._sinc_factor(roots, t)
    assert f[0] == t
    np.testing.assert_allclose(f[1:3], np.sin(roots[1:3] * t) / roots[1:3], rtol=1e-12)


def test_leapfrog_second_order(small_problem):
    pr = small_problem
    psi, psid = gaussian_initial_data(pr.grid.points)
    steps, errs = [0.04, 0.02, 0.01], []
    for dt in steps:
        tr = validate.leapfrog(pr.S, psi, psid, dt, 4.0, record_every=int(round(1.0 / dt)))
        ex = validate.exact_trajectory(pr.spectral, pr.S, psi, psid, tr.times)
        errs.append(validate.compare(tr, ex, pr.system, grid=pr.grid, measure=pr.grid.spacing)["sup_x"])
    assert validate.convergence_order(steps, errs) > 1.9


def test_leapfrog_energy_bounded(small_problem):
    pr = small_problem
    psi, psid = gaussian_initial_data(pr.grid.points)
    tr = validate.leapfrog(pr.S, psi, psid, 0.02, 20.0, record_every=50)
    assert tr.energy_drift < 1e-3


def test_leapfrog_rejects_unstable_step(small_problem):
    pr = small_problem
    psi, psid = gaussian_initial_data(pr.grid.points)
    dt = 1.01 * validate.stability_limit(pr.S)
    with pytest.raises(ValueError):
        validate.leapfrog(pr.S, psi, psid, dt, 10 * dt)


def test_stability_limit_bounds_spectrum(small_problem):
    lam_max = small_problem.spectral.eigenvalues.max()
    assert validate.stability_limit(small_problem.S) <= 2 / np.sqrt(lam_max)


def test_trajectory_validation():
    with pytest.raises(ValueError):
        validate.Trajectory(np.array([0.0, 1.0]), [np.zeros(2)])
    with pytest.raises(ValueError):
        validate.Trajectory(np.array([1.0, 0.0]), [np.zeros(2), np.zeros(2)])


def test_convergence_order_of_exact_power_law():
    h = np.array([0.1, 0.05, 0.025])
    assert validate.convergence_order(h, 3 * h**2) == pytest.approx(2.0)
