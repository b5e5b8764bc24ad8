from dataclasses import replace

import numpy as np
import pytest

from hamspec import continuum, validate
from hamspec.grid import make_grid, weighted_norm
from hamspec.problem import build_problem


@pytest.fixture(scope="module")
def sampled():
    return build_problem(20.0, 401, discretization="sampled")


@pytest.mark.parametrize("scheme", continuum.SCHEMES)
def test_free_potential_returns_free_wave(scheme):
    g = make_grid(10, 101)
    for p in continuum.PARITIES:
        ef = continuum.solve_lippmann_schwinger(2.0, p, np.zeros(101), 1.0, g, scheme)
        np.testing.assert_array_equal(ef.e_values, continuum.free_wave(2.0, 1.0, p, g, scheme))


def test_free_wave_parity():
    g = make_grid(10, 101)
    odd = continuum.free_wave(2.0, 1.0, "odd", g)
    even = continuum.free_wave(2.0, 1.0, "even", g)
    np.testing.assert_allclose(odd, -odd[::-1], atol=1e-14)
    np.testing.assert_allclose(even, even[::-1], atol=1e-14)
    np.testing.assert_allclose(odd, np.sin(np.sqrt(3.0) * g.points))


def test_lattice_dispersion():
    g = make_grid(10, 101)
    k = continuum.wavenumber(2.0, 1.0, g, "lattice")
    h = g.spacing
    assert 4 * np.sin(k * h / 2) ** 2 / h**2 == pytest.approx(3.0)
    with pytest.raises(ValueError):
        continuum.wavenumber(0.5, 1.0, g)
    with pytest.raises(ValueError):
        continuum.wavenumber(continuum.band_top(1.0, g) + 1.0, 1.0, g, "lattice")


def test_dk_domega_numerical():
    g = make_grid(10, 101)
    for scheme in continuum.SCHEMES:
        d = 1e-6
        num = (continuum.wavenumber(2.0 + d, 1.0, g, scheme) - continuum.wavenumber(2.0 - d, 1.0, g, scheme)) / (2 * d)
        assert continuum.dk_domega(2.0, 1.0, g, scheme) == pytest.approx(num, rel=1e-7)


def test_lattice_free_resolvent_is_green_function():
    g = make_grid(10, 201)
    m, w = 1.0, 2.0
    G = continuum.free_resolvent(w, m, g, "lattice").operator()
    h = g.spacing
    n = g.n_points
    # (-D_h + m^2 - w^2) G = I away from the truncation rows
    D = (np.diag(np.full(n, 2.0)) - np.diag(np.ones(n - 1), 1) - np.diag(np.ones(n - 1), -1)) / h**2
    R = (D + (m**2 - w**2) * np.eye(n)) @ G
    np.testing.assert_allclose(R[1:-1, 1:-1], np.eye(n)[1:-1, 1:-1], atol=1e-9)


def test_outgoing_kernel_sign():
    g = make_grid(10, 11)
    K = continuum.free_resolvent(2.0, 1.0, g, "line")
    k = np.sqrt(3.0)
    assert K.kernel[0, 0] == pytest.approx(1j / (2 * k))


def test_line_scheme_matches_reflectionless_oracle(sampled):
    g, m = sampled.grid, sampled.model.mass
    for p in continuum.PARITIES:
        e = continuum.solve_lippmann_schwinger(2.5, p, sampled.V, m, g, "line").e_values
        ref = validate.reflectionless_eigenfunction(g.points, 2.5, m, p)
        assert weighted_norm(e - ref, 2, g) / weighted_norm(ref, 2, g) < 1e-4


def test_line_scheme_fourth_order():
    errs = []
    for n in (201, 401):
        pr = build_problem(20.0, n, discretization="sampled")
        e = continuum.solve_lippmann_schwinger(2.0, "even", pr.V, pr.mass, pr.grid, "line").e_values
        ref = validate.reflectionless_eigenfunction(pr.grid.points, 2.0, pr.mass, "even")
        errs.append(weighted_norm(e - ref, 2, pr.grid))
    assert np.log2(errs[0] / errs[1]) > 3.5


def test_oracle_solves_ode():
    x = np.linspace(-5, 5, 2001)
    h = x[1] - x[0]
    m, w = np.sqrt(2.0), 2.0
    u = validate.reflectionless_eigenfunction(x, w, m, "odd")
    V = m**2 - 1.5 * m**2 / np.cosh(m * x / 2) ** 2
    r = -(u[2:] - 2 * u[1:-1] + u[:-2]) / h**2 + (V[1:-1] - w**2) * u[1:-1]
    assert np.abs(r).max() < 1e-4


def test_lattice_eigenfunction_residuals(small_problem):
    pr = small_problem
    for p in continuum.PARITIES:
        ef = continuum.solve_lippmann_schwinger(2.2, p, pr.V, pr.mass, pr.grid, "lattice")
        ef = continuum.lift_to_hamilton(continuum.normalize_continuum([ef], pr.mass, pr.grid)[0], pr.system)
        assert continuum.eigen_residual(ef, pr.S.matrix, pr.grid) < 1e-12
        # sqrt(S) is nonlocal, so the Dirichlet wall leaks in with exponential decay
        res = [continuum.hamilton_residuals(ef, pr.system, pr.grid, fraction=f) for f in (0.75, 0.5, 0.25)]
        assert res[0]["H"] > res[1]["H"] > res[2]["H"]
        assert res[2]["H"] < 1e-11 and res[2]["A"] < 1e-10


def test_negative_omega_lift(small_problem):
    pr = small_problem
    pos = continuum.lift_to_hamilton(continuum.solve_lippmann_schwinger(2.2, "odd", pr.V, pr.mass, pr.grid, "lattice"), pr.system)
    neg = continuum.lift_to_hamilton(continuum.solve_lippmann_schwinger(-2.2, "odd", pr.V, pr.mass, pr.grid, "lattice"), pr.system)
    n = pr.grid.n_points
    np.testing.assert_allclose(neg.h_values[n:], -pos.h_values[n:])
    assert continuum.hamilton_residuals(neg, pr.system, pr.grid, fraction=0.25)["H"] < 1e-11


def test_normalization_is_idempotent(small_problem):
    pr = small_problem
    ef = continuum.solve_lippmann_schwinger(2.2, "even", pr.V, pr.mass, pr.grid, "lattice")
    once = continuum.normalize_continuum([ef], pr.mass, pr.grid)[0]
    twice = continuum.normalize_continuum([once], pr.mass, pr.grid)[0]
    np.testing.assert_allclose(once.e_values, twice.e_values)


@pytest.mark.parametrize("scheme", continuum.SCHEMES)
def test_ll2_agrees(small_problem, sampled, scheme):
    pr = small_problem if scheme == "lattice" else sampled
    for p in continuum.PARITIES:
        e = continuum.solve_lippmann_schwinger(2.4, p, pr.V, pr.mass, pr.grid, scheme).e_values
        e2 = continuum.ll2_eigenfunction(2.4, p, pr.V, pr.mass, pr.grid, scheme)
        assert weighted_norm(e - e2, 2, pr.grid) / weighted_norm(e2, 2, pr.grid) < 1e-8


def test_continuity_in_omega(small_problem):
    pr = small_problem
    scan = continuum.continuity_scan(2.3, "odd", pr.V, pr.mass, pr.grid, "lattice")
    # difference quotients settle on ||d e / d omega||
    q = [v for _, v in scan]
    assert abs(q[1] - q[2]) < abs(q[0] - q[1])
    assert abs(q[1] - q[2]) < 1e-2 * q[2]


def test_lap_surrogate_converges(small_problem):
    pr = small_problem
    x = pr.grid.points
    u = np.exp(-x**2)
    v = np.exp(-((x - 1) ** 2))
    scan = continuum.lap_surrogate(2.0, pr.V, pr.mass, pr.grid, u, v, "lattice", epsilons=(1e-1, 1e-2, 1e-3, 1e-4))
    assert scan.monotone
    assert abs(scan.values[-1] - scan.limit) < 1e-3 * abs(scan.limit)


def test_resolvent_matches_direct_inverse(small_problem):
    pr = small_problem
    z = 5.0 + 8.0j
    R = continuum.resolvent(z, pr.V, pr.mass, pr.grid, "lattice")
    # deep inside the box the transparent and Dirichlet resolvents agree once waves decay
    Rd = np.linalg.inv(pr.S.matrix - z * np.eye(pr.grid.n_points))
    mid = np.abs(pr.grid.points) < 2
    np.testing.assert_allclose(R[np.ix_(mid, mid)], Rd[np.ix_(mid, mid)], atol=1e-6)


def test_jost_free_is_transparent():
    g = make_grid(10, 101)
    assert abs(continuum.jost_transmission(np.zeros(101), g, 0.01)) == pytest.approx(1.0, abs=1e-12)


def test_resonance_detector_fixtures(default_problem):
    pr = default_problem
    free = continuum.detect_resonance(np.zeros(pr.grid.n_points), pr.mass, pr.grid)
    kink = continuum.detect_resonance(pr.V, pr.mass, pr.grid)
    det = continuum.detect_resonance(pr.V + 0.3 * np.exp(-pr.grid.points**2), pr.mass, pr.grid)
    assert free.resonant and kink.resonant
    assert not det.resonant
    assert det.transmission == pytest.approx(0.462, abs=0.005)
    assert kink.to_dict()["resonant"] is True


def test_quadrature_integrates_polynomials():
    q = continuum.continuum_quadrature(1.0, 10.0, margin=1e-6)
    assert q.panels[0] == pytest.approx(1.0 + 1e-6)
    assert q.panels[-1] == pytest.approx(10.0)
    a, b = 1.0 + 1e-6, 10.0
    assert np.sum(q.weights * q.nodes**3) == pytest.approx((b**4 - a**4) / 4, rel=1e-13)
    widths = np.diff(q.panels)
    assert widths.max() <= 0.5 + 1e-12


def test_quadrature_rejects_empty_range():
    with pytest.raises(ValueError):
        continuum.continuum_quadrature(1.0, 1.0)


def test_smeared_delta_free_line():
    g = make_grid(60, 1201)
    V = np.zeros(g.n_points)
    q = continuum.continuum_quadrature(1.0, 4.0, 1e-6, nodes_per_panel=16, max_width=0.1)
    fam = continuum.normalize_continuum([continuum.solve_lippmann_schwinger(w, "odd", V, 1.0, g, "lattice") for w in q.nodes], 1.0, g)
    fam = [replace(ef, h_values=continuum.lift_vector(ef.e_values, ef.omega)) for ef in fam]
    res = continuum.smeared_delta_test(fam, q.weights, continuum.bump(q.nodes, 2.0, 3.0), g)
    assert res.rel_error < 1e-2


def test_bump_support():
    w = np.linspace(0, 5, 501)
    b = continuum.bump(w, 2.0, 3.0)
    assert np.all(b[(w <= 2) | (w >= 3)] == 0)
    assert b.max() == pytest.approx(np.exp(-1.0), rel=1e-4)
