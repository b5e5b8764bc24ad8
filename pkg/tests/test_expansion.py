import numpy as np
import pytest

from hamspec import continuum, expansion, krein, validate
from hamspec.acceptance import gaussian_initial_data


@pytest.fixture(scope="module")
def setup(small_problem):
    pr = small_problem
    fam = expansion.build_family(pr.system, pr.V, pr.mass, pr.grid, omega_max=6.0)
    psi, psid = gaussian_initial_data(pr.grid.points)
    X0 = np.concatenate([psi, psid]).astype(complex)
    exp = expansion.decompose(pr.system, X0, fam, threshold=pr.mass, measure=pr.grid.spacing)
    return pr, fam, X0, exp


def test_family_layout(setup):
    pr, fam, _, _ = setup
    assert len(fam) == fam.omega.size == fam.h.shape[0]
    for p in continuum.PARITIES:
        pos, neg = fam.channel(p, 1), fam.channel(p, -1)
        assert pos.size == neg.size > 0
        np.testing.assert_allclose(np.sort(fam.omega[pos]), np.sort(-fam.omega[neg]))
    assert fam.coverage == pytest.approx(6.0)
    assert np.abs(fam.omega).min() > pr.mass


def test_finite_system_expansion_is_exact(rng):
    s = krein.random_system(12, 2, 0.3, 21, isotropic=True)
    X0 = rng.standard_normal(12) + 0j
    exp = expansion.decompose(s, X0)
    for t in (0.0, 1.5, 9.0):
        np.testing.assert_allclose(expansion.reconstruct(exp, t), krein.reconstruct_X(s, X0, t), atol=1e-10)


@pytest.mark.parametrize("iso", [False, True])
def test_finite_secular_part(iso, rng):
    s = krein.random_system(10, 2, 0.3, 5, isotropic=iso)
    jd = krein.jordan_structure(s)
    for phi0, psi0 in jd.secular_pairs:
        exp = expansion.decompose(s, psi0.astype(complex))
        np.testing.assert_allclose(exp.phi0, phi0, atol=1e-9)
        assert np.abs(exp.discrete.C).max() < 1e-9


def test_secular_data_has_no_spectral_content(setup):
    pr, fam, _, _ = setup
    phi0, psi0 = krein.jordan_structure(pr.system).secular_pairs[0]
    exp = expansion.decompose(pr.system, psi0.astype(complex), fam, threshold=pr.mass, measure=pr.grid.spacing)
    assert np.abs(exp.continuum_C).max() < 1e-10
    assert np.abs(exp.discrete.C).max() < 1e-10
    np.testing.assert_allclose(expansion.reconstruct(exp, 3.0), 3.0 * phi0 + psi0, atol=1e-10)


def test_zero_data(setup):
    pr, fam, X0, _ = setup
    exp = expansion.decompose(pr.system, np.zeros_like(X0), fam, threshold=pr.mass, measure=pr.grid.spacing)
    assert not np.any(exp.continuum_C) and not np.any(exp.discrete.C)
    assert not np.any(expansion.reconstruct(exp, 2.0))


def test_decompose_requires_threshold(setup):
    pr, fam, X0, _ = setup
    with pytest.raises(ValueError):
        expansion.decompose(pr.system, X0, fam)
    with pytest.raises(ValueError):
        expansion.decompose(pr.system, X0, fam, Omega_max=10.0, threshold=pr.mass)


def test_parseval_budget(setup):
    pr, _, X0, exp = setup
    b = expansion.parseval_budget(exp, pr.system, X0)
    assert b["continuum"] == pytest.approx(b["continuum_direct"], rel=0.02)


def test_reconstruction_converges_with_cutoff(setup):
    pr, _, X0, exp = setup
    n = pr.grid.n_points
    times = np.array([0.0, 2.0, 5.0])
    oracle = [np.concatenate(validate.exact_spectral_propagate(pr.spectral, X0[:n].real, X0[n:].real, t)).astype(complex) for t in times]
    tab = expansion.convergence_curve(exp, pr.system, times, oracle, [2.5, 4.0, 6.0], pr.grid)
    assert tab.monotone
    assert tab.v_residual[-1] < 0.05
    assert len(tab.rows()) == 3


def test_symplectic_renormalization(setup):
    pr, fam, _, exp = setup
    sym = expansion.symplectic_renormalize(exp)
    assert sym.convention == expansion.SYMPLECTIC
    for t in (0.0, 4.0):
        a, b = expansion.reconstruct(exp, t), expansion.reconstruct(sym, t)
        assert np.linalg.norm(a - b) < 1e-10 * np.linalg.norm(a)
    sel = fam.channel("even", 1)
    w = np.abs(fam.omega[sel])
    g1, g2 = continuum.bump(w, 2.5, 4.0), continuum.bump(w, 3.0, 4.5)
    lhs, rhs = expansion.symplectic_pairing_test(sym, pr.system, g1, g2, sel)
    assert abs(lhs - rhs) < 0.02 * abs(rhs)
    # negative frequencies carry the opposite sign
    seln = fam.channel("even", -1)
    lhs_n, rhs_n = expansion.symplectic_pairing_test(sym, pr.system, continuum.bump(np.abs(fam.omega[seln]), 2.5, 4.0), continuum.bump(np.abs(fam.omega[seln]), 3.0, 4.5), seln)
    assert np.sign(rhs_n.real) == -np.sign(rhs.real)
    assert abs(lhs_n - rhs_n) < 0.02 * abs(rhs_n)


def test_renormalize_is_idempotent(setup):
    _, _, _, exp = setup
    once = expansion.symplectic_renormalize(exp)
    twice = expansion.symplectic_renormalize(once)
    np.testing.assert_allclose(twice.continuum_C, once.continuum_C)
