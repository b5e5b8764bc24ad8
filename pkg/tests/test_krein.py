import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings
from hypothesis import strategies as st

from hamspec import krein
from hamspec.errors import ConditionViolation


def test_canonical_J():
    J = krein.canonical_J(6)
    np.testing.assert_array_equal(J @ J, -np.eye(6))
    np.testing.assert_array_equal(J.T, -J)
    with pytest.raises(ValueError):
        krein.canonical_J(5)


def test_build_system_rejects_bad_J():
    with pytest.raises((ValueError, ConditionViolation)):
        krein.build_system(np.eye(4), np.eye(4))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 10), st.integers(0, 3), st.booleans())
def test_random_system_structure(seed, half, kernel, iso):
    n = 2 * half
    if n < 2 * kernel + 2:
        kernel = 0
    s = krein.random_system(n, kernel, 0.3, seed, iso)
    H = s.H
    np.testing.assert_allclose(H, H.conj().T, atol=1e-12)
    # Lambda^2 = B and A = J B
    np.testing.assert_allclose(s.Lambda @ s.Lambda, s.B, atol=1e-10)
    np.testing.assert_allclose(s.A, s.J @ s.B, atol=1e-12)
    # projector algebra
    for P in (s.Pi_K, s.Pi_0, s.Pi_R):
        np.testing.assert_allclose(P @ P, P, atol=1e-9)
    np.testing.assert_allclose(s.Pi_K + s.Pi_scriptR, np.eye(n), atol=1e-12)
    # generalized eigenvector relation: A G h = -i omega G h on nonzero modes
    nz = s.nonzero_mask
    W = s.modes[:, nz]
    AG = s.A @ (s.G @ W)
    np.testing.assert_allclose(AG, -1j * (s.G @ W) * s.omega[nz], atol=1e-8 * max(1.0, np.abs(s.omega).max()))


def test_omega_spectrum_symmetric():
    s = krein.random_system(16, 2, 0.3, 5)
    om = np.sort(s.omega[s.nonzero_mask])
    np.testing.assert_allclose(om, -om[::-1], atol=1e-10)


@pytest.mark.parametrize("n, kd, iso", [(8, 0, False), (10, 2, False), (10, 2, True), (12, 3, True)])
def test_reconstruct_matches_expm(n, kd, iso, rng):
    s = krein.random_system(n, kd, 0.25, 11, iso)
    X0 = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    for t in (0.0, 0.3, 5.0, 20.0):
        ref = sla.expm(s.A * t) @ X0
        np.testing.assert_allclose(krein.reconstruct_X(s, X0, t), ref, atol=1e-9 * np.linalg.norm(X0))


def test_krein_equivalence(rng):
    s = krein.random_system(12, 2, 0.25, 3, True)
    X0 = rng.standard_normal(12)
    for t in (0.7, 4.0):
        Z = krein.propagate_Z(s, krein.krein_substitute(s, X0), t)
        np.testing.assert_allclose(s.Lambda @ krein.reconstruct_X(s, X0, t), Z, atol=1e-10)


def test_mild_solution_identity(rng):
    # X(t) = X0 + int_0^t A X(s) ds, checked with Gauss-Legendre quadrature
    s = krein.random_system(10, 2, 0.4, 8, True)
    X0 = rng.standard_normal(10)
    t = 3.0
    x, w = np.polynomial.legendre.leggauss(40)
    taus, ws = 0.5 * t * (x + 1), 0.5 * t * w
    integral = sum(wi * (s.A @ krein.reconstruct_X(s, X0, ti)) for ti, wi in zip(taus, ws))
    np.testing.assert_allclose(krein.reconstruct_X(s, X0, t), X0 + integral, atol=1e-10)


def test_energy_conserved(rng):
    s = krein.random_system(14, 2, 0.3, 2, True)
    X0 = rng.standard_normal(14)
    e0 = krein.energy(s, X0)
    for t in (1.0, 10.0, 30.0):
        assert krein.energy(s, krein.reconstruct_X(s, X0, t)) == pytest.approx(e0, rel=1e-10)


def test_P_finite_rank_form():
    s = krein.random_system(10, 2, 0.3, 4)
    np.testing.assert_allclose(krein.operator_P(s), krein.operator_P_finite_rank(s), atol=1e-12)


@pytest.mark.parametrize("kd", [1, 2, 3])
def test_isotropic_kernel_gives_full_block_count(kd):
    s = krein.random_system(4 * kd + 2, kd, 0.3, 17 + kd, isotropic=True)
    jd = krein.jordan_structure(s)
    assert jd.block_count == kd
    assert jd.block_count == krein.nilpotent_block_counts(s.A)[0]
    assert jd.pair_residual < 1e-9


def test_generic_kernel_block_count_parity():
    for kd in (1, 2, 3):
        s = krein.random_system(4 * kd + 2, kd, 0.3, 40 + kd)
        assert krein.jordan_structure(s).block_count == kd % 2


def test_nilpotent_counts_on_jordan_matrix():
    A = np.zeros((6, 6))
    A[0, 1] = A[1, 2] = 1.0  # one block of size 3
    A[3, 4] = 1.0  # one block of size 2
    assert krein.nilpotent_block_counts(A) == (2, 1)


def test_check_conditions_random():
    rep = krein.check_conditions(krein.random_system(12, 2, 0.3, 9))
    assert rep.ok
    d = rep.to_dict()
    assert d["kernel_dim"] == 2
    assert d["epsilon_H"] > 0


def test_gl_system_blocks_match_generic(small_problem):
    s = small_problem.system
    g = krein.build_system(s.J, s.B)
    np.testing.assert_allclose(s.H, g.H, atol=1e-10)
    np.testing.assert_allclose(np.sort(s.omega), np.sort(g.omega), atol=1e-8)
    assert s.blocks is not None
    assert krein.green_range_term(s) < 1e-12


def test_gl_jordan_pair(small_problem):
    s = small_problem.system
    jd = krein.jordan_structure(s)
    assert jd.block_count == 1
    phi0, psi0 = jd.secular_pairs[0]
    np.testing.assert_allclose(s.A @ phi0, 0, atol=1e-9 * np.linalg.norm(phi0))
    np.testing.assert_allclose(s.A @ psi0, phi0, atol=1e-9 * np.linalg.norm(phi0))
    assert jd.chain3_residual > 0.1


def test_gl_conditions(small_problem):
    rep = krein.check_conditions(small_problem.system)
    assert rep.ok
    assert rep.kernel_dim == 1
    assert rep.dim_ker_H_cap_ran_Lambda == 1
    assert rep.gap_delta == pytest.approx(small_problem.spectral.eigenvalues[1])


def test_weighted_green_norms_bounded(small_problem):
    s = small_problem.system
    norms = krein.weighted_green_norms(s, small_problem.grid.points)
    assert set(norms) == {-2.0, -1.0, 0.0, 1.0, 2.0}
    assert all(np.isfinite(v) and v >= 1.0 for v in norms.values())
