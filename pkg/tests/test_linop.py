import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hamspec import linop
from hamspec.errors import ConditionViolation
from hamspec.grid import make_grid
from hamspec.linop import SymOperator


def _psd(seed, n, kernel):
    r = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(r.standard_normal((n, n)))
    d = np.concatenate([np.zeros(kernel), r.uniform(0.5, 5.0, n - kernel)])
    M = (Q * d) @ Q.T
    return SymOperator(0.5 * (M + M.T), None, "psd")


def test_rejects_nonsymmetric():
    with pytest.raises(ValueError):
        SymOperator(np.array([[1.0, 2.0], [0.0, 1.0]]), None)


def test_assemble_S_free_spectrum():
    g = make_grid(10, 51)
    S = linop.assemble_S(g, 1.5, np.zeros(51))
    h = g.spacing
    j = np.arange(1, 52)
    exact = 1.5**2 + 4 / h**2 * np.sin(j * np.pi / (2 * 52)) ** 2
    np.testing.assert_allclose(np.linalg.eigvalsh(S.matrix), exact, rtol=1e-12)


def test_assemble_S_shape_check():
    with pytest.raises(ValueError):
        linop.assemble_S(make_grid(1, 5), 1.0, np.zeros(4))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31), st.integers(3, 25), st.integers(0, 2))
def test_sqrt_and_pinv_sqrt(seed, n, kernel):
    S = _psd(seed, n, kernel)
    sd = linop.spectral_decompose(S)
    assert sd.kernel_dim == kernel
    R = linop.psd_sqrt(sd).matrix
    np.testing.assert_allclose(R @ R, S.matrix, atol=1e-10)
    P = linop.projectors(sd)
    np.testing.assert_allclose(P.P0 + P.Pplus, np.eye(n), atol=1e-12)
    np.testing.assert_allclose(P.P0 @ P.P0, P.P0, atol=1e-12)
    Ri = linop.pinv_sqrt(sd).matrix
    np.testing.assert_allclose(Ri @ R, P.Pplus, atol=1e-9)
    np.testing.assert_allclose(S.matrix @ P.P0, 0, atol=1e-10)


def test_clean_eigenvalues_snap_kernel():
    sd = linop.spectral_decompose(_psd(3, 8, 2))
    lam = sd.clean_eigenvalues
    assert np.count_nonzero(lam == 0.0) == 2
    assert sd.kernel_basis.shape == (8, 2)


def test_negative_spectrum_raises():
    sd = linop.spectral_decompose(SymOperator(np.diag([-1.0, 1.0]), None))
    with pytest.raises(ConditionViolation):
        linop.psd_sqrt(sd)


def test_pinv_sqrt_of_zero_operator():
    sd = linop.spectral_decompose(SymOperator(np.zeros((3, 3)), None), kernel_tol=1e-10)
    assert sd.kernel_dim == 3
    np.testing.assert_array_equal(linop.pinv_sqrt(sd).matrix, 0.0)


def test_kink_S_spectrum(small_problem):
    sd = small_problem.spectral
    assert sd.kernel_dim == 1
    # O(h^2) lattice shift at h = 0.2
    assert sd.eigenvalues[1] == pytest.approx(1.5, abs=1e-2)
    assert sd.eigenvalues[2] > 2.0
