"""Hamilton systems ``A = J B`` and their reduction to the Hermitian generator ``H``.

Two builders produce the same :class:`HamiltonSystem`:

* :func:`build_system` works from arbitrary dense ``J`` and ``B`` and is used for
  the random finite-dimensional test systems;
* :func:`assemble_gl_system` uses the block structure ``B = diag(S, 1)`` of the
  linearized field equation, taking every spectral object from the
  eigendecomposition of ``S``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg as sla
from scipy.stats import ortho_group

from .errors import ConditionViolation
from .linop import SpectralData, SymOperator, pinv_sqrt, projectors, psd_sqrt, spectral_decompose


def canonical_J(n: int) -> np.ndarray:
    """``[[0, I], [-I, 0]]`` of size ``n`` (even)."""
    if n % 2:
        raise ValueError("symplectic dimension must be even")
    k = n // 2
    J = np.zeros((n, n))
    J[:k, k:] = np.eye(k)
    J[k:, :k] = -np.eye(k)
    return J


@dataclass(frozen=True)
class GLBlocks:
    """Per-block data of a system with ``B = diag(S, 1)``."""

    S: SymOperator
    spectral: SpectralData
    sqrt_S: np.ndarray
    pinv_sqrt_S: np.ndarray
    P0: np.ndarray
    Pplus: np.ndarray


@dataclass(frozen=True, eq=False)
class HamiltonSystem:
    """All operators attached to one discretized Hamilton system.

    ``modes[:, j]`` is a unit eigenvector of ``H`` with eigenvalue ``omega[j]``.
    ``zero_basis`` spans ``Ker H`` intersected with ``Ran Lambda``.
    """

    J: np.ndarray
    B: np.ndarray
    Lambda: np.ndarray
    LambdaPlusInv: np.ndarray
    H: np.ndarray
    omega: np.ndarray
    modes: np.ndarray
    kernel_basis: np.ndarray
    zero_basis: np.ndarray
    Pi_K: np.ndarray
    Pi_0: np.ndarray
    Pi_R: np.ndarray
    P: np.ndarray
    G: np.ndarray
    B_spectral: SpectralData
    H_kernel_tol: float
    hermitian_residual: float
    blocks: GLBlocks | None = field(default=None, repr=False)
    block_residual: float = 0.0

    @property
    def dim(self) -> int:
        return self.J.shape[0]

    @property
    def Pi_scriptR(self) -> np.ndarray:
        return np.eye(self.dim) - self.Pi_K

    @cached_property
    def A(self) -> np.ndarray:
        return self.J @ self.B

    @property
    def nonzero_mask(self) -> np.ndarray:
        return np.abs(self.omega) >= self.H_kernel_tol

    @property
    def H_kernel_basis(self) -> np.ndarray:
        return self.modes[:, ~self.nonzero_mask]

    @cached_property
    def HR_inv(self) -> np.ndarray:
        """Inverse of ``H`` on its range, extended by zero (i.e. ``H_R^{-1} Pi_R``)."""
        sel = self.nonzero_mask
        W = self.modes[:, sel]
        return (W / self.omega[sel]) @ W.conj().T


def _kernel_tol_H(omega: np.ndarray, rel_tol: float) -> float:
    return rel_tol * max(1.0, float(np.max(np.abs(omega))))


def _intersect_with_range(kh: np.ndarray, kernel_B: np.ndarray, angle_tol: float) -> np.ndarray:
    """Orthonormal basis of the vectors in ``span(kh)`` orthogonal to ``span(kernel_B)``.

    A direction counts as lying in ``Ran Lambda`` when the sine of its angle
    to that space, i.e. the norm of its ``Ker Lambda`` component, is below
    ``angle_tol``.
    """
    if kh.shape[1] == 0:
        return kh
    if kernel_B.shape[1] == 0:
        return kh
    M = kernel_B.conj().T @ kh
    _, sv, vh = np.linalg.svd(M)
    sv_full = np.zeros(kh.shape[1])
    sv_full[: sv.size] = sv
    null = vh.conj().T[:, sv_full < angle_tol]
    Q = kh @ null
    if Q.shape[1]:
        Q, _ = np.linalg.qr(Q)
    return Q


def build_system(J: np.ndarray, B: np.ndarray, rel_tol: float = 1e-8, angle_tol: float = 1e-8) -> HamiltonSystem:
    """Assemble a :class:`HamiltonSystem` from dense ``J`` and ``B``.

    Raises
    ------
    ConditionViolation
        If ``J`` is not a real complex structure (``J^2 = -1``, ``J^T = -J``)
        or ``B`` has eigenvalues below ``-kernel_tol``.
    """
    J = np.asarray(J, dtype=float)
    B = np.asarray(B, dtype=float)
    n = J.shape[0]
    _check_J(J)
    if not np.allclose(B, B.T, atol=1e-12 * max(1.0, np.abs(B).max())):
        raise ConditionViolation("symmetry", "B is not symmetric")
    Bs = 0.5 * (B + B.T)
    sd = spectral_decompose(SymOperator(Bs, None, "B"), rel_tol=rel_tol)
    Lam = psd_sqrt(sd).matrix
    Lpi = pinv_sqrt(sd).matrix if sd.kernel_dim < n else np.zeros_like(Lam)
    H_raw = Lam @ (1j * J) @ Lam
    herm_res = float(np.linalg.norm(H_raw - H_raw.conj().T, 2) / max(np.linalg.norm(H_raw, 2), 1e-300))
    H = 0.5 * (H_raw + H_raw.conj().T)
    omega, W = sla.eigh(H)
    tol_H = _kernel_tol_H(omega, rel_tol)
    K = sd.kernel_basis
    Pi_K = K @ K.T
    kh = W[:, np.abs(omega) < tol_H]
    Q = _intersect_with_range(kh, K, angle_tol)
    Pi_0 = Q @ Q.conj().T
    Pi_R = np.eye(n) - kh @ kh.conj().T
    P = Pi_K @ J @ Lam
    sys0 = HamiltonSystem(J, Bs, Lam, Lpi, H, omega, W, K, Q, Pi_K, Pi_0, Pi_R, P, np.zeros((n, n)), sd, tol_H, herm_res)
    G = Lpi @ (np.eye(n) - Pi_K) + 1j * P @ sys0.HR_inv
    object.__setattr__(sys0, "G", G)
    return sys0


def _check_J(J: np.ndarray, tol: float = 1e-12) -> None:
    n = J.shape[0]
    if J.shape != (n, n) or n % 2:
        raise ConditionViolation("J", "J must be square of even size")
    if np.abs(J @ J + np.eye(n)).max() > tol:
        raise ConditionViolation("J", "J^2 != -1")
    if np.abs(J + J.T).max() > tol:
        raise ConditionViolation("J", "J is not skew-symmetric")


def assemble_gl_system(S: SymOperator, sd: SpectralData | None = None, verify: bool = True) -> HamiltonSystem:
    """System with ``B = diag(S, 1)``, ``J`` canonical, built blockwise from ``S``.

    Eigenvectors of ``H`` are ``(v, -+ i v)/sqrt(2)`` with frequencies
    ``+-sqrt(lambda)`` for each eigenpair ``(lambda, v)`` of ``S``; kernel
    vectors of ``S`` give the two zero modes ``(v, 0)`` and ``(0, v)``.

    With ``verify`` the dense product ``Lambda i J Lambda`` is compared to the
    block formula; relative deviations go to ``block_residual`` and
    ``hermitian_residual``.
    """
    sd = spectral_decompose(S) if sd is None else sd
    N = S.size
    root = psd_sqrt(sd).matrix
    iroot = pinv_sqrt(sd).matrix
    pr = projectors(sd)
    Z = np.zeros((N, N))
    I = np.eye(N)
    J = canonical_J(2 * N)
    B = np.block([[S.matrix, Z], [Z, I]])
    Lam = np.block([[root, Z], [Z, I]])
    Lpi = np.block([[iroot, Z], [Z, I]])
    H = 1j * np.block([[Z, root], [-root, Z]])

    lam = sd.clean_eigenvalues
    vec = sd.eigenvectors
    ker = sd.kernel_mask
    pos = ~ker
    r = np.sqrt(lam[pos])
    vp = vec[:, pos]
    s2 = 1.0 / np.sqrt(2.0)
    up = np.vstack([vp, -1j * vp]) * s2  # omega = +sqrt(lambda)
    dn = np.vstack([vp, 1j * vp]) * s2  # omega = -sqrt(lambda)
    vk = vec[:, ker]
    k1 = np.vstack([vk, np.zeros_like(vk)]).astype(complex)
    k2 = np.vstack([np.zeros_like(vk), vk]).astype(complex)
    omega = np.concatenate([-r, np.zeros(2 * vk.shape[1]), r])
    modes = np.hstack([dn, k1, k2, up])
    order = np.argsort(omega, kind="stable")
    omega, modes = omega[order], modes[:, order]

    kernel_basis = np.vstack([vk, np.zeros_like(vk)])
    zero_basis = k2
    Pi_K = np.block([[pr.P0, Z], [Z, Z]])
    Pi_0 = np.block([[Z, Z], [Z, pr.P0]])
    Pi_R = np.block([[pr.Pplus, Z], [Z, pr.Pplus]])
    P = np.block([[Z, pr.P0], [Z, Z]])
    G = np.block([[iroot, Z], [Z, I]])
    blocks = GLBlocks(S, sd, root, iroot, pr.P0, pr.Pplus)
    herm_res = 0.0
    system = HamiltonSystem(J, B, Lam, Lpi, H, omega, modes, kernel_basis, zero_basis, Pi_K, Pi_0, Pi_R, P, G, sd, 0.0, herm_res, blocks)
    object.__setattr__(system, "H_kernel_tol", _kernel_tol_H(omega, 1e-8))
    if verify:
        H_dense = Lam @ (1j * J) @ Lam
        nrm = max(np.abs(H).max(), 1e-300)
        object.__setattr__(system, "block_residual", float(np.abs(H_dense - H).max() / nrm))
        object.__setattr__(system, "hermitian_residual", float(np.abs(H_dense - H_dense.conj().T).max() / nrm))
    return system


# --------------------------------------------------------------------------- conditions


@dataclass
class ConditionReport:
    gap_delta: float
    kernel_dim: int
    kernel_graph_ok: bool
    kernel_graph_excess: float
    hermitian_residual: float
    gap_epsilon_H: float
    dim_ker_H_cap_ran_Lambda: int
    dim_ker_H_cap_ran_H: int
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "delta": self.gap_delta,
            "kernel_dim": self.kernel_dim,
            "kernel_graph_ok": self.kernel_graph_ok,
            "kernel_graph_excess": self.kernel_graph_excess,
            "H_hermitian_residual": self.hermitian_residual,
            "epsilon_H": self.gap_epsilon_H,
            "dim_ker_H_cap_ran_Lambda": self.dim_ker_H_cap_ran_Lambda,
            "dim_ker_H_cap_ran_H": self.dim_ker_H_cap_ran_H,
            "violations": list(self.violations),
        }


def check_conditions(system: HamiltonSystem, herm_tol: float = 1e-12, graph_tol: float = 1e-10) -> ConditionReport:
    """Verify the standing structural conditions on concrete matrices.

    The range condition on ``J Ker B`` has no content in finite dimensions;
    it is replaced by a conditioning check: each ``J Y_k`` must have a finite
    graph norm ``||Lambda J Y_k|| + ||J Y_k||`` bounded by ``(||Lambda|| + 1)``.
    """
    sd = system.B_spectral
    violations = []
    if sd.eigenvalues.min() <= -sd.kernel_tol:
        violations.append("B has negative spectrum")
    if not np.isfinite(sd.gap) and sd.kernel_dim < system.dim:
        violations.append("no spectral gap")
    Y = system.kernel_basis
    lam_norm = float(np.sqrt(sd.operator_norm))
    if Y.shape[1]:
        JY = system.J @ Y
        graph = np.linalg.norm(system.Lambda @ JY, axis=0) + np.linalg.norm(JY, axis=0)
        excess = float(np.max(graph - (lam_norm + 1.0)))
        kernel_graph_ok = bool(np.all(np.isfinite(graph)) and excess <= graph_tol * (lam_norm + 1.0))
        graph_excess = max(excess, 0.0)
    else:
        kernel_graph_ok, graph_excess = True, 0.0
    if not kernel_graph_ok:
        violations.append("J Ker B graph norm not controlled")
    herm = float(system.hermitian_residual)
    if herm > herm_tol:
        violations.append(f"H not Hermitian ({herm:.2e})")
    nz = np.abs(system.omega[system.nonzero_mask])
    eps = float(nz.min()) if nz.size else np.inf
    if not eps > 0:
        violations.append("H has no spectral gap at zero")
    kh = system.H_kernel_basis
    ran_h = system.modes[:, system.nonzero_mask]
    # Ker H is orthogonal to Ran H for Hermitian H: measure the overlap directly
    cap_h = int(np.sum(np.linalg.svd(kh.conj().T @ ran_h, compute_uv=False) > 1 - 1e-8)) if kh.size and ran_h.size else 0
    return ConditionReport(
        gap_delta=float(sd.gap),
        kernel_dim=sd.kernel_dim,
        kernel_graph_ok=kernel_graph_ok,
        kernel_graph_excess=graph_excess,
        hermitian_residual=herm,
        gap_epsilon_H=eps,
        dim_ker_H_cap_ran_Lambda=int(system.zero_basis.shape[1]),
        dim_ker_H_cap_ran_H=cap_h,
        violations=violations,
    )


# --------------------------------------------------------------------------- random systems


def random_system(n: int, kernel_dim: int, gap: float, seed: int, isotropic: bool = False) -> HamiltonSystem:
    """Seeded random system with ``kernel_dim`` zero modes of ``B``.

    ``J`` is an orthogonal conjugate of the canonical form.  The spectrum of
    ``B`` is ``kernel_dim`` zeros plus values drawn uniformly from
    ``[gap, 10 gap]``.  With ``isotropic`` the kernel is chosen so that the
    symplectic form vanishes on it, which maximizes the number of Jordan
    blocks; otherwise the kernel is a generic subspace.
    """
    if n % 2 or n < 2 * kernel_dim + 2 or kernel_dim < 0:
        raise ValueError(f"infeasible dimensions n={n}, kernel_dim={kernel_dim}")
    if gap <= 0:
        raise ValueError("gap must be positive")
    J, B = random_matrices(n, kernel_dim, gap, seed, isotropic)
    return build_system(J, B)


def random_matrices(n: int, kernel_dim: int, gap: float, seed: int, isotropic: bool = False) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    O = ortho_group.rvs(n, random_state=rng)
    J = O @ canonical_J(n) @ O.T
    J = 0.5 * (J - J.T)
    if isotropic:
        seedcols = np.hstack([O[:, :kernel_dim], rng.standard_normal((n, n - kernel_dim))])
        Q, _ = np.linalg.qr(seedcols)
    else:
        Q = ortho_group.rvs(n, random_state=rng)
    d = np.concatenate([np.zeros(kernel_dim), rng.uniform(gap, 10 * gap, n - kernel_dim)])
    B = (Q * d) @ Q.T
    return J, 0.5 * (B + B.T)


# --------------------------------------------------------------------------- dynamics


def krein_substitute(system: HamiltonSystem, X: np.ndarray) -> np.ndarray:
    """``Z = Lambda X``."""
    return system.Lambda @ X


def propagate_Z(system: HamiltonSystem, Z0: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i H t) Z0`` by the spectral decomposition of ``H``."""
    W = system.modes
    return W @ (np.exp(-1j * system.omega * t) * (W.conj().T @ Z0))


def reconstruct_X(system: HamiltonSystem, X0: np.ndarray, t: float) -> np.ndarray:
    """Solution of ``dX/dt = A X`` assembled from the Krein-reduced dynamics.

    ``X(t) = Lambda_+^{-1} e^{-iHt} Lambda X0 + Pi_K X0 + t P Pi_0 Lambda X0
    + i P (e^{-i H_R t} - 1) H_R^{-1} Pi_R Lambda X0``.
    """
    W, om = system.modes, system.omega
    Z0 = system.Lambda @ X0
    c = W.conj().T @ Z0
    Zt = W @ (np.exp(-1j * om * t) * c)
    nz = system.nonzero_mask
    osc = np.zeros_like(c)
    osc[nz] = (np.exp(-1j * om[nz] * t) - 1.0) / om[nz] * c[nz]
    return system.LambdaPlusInv @ Zt + system.Pi_K @ X0 + t * (system.P @ (system.Pi_0 @ Z0)) + 1j * (system.P @ (W @ osc))


def energy(system: HamiltonSystem, X: np.ndarray) -> float:
    """Conserved quadratic form ``<B X, X>``."""
    return float(np.real(np.vdot(X, system.B @ X)))


def operator_P(system: HamiltonSystem) -> np.ndarray:
    return system.P


def operator_P_finite_rank(system: HamiltonSystem) -> np.ndarray:
    """``-sum_k |Y_k><Lambda J Y_k|`` over an orthonormal basis ``Y_k`` of ``Ker B``."""
    Y = system.kernel_basis
    LJY = system.Lambda @ system.J @ Y
    return -Y @ LJY.conj().T


def green_operator(system: HamiltonSystem) -> np.ndarray:
    return system.G


def green_range_term(system: HamiltonSystem) -> float:
    """``||P H_R^{-1} Pi_R||_2``, which vanishes for block systems."""
    return float(np.linalg.norm(system.P @ system.HR_inv, 2))


def weighted_green_norms(system: HamiltonSystem, points: np.ndarray, rhos=(-2, -1, 0, 1, 2)) -> dict[float, float]:
    """Operator norms of ``G`` on ``L^2_rho``: ``|| <x>^rho G <x>^-rho ||_2`` per component."""
    w = np.sqrt(1.0 + points**2)
    out = {}
    for rho in rhos:
        if system.blocks is not None:
            # G = diag(S_+^{-1/2}, 1) is block diagonal, so the norm is the larger block norm
            top = (w**rho)[:, None] * system.blocks.pinv_sqrt_S * (w ** (-rho))[None, :]
            out[float(rho)] = max(float(np.linalg.norm(top, 2)), 1.0)
        else:
            ww = np.tile(w, system.dim // w.size)
            M = (ww**rho)[:, None] * system.G * (ww ** (-rho))[None, :]
            out[float(rho)] = float(np.linalg.norm(M, 2))
    return out


# --------------------------------------------------------------------------- Jordan structure


@dataclass
class JordanData:
    block_count: int
    kernel_A_basis: np.ndarray
    secular_pairs: list[tuple[np.ndarray, np.ndarray]]
    alternative_count: int
    pair_residual: float
    chain3_residual: float


def jordan_structure(system: HamiltonSystem, pair_tol: float = 1e-9, chain_ratio: float = 0.1) -> JordanData:
    """Secular pairs ``(Phi0, Psi0)`` with ``A Psi0 = Phi0`` and ``A Phi0 = 0``.

    One pair per basis vector ``q`` of ``Ker H`` intersected with ``Ran Lambda``:
    ``Psi0 = Lambda_+^{-1} q`` and ``Phi0 = P q``.  A chain of length three
    would require ``A w = Psi0`` to be solvable; the least-squares residual of
    that problem equals the norm of the component of ``Psi0`` in
    ``Ker A^* = J Ker B`` and must exceed ``chain_ratio * ||Psi0||``.

    Raises
    ------
    ConditionViolation
        On a pair residual above ``pair_tol * ||A||`` or a chain of length three.
    """
    A = system.A
    anorm = float(np.linalg.norm(A, 2)) if system.blocks is None else float(system.blocks.spectral.operator_norm)
    cok = system.J @ system.kernel_basis  # orthonormal since J is orthogonal
    pairs = []
    worst_pair = 0.0
    worst_chain = np.inf
    for q in system.zero_basis.T:
        psi0 = system.LambdaPlusInv @ q
        phi0 = system.P @ q
        scale = max(np.linalg.norm(psi0), 1e-300)
        r1 = np.linalg.norm(A @ phi0)
        r2 = np.linalg.norm(A @ psi0 - phi0)
        worst_pair = max(worst_pair, float(max(r1, r2) / (anorm * scale)))
        chain = float(np.linalg.norm(cok.conj().T @ psi0) / scale)
        worst_chain = min(worst_chain, chain)
        pairs.append((phi0, psi0))
    if worst_pair > pair_tol:
        raise ConditionViolation("jordan", f"secular pair residual {worst_pair:.2e}", worst_pair)
    if pairs and worst_chain <= chain_ratio:
        raise ConditionViolation("jordan", "Jordan chain of length 3 detected", worst_chain)
    report = check_conditions(system)
    return JordanData(len(pairs), system.kernel_basis, pairs, report.dim_ker_H_cap_ran_H, worst_pair, worst_chain)


def nilpotent_block_counts(A: np.ndarray, rtol: float = 1e-9) -> tuple[int, int]:
    """Number of Jordan blocks at 0 of size >= 2 and >= 3, from ranks of powers of ``A``.

    ``rank(A^k) - rank(A^{k+1})`` counts blocks of size greater than ``k``.
    """

    def rank(M):
        s = np.linalg.svd(M, compute_uv=False)
        return int(np.sum(s > rtol * max(s[0], 1e-300)))

    A2 = A @ A
    r1, r2, r3 = rank(A), rank(A2), rank(A2 @ A)
    return r1 - r2, r2 - r3
