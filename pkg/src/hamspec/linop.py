"""Dense symmetric-operator algebra: assembly, eigendecomposition and spectral calculus."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg as sla

from .errors import ConditionViolation
from .grid import Grid1D, second_derivative


@dataclass(frozen=True)
class SymOperator:
    """Real symmetric matrix tied to a grid."""

    matrix: np.ndarray
    grid: Grid1D | None = None
    label: str = ""

    def __post_init__(self):
        mat = np.asarray(self.matrix)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("operator matrix must be square")
        if not np.array_equal(mat, mat.T):
            raise ValueError(f"operator '{self.label}' is not exactly symmetric")

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))

    def __matmul__(self, other):
        return self.matrix @ other


def symmetrize(mat: np.ndarray) -> np.ndarray:
    return 0.5 * (mat + mat.T)


def assemble_S(grid: Grid1D, m: float, V: np.ndarray, label: str = "S") -> SymOperator:
    """``-d^2/dx^2 + m^2 + V`` on the Dirichlet mesh."""
    V = np.asarray(V, dtype=float)
    if V.shape != (grid.n_points,):
        raise ValueError(f"potential has shape {V.shape}, grid has {grid.n_points} points")
    mat = second_derivative(grid).matrix.copy()
    mat[np.diag_indices_from(mat)] += m**2 + V
    return SymOperator(mat, grid, label)


@dataclass(frozen=True)
class SpectralData:
    """Eigendecomposition of a symmetric operator with a detected kernel.

    Eigenvalues with ``|lambda| < kernel_tol`` count as kernel and are
    treated as exact zeros by the spectral calculus below.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    kernel_dim: int
    gap: float
    kernel_tol: float
    operator_norm: float

    @property
    def kernel_mask(self) -> np.ndarray:
        return np.abs(self.eigenvalues) < self.kernel_tol

    @property
    def clean_eigenvalues(self) -> np.ndarray:
        """Eigenvalues with the kernel cluster and the clamping window mapped to 0."""
        lam = self.eigenvalues.copy()
        lam[self.kernel_mask] = 0.0
        return lam

    @property
    def kernel_basis(self) -> np.ndarray:
        return self.eigenvectors[:, self.kernel_mask]

    def apply_function(self, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """Matrix of ``fn(S)`` by spectral calculus; ``fn`` sees cleaned eigenvalues."""
        vec = self.eigenvectors
        vals = fn(self.clean_eigenvalues)
        return symmetrize((vec * vals) @ vec.T)


def spectral_decompose(S: SymOperator, kernel_tol: float | None = None, rel_tol: float = 1e-8) -> SpectralData:
    """Dense eigendecomposition with relative kernel detection.

    Parameters
    ----------
    S : SymOperator
    kernel_tol : float, optional
        Absolute kernel threshold.  Defaults to ``rel_tol * ||S||_2``.
    """
    try:
        lam, vec = sla.eigh(S.matrix)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConditionViolation("eigensolver", str(exc)) from exc
    norm = float(np.max(np.abs(lam)))
    tol = rel_tol * norm if kernel_tol is None else float(kernel_tol)
    if tol <= 0:
        raise ValueError("kernel_tol must be positive")
    ker = np.abs(lam) < tol
    pos = lam[lam >= tol]
    gap = float(pos.min()) if pos.size else np.inf
    return SpectralData(lam, vec, int(ker.sum()), gap, tol, norm)


def _check_nonnegative(sd: SpectralData) -> None:
    low = sd.eigenvalues.min()
    if low <= -sd.kernel_tol:
        raise ConditionViolation("nonnegativity", f"eigenvalue {low:.3e} below -kernel_tol", float(low))


def psd_sqrt(sd: SpectralData) -> SymOperator:
    """Nonnegative square root; eigenvalues in ``(-tol, tol)`` map to 0."""
    _check_nonnegative(sd)
    return SymOperator(sd.apply_function(lambda l: np.sqrt(np.maximum(l, 0.0))), None, "sqrt")


def pinv_sqrt(sd: SpectralData) -> SymOperator:
    """Inverse square root on the range, zero on the kernel."""
    _check_nonnegative(sd)
    if not sd.gap > sd.kernel_tol:
        raise ConditionViolation("gap", f"spectral gap {sd.gap:.3e} not above kernel_tol", sd.gap)

    def inv_root(l):
        out = np.zeros_like(l)
        nz = l > 0
        out[nz] = 1.0 / np.sqrt(l[nz])
        return out

    return SymOperator(sd.apply_function(inv_root), None, "pinv_sqrt")


@dataclass(frozen=True)
class Projectors:
    P0: np.ndarray
    Pplus: np.ndarray


def projectors(sd: SpectralData) -> Projectors:
    """Orthogonal projectors onto the kernel and onto its complement."""
    K = sd.kernel_basis
    P0 = symmetrize(K @ K.T)
    return Projectors(P0, np.eye(P0.shape[0]) - P0)
