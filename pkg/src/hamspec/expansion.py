"""Eigenfunction expansion of ``exp(A t) X0``: secular pair, bound states and continuum.

Coefficients are extracted in the Krein variables ``Z = Lambda X`` where the
generalized eigenfunctions ``h_omega`` are orthogonal, then mapped back with
the Green operator ``a = G h``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from . import continuum
from .grid import Grid1D, weighted_norm_stacked
from .krein import HamiltonSystem

ORTHONORMAL = "orthonormal-2pi-delta"
SYMPLECTIC = "symplectic"


@dataclass(frozen=True, eq=False)
class ContinuumFamily:
    """Sampled continuum modes on an omega quadrature.

    Row ``j`` of ``h`` and ``a`` is the lifted mode at ``omega[j]`` of
    channel ``parity[j]``; ``weights`` are quadrature weights in omega.
    """

    omega: np.ndarray
    weights: np.ndarray
    parity: np.ndarray
    h: np.ndarray
    a: np.ndarray
    coverage: float

    def __len__(self) -> int:
        return self.omega.size

    def channel(self, parity: str, sign: int) -> np.ndarray:
        return np.flatnonzero((self.parity == parity) & (np.sign(self.omega) == sign))


def _apply_G(system: HamiltonSystem, h: np.ndarray) -> np.ndarray:
    """Rows ``G h_j`` for a stack of lifted modes ``h`` (one per row)."""
    if system.blocks is not None:
        n = system.blocks.S.size
        top = (system.blocks.pinv_sqrt_S @ h[:, :n].T).T
        return np.hstack([top, h[:, n:]])
    return (system.G @ h.T).T


def build_family(
    system: HamiltonSystem,
    V: np.ndarray,
    mass: float,
    grid: Grid1D,
    omega_max: float,
    margin: float = 1e-6,
    nodes_per_panel: int = 16,
    max_width: float = 0.5,
    scheme: str = "lattice",
    parities: Sequence[str] = continuum.PARITIES,
) -> ContinuumFamily:
    """Solve, normalize and lift the continuum on a mirrored Gauss-Legendre rule."""
    quad = continuum.continuum_quadrature(mass, omega_max, margin, nodes_per_panel, max_width)
    efs = continuum.solve_family(quad.nodes, parities, V, mass, grid, scheme, margin)
    E = np.array([ef.e_values for ef in efs])
    par = np.array([ef.parity for ef in efs])
    om = np.array([ef.omega for ef in efs])
    wts = np.tile(quad.weights, len(parities))
    hs, oms, ws, ps = [], [], [], []
    for sign in (1.0, -1.0):
        hs.append(np.hstack([E, -1j * sign * E]))
        oms.append(sign * om)
        ws.append(wts)
        ps.append(par)
    h = np.vstack(hs)
    return ContinuumFamily(np.concatenate(oms), np.concatenate(ws), np.concatenate(ps), h, _apply_G(system, h), float(quad.panels[-1]))


@dataclass(frozen=True, eq=False)
class DiscreteModes:
    omega: np.ndarray
    h: np.ndarray
    a: np.ndarray
    C: np.ndarray


@dataclass(frozen=True, eq=False)
class ExpansionData:
    """All pieces of the expansion of one initial state.

    ``kernel_part`` is the time-independent ``Ker B`` component that
    accompanies the secular pair.  ``continuum_C`` aligns with the rows of
    ``family``.
    """

    phi0: np.ndarray
    psi0: np.ndarray
    kernel_part: np.ndarray
    discrete: DiscreteModes
    family: ContinuumFamily | None
    continuum_C: np.ndarray
    Omega_max: float
    convention: str
    measure: float = 1.0

    @property
    def continuum_omega(self) -> np.ndarray:
        return np.zeros(0) if self.family is None else self.family.omega


def _discrete_selection(system: HamiltonSystem, threshold: float | None) -> np.ndarray:
    nz = system.nonzero_mask
    if threshold is None:
        return np.flatnonzero(nz)
    return np.flatnonzero(nz & (np.abs(system.omega) < threshold))


def decompose(
    system: HamiltonSystem,
    X0: np.ndarray,
    family: ContinuumFamily | None = None,
    Omega_max: float | None = None,
    threshold: float | None = None,
    measure: float = 1.0,
) -> ExpansionData:
    """Split ``X0`` into secular, discrete and continuum parts.

    Parameters
    ----------
    family : ContinuumFamily, optional
        Continuum modes; without it every nonzero eigenvector of ``H`` is
        treated as a discrete mode (finite-dimensional systems).
    threshold : float, optional
        Continuum edge in ``|omega|``; eigenvectors of ``H`` at or above it are
        box modes replaced by ``family``.
    measure : float
        Length element of the inner product (grid spacing for sampled fields),
        so that ``<h_w, h_w'> = 2 pi delta`` holds for the family.
    """
    X0 = np.asarray(X0, dtype=complex)
    if family is not None and threshold is None:
        raise ValueError("a continuum family requires the threshold")
    Z0 = system.Lambda @ X0
    z0 = system.Pi_0 @ Z0
    phi0 = system.P @ z0
    psi0 = system.LambdaPlusInv @ z0
    kernel_part = system.Pi_K @ X0
    if system.blocks is None:
        kernel_part = kernel_part - 1j * (system.P @ (system.HR_inv @ Z0))
    sel = _discrete_selection(system, threshold if family is not None else None)
    W = system.modes[:, sel]
    Ck = W.conj().T @ Z0  # unit eigenvectors
    a_k = _apply_G(system, W.T)
    discrete = DiscreteModes(system.omega[sel], W.T, a_k, Ck)
    if family is None:
        C = np.zeros(0, complex)
        om_max = 0.0
    else:
        if Omega_max is None:
            Omega_max = family.coverage
        if Omega_max > family.coverage * (1 + 1e-12):
            raise ValueError("Omega_max exceeds the family coverage")
        for p in np.unique(family.parity):
            for s in (1, -1):
                if family.channel(p, s).size == 0:
                    raise ValueError(f"family misses channel parity={p}, sign={s}")
        C = measure * (family.h.conj() @ Z0) / (2.0 * np.pi)
        om_max = float(Omega_max)
    return ExpansionData(phi0, psi0, kernel_part, discrete, family, C, om_max, ORTHONORMAL, measure)


def reconstruct(exp: ExpansionData, t: float, M: float | None = None) -> np.ndarray:
    """``X_M(t)`` from the expansion, continuum truncated to ``|omega| <= M``."""
    if M is None:
        M = exp.Omega_max
    if exp.family is not None and M > exp.Omega_max * (1 + 1e-12):
        raise ValueError(f"M = {M} exceeds the expansion coverage {exp.Omega_max}")
    X = exp.kernel_part + exp.psi0 + t * exp.phi0
    d = exp.discrete
    if d.omega.size:
        X = X + (np.exp(-1j * d.omega * t) * d.C) @ d.a
    if exp.family is not None:
        fam = exp.family
        sel = np.abs(fam.omega) <= M
        coef = fam.weights[sel] * np.exp(-1j * fam.omega[sel] * t) * exp.continuum_C[sel]
        X = X + coef @ fam.a[sel]
    return X


def parseval_budget(exp: ExpansionData, system: HamiltonSystem, X0: np.ndarray) -> dict[str, float]:
    """Split ``||Lambda X0||^2`` into the zero, discrete and continuum contributions."""
    Z0 = system.Lambda @ X0
    mu = exp.measure
    total = mu * float(np.real(np.vdot(Z0, Z0)))
    zero = mu * float(np.real(np.vdot(system.Pi_0 @ Z0, system.Pi_0 @ Z0)))
    disc = mu * float(np.sum(np.abs(exp.discrete.C) ** 2))
    if exp.family is None:
        cont = 0.0
    else:
        cont = 2.0 * np.pi * float(np.sum(exp.family.weights * np.abs(exp.continuum_C) ** 2))
    return {"total": total, "zero": zero, "discrete": disc, "continuum": cont, "continuum_direct": total - zero - disc}


def v_norm(X: np.ndarray, system: HamiltonSystem, measure: float = 1.0) -> float:
    """Graph norm ``||Lambda X|| + ||X||``."""
    return float(np.sqrt(measure) * (np.linalg.norm(system.Lambda @ X) + np.linalg.norm(X)))


@dataclass
class ConvergenceTable:
    M: np.ndarray
    v_residual: np.ndarray
    weighted_residual: np.ndarray
    slack: float = 0.05

    @property
    def monotone(self) -> bool:
        r = self.v_residual
        return bool(np.all(r[1:] <= r[:-1] * (1 + self.slack)))

    def rows(self) -> list[tuple[float, float, float]]:
        return [(float(a), float(b), float(c)) for a, b, c in zip(self.M, self.v_residual, self.weighted_residual)]


def convergence_curve(
    exp: ExpansionData,
    system: HamiltonSystem,
    times: np.ndarray,
    oracle_states: Sequence[np.ndarray],
    M_list: Sequence[float],
    grid: Grid1D | None = None,
    s: float = 2.0,
    slack: float = 0.05,
) -> ConvergenceTable:
    """Sup-in-time residuals against an oracle trajectory, relative to ``||X0||_V``.

    The weighted residual is the ``L^2_{-s}`` norm of the stacked components
    (plain Euclidean norm if no grid is given).
    """
    mu = exp.measure
    X0 = oracle_states[0]
    ref = v_norm(X0, system, mu)
    scale = ref if ref > 0 else 1.0
    vres, wres = [], []
    for M in M_list:
        worst_v = worst_w = 0.0
        for t, Xo in zip(times, oracle_states):
            d = reconstruct(exp, t, M) - Xo
            worst_v = max(worst_v, v_norm(d, system, mu))
            worst_w = max(worst_w, _weighted(d, grid, s, mu))
        vres.append(worst_v / scale)
        wres.append(worst_w / scale)
    return ConvergenceTable(np.asarray(M_list, float), np.array(vres), np.array(wres), slack)


def _weighted(X: np.ndarray, grid: Grid1D | None, s: float, mu: float) -> float:
    if grid is None:
        return float(np.sqrt(mu) * np.linalg.norm(X))
    return weighted_norm_stacked(X, s, grid)


def symplectic_renormalize(exp: ExpansionData) -> ExpansionData:
    """Rescale continuum modes so that ``<a_w, J a_w'> = i sgn(w) delta(w - w')``.

    ``h`` and ``a`` are multiplied by ``sqrt(|w| / 2 pi)`` and ``C`` divided
    by it, so every term ``C a`` of the expansion is unchanged.  A no-op on
    data that is already symplectic.
    """
    if exp.convention == SYMPLECTIC or exp.family is None:
        return replace(exp, convention=SYMPLECTIC)
    fam = exp.family
    if np.any(fam.omega == 0):
        raise ValueError("continuum sample at omega = 0")
    alpha = np.sqrt(np.abs(fam.omega) / (2.0 * np.pi))
    fam2 = replace(fam, h=fam.h * alpha[:, None], a=fam.a * alpha[:, None])
    return replace(exp, family=fam2, continuum_C=exp.continuum_C / alpha, convention=SYMPLECTIC)


def j_pairing(X1: np.ndarray, X2: np.ndarray, system: HamiltonSystem, measure: float = 1.0) -> complex:
    """``<X1, J X2>`` with the inner product linear in the first slot."""
    return complex(measure * np.sum(X1 * np.conj(system.J @ X2)))


def symplectic_packet(exp: ExpansionData, profile: np.ndarray, sel: np.ndarray | None = None) -> np.ndarray:
    """``sum_j w_j g(omega_j) a_j`` over the selected continuum rows."""
    fam = exp.family
    idx = np.arange(len(fam)) if sel is None else sel
    return (fam.weights[idx] * profile) @ fam.a[idx]


def symplectic_pairing_test(exp: ExpansionData, system: HamiltonSystem, g1: np.ndarray, g2: np.ndarray, sel: np.ndarray) -> tuple[complex, complex]:
    """``(-i <X1, J X2>, sum_j w_j sgn(omega_j) g1 conj(g2))`` for packets over rows ``sel``.

    ``g1`` and ``g2`` are profile values at ``exp.family.omega[sel]``.
    """
    if exp.convention != SYMPLECTIC:
        raise ValueError("pairing test needs symplectic normalization")
    X1 = symplectic_packet(exp, g1, sel)
    X2 = symplectic_packet(exp, g2, sel)
    lhs = -1j * j_pairing(X1, X2, system, exp.measure)
    fam = exp.family
    rhs = complex(np.sum(fam.weights[sel] * np.sign(fam.omega[sel]) * g1 * np.conj(g2)))
    return lhs, rhs
