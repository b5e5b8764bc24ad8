"""Scattering eigenfunctions of ``S = -d^2/dx^2 + m^2 + V`` on the line.

Two discretizations of the free resolvent are provided:

``"line"``
    The continuum kernel ``i exp(ik|x-y|) / (2k)`` integrated by the
    trapezoidal rule plus the jump correction of the cusp at ``x = y``; this
    targets the continuum operator and is fourth-order accurate.
``"lattice"``
    The exact Green function of the 3-point stencil on the infinite lattice,
    ``i h exp(i theta |i-j|) / (2 sin theta)`` with
    ``4 sin^2(theta/2) / h^2 = omega^2 - m^2``; eigenfunctions are then exact
    generalized eigenvectors of the discretized ``S``.

Eigenfunctions are ``e = W^*(omega) f`` with ``W = (1 + V R_0(omega^2 + i0))^{-1}``,
computed from the Lippmann-Schwinger equation restricted to the support of ``V``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg as sla

from .grid import Grid1D, inner_product, weighted_norm, weighted_norm_stacked

SCHEMES = ("line", "lattice")
PARITIES = ("odd", "even")


def _check_scheme(scheme: str) -> None:
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme '{scheme}', expected one of {SCHEMES}")


def _check_parity(parity: str) -> None:
    if parity not in PARITIES:
        raise ValueError(f"unknown parity '{parity}', expected one of {PARITIES}")


def wavenumber(omega: float, m: float, grid: Grid1D, scheme: str = "line") -> float:
    """Spatial frequency of free waves at energy ``omega^2``."""
    _check_scheme(scheme)
    E = omega**2 - m**2
    if E < 0:
        raise ValueError(f"|omega| = {abs(omega)} below threshold m = {m}")
    if scheme == "line":
        return float(np.sqrt(E))
    h = grid.spacing
    arg = 0.5 * h * np.sqrt(E)
    if arg > 1:
        raise ValueError(f"omega = {omega} above the lattice band top")
    return float(2.0 * np.arcsin(arg) / h)


def band_top(m: float, grid: Grid1D, fraction: float = 1.0) -> float:
    """``|omega|`` at lattice phase ``theta = fraction * pi``; 1 gives the band edge ``sqrt(m^2 + 4/h^2)``."""
    h = grid.spacing
    return float(np.sqrt(m**2 + (2.0 * np.sin(0.5 * np.pi * fraction) / h) ** 2))


def dk_domega(omega: float, m: float, grid: Grid1D, scheme: str = "line") -> float:
    """Jacobian ``d kappa / d|omega|`` of the dispersion relation."""
    w = abs(omega)
    E = w**2 - m**2
    if scheme == "line":
        return float(w / np.sqrt(E))
    theta = wavenumber(w, m, grid, scheme) * grid.spacing
    return float(w / (np.sqrt(E) * np.cos(0.5 * theta)))


# --------------------------------------------------------------------------- free resolvent


def _free_profile(omega: float, m: float, grid: Grid1D, scheme: str) -> tuple[np.ndarray, float]:
    """Kernel ``K(x_i, x_0 + n h)`` as a function of the index offset ``n``."""
    n = np.arange(grid.n_points)
    h = grid.spacing
    kap = wavenumber(omega, m, grid, scheme)
    if scheme == "line":
        prof = 1j * np.exp(1j * kap * h * n) / (2.0 * kap)
    else:
        theta = kap * h
        prof = 1j * h * np.exp(1j * theta * n) / (2.0 * np.sin(theta))
    return prof, kap


@dataclass(frozen=True, eq=False)
class FreeResolventKernel:
    """Outgoing free resolvent at ``omega^2 + i0`` sampled on the grid.

    ``kernel[i, j]`` is the Green function ``K(x_i, x_j)``; :meth:`operator`
    turns it into the matrix acting on grid samples.
    """

    omega: float
    mass: float
    wavenumber: float
    kernel: np.ndarray
    grid: Grid1D
    scheme: str

    def operator(self, incoming: bool = False) -> np.ndarray:
        K = np.conj(self.kernel) if incoming else self.kernel
        return _kernel_to_operator(K, self.grid, self.scheme)


def _kernel_to_operator(K: np.ndarray, grid: Grid1D, scheme: str, cols: np.ndarray | None = None) -> np.ndarray:
    h = grid.spacing
    if scheme == "lattice":
        return h * K
    w = grid.weights if cols is None else grid.weights[cols]
    R = K * w[None, :]
    # trapezoidal rule across the derivative jump of the kernel at x = y
    if cols is None:
        R[np.diag_indices_from(R)] -= h**2 / 12.0
    else:
        R[cols, np.arange(cols.size)] -= h**2 / 12.0
    return R


def free_resolvent(omega: float, m: float, grid: Grid1D, scheme: str = "line") -> FreeResolventKernel:
    """Outgoing free resolvent kernel; rejects ``|omega| <= m``."""
    _check_scheme(scheme)
    if abs(omega) <= m:
        raise ValueError(f"|omega| = {abs(omega)} must exceed the threshold m = {m}")
    prof, kap = _free_profile(abs(omega), m, grid, scheme)
    idx = np.arange(grid.n_points)
    K = prof[np.abs(idx[:, None] - idx[None, :])]
    return FreeResolventKernel(float(omega), float(m), kap, K, grid, scheme)


def free_wave(omega: float, m: float, parity: str, grid: Grid1D, scheme: str = "line") -> np.ndarray:
    """``sin(kappa x)`` (odd) or ``cos(kappa x)`` (even)."""
    _check_parity(parity)
    kap = wavenumber(abs(omega), m, grid, scheme)
    x = grid.points
    return np.sin(kap * x) if parity == "odd" else np.cos(kap * x)


# --------------------------------------------------------------------------- eigenfunctions


@dataclass(frozen=True, eq=False)
class ContinuumEigenfunction:
    """Generalized eigenfunction ``e_omega`` and its lifts.

    ``e_values`` already include ``norm_const``; ``h_values`` and
    ``a_values`` are filled by :func:`lift_to_hamilton`.
    """

    omega: float
    parity: str
    e_values: np.ndarray
    norm_const: float = 1.0
    h_values: np.ndarray | None = None
    a_values: np.ndarray | None = None
    scheme: str = "line"
    rcond: float = np.nan


def support_indices(V: np.ndarray, rel: float = 1e-16) -> np.ndarray:
    """Indices where ``|V|`` exceeds ``rel * max|V|``; the LS problem lives there."""
    V = np.asarray(V)
    vmax = np.abs(V).max()
    if vmax == 0:
        return np.zeros(0, dtype=int)
    return np.flatnonzero(np.abs(V) > rel * vmax)


class _LSWorkspace:
    """Reusable index tables for repeated Lippmann-Schwinger solves."""

    def __init__(self, V: np.ndarray, m: float, grid: Grid1D, scheme: str, support_rel: float = 1e-16):
        _check_scheme(scheme)
        self.V = np.asarray(V, dtype=float)
        if self.V.shape != (grid.n_points,):
            raise ValueError("potential does not match the grid")
        self.m, self.grid, self.scheme = float(m), grid, scheme
        self.idx = support_indices(self.V, support_rel)
        self.offsets = np.abs(np.arange(grid.n_points)[:, None] - self.idx[None, :])

    def incoming_columns(self, omega: float) -> np.ndarray:
        """Columns ``idx`` of the incoming (conjugate) free resolvent operator."""
        prof, _ = _free_profile(abs(omega), self.m, self.grid, self.scheme)
        return _kernel_to_operator(np.conj(prof)[self.offsets], self.grid, self.scheme, self.idx)

    def solve(self, omega: float, f: np.ndarray) -> tuple[np.ndarray, float]:
        if self.idx.size == 0:
            return f.astype(complex), 1.0
        Rc = self.incoming_columns(omega)
        Vs = self.V[self.idx]
        M = np.eye(self.idx.size) + Vs[:, None] * Rc[self.idx, :]
        lu, piv = sla.lu_factor(M, check_finite=False)
        anorm = np.abs(M).sum(axis=0).max()
        rcond = float(sla.lapack.zgecon(lu, anorm, norm="1")[0])
        u = sla.lu_solve((lu, piv), Vs * f[self.idx], check_finite=False)
        return f - Rc @ u, rcond


def solve_lippmann_schwinger(
    omega: float,
    parity: str,
    V: np.ndarray,
    m: float,
    grid: Grid1D,
    scheme: str = "line",
    margin: float = 1e-6,
    max_cond: float = 1e12,
    workspace: _LSWorkspace | None = None,
) -> ContinuumEigenfunction:
    """Solve ``(1 + R_0(omega^2 - i0) V) e = f`` for the scattering eigenfunction.

    The unknown is reduced to the support of ``V``:
    ``(1 + V R_0) u = V f`` on the support, then ``e = f - R_0 u``.  The
    returned eigenfunction is not yet normalized (``norm_const = 1``).

    Raises
    ------
    ValueError
        If ``|omega| < m + margin``.
    np.linalg.LinAlgError
        If the reduced system has condition number above ``max_cond``.
    """
    _check_parity(parity)
    if abs(omega) < m + margin:
        raise ValueError(f"|omega| = {abs(omega)} closer than {margin} to the threshold {m}")
    ws = workspace or _LSWorkspace(V, m, grid, scheme)
    f = free_wave(omega, m, parity, grid, scheme)
    e, rcond = ws.solve(omega, f)
    if rcond < 1.0 / max_cond:
        raise np.linalg.LinAlgError(f"near-singular scattering system at omega={omega} (rcond={rcond:.2e})")
    return ContinuumEigenfunction(float(omega), parity, e, 1.0, None, None, scheme, rcond)


def normalization_constant(omega: float, m: float, grid: Grid1D, scheme: str) -> float:
    """``c = sqrt(d kappa / d omega)``, giving ``<h_w, h_w'> = 2 pi delta(w - w')``.

    Standing waves satisfy ``<sin kx, sin k'x> = pi delta(k - k')``; the lift
    to ``C^2`` doubles this and the change of variables contributes the
    Jacobian.
    """
    return float(np.sqrt(dk_domega(omega, m, grid, scheme)))


def normalize_continuum(family: Sequence[ContinuumEigenfunction], m: float, grid: Grid1D) -> list[ContinuumEigenfunction]:
    """Rescale each ``e_omega`` to the ``2 pi delta`` convention (idempotent)."""
    out = []
    for ef in family:
        c = normalization_constant(ef.omega, m, grid, ef.scheme)
        scale = c / ef.norm_const
        out.append(replace(ef, e_values=ef.e_values * scale, norm_const=c, h_values=None, a_values=None))
    return out


def lift_vector(e_values: np.ndarray, omega: float) -> np.ndarray:
    """``h_omega = (e, -i sgn(omega) e)``."""
    return np.concatenate([e_values, -1j * np.sign(omega) * e_values])


def lift_to_hamilton(ef: ContinuumEigenfunction, system) -> ContinuumEigenfunction:
    """Attach ``h_omega`` and ``a_omega = G h_omega``."""
    h = lift_vector(ef.e_values, ef.omega)
    return replace(ef, h_values=h, a_values=system.G @ h)


def interior_mask(grid: Grid1D, fraction: float = 0.75) -> np.ndarray:
    """Points with ``|x| <= fraction * L``; box-edge truncation effects are excluded."""
    return np.abs(grid.points) <= fraction * grid.half_length


def _masked_weighted(r: np.ndarray, mask: np.ndarray, s: float, grid: Grid1D) -> float:
    n = grid.n_points
    blocks = r.reshape(-1, n) * mask[None, :]
    return weighted_norm_stacked(blocks.ravel(), s, grid)


def eigen_residual(ef: ContinuumEigenfunction, S_matrix: np.ndarray, grid: Grid1D, s: float = 2.0, fraction: float = 0.75) -> float:
    """Relative ``||(S - omega^2) e||_{L^2_{-s}}`` on the interior."""
    mask = interior_mask(grid, fraction)
    r = S_matrix @ ef.e_values - ef.omega**2 * ef.e_values
    return _masked_weighted(r, mask, s, grid) / _masked_weighted(ef.e_values, mask, s, grid)


def hamilton_residuals(ef: ContinuumEigenfunction, system, grid: Grid1D, s: float = 2.0, fraction: float = 0.75) -> dict[str, float]:
    """Relative interior residuals of ``(H - omega) h`` and ``(A + i omega) a``."""
    if ef.h_values is None or ef.a_values is None:
        raise ValueError("eigenfunction has not been lifted")
    mask = interior_mask(grid, fraction)
    rh = system.H @ ef.h_values - ef.omega * ef.h_values
    ra = system.A @ ef.a_values + 1j * ef.omega * ef.a_values
    return {
        "H": _masked_weighted(rh, mask, s, grid) / _masked_weighted(ef.h_values, mask, s, grid),
        "A": _masked_weighted(ra, mask, s, grid) / _masked_weighted(ef.a_values, mask, s, grid),
    }


def continuity_scan(omega: float, parity: str, V, m, grid, scheme="line", deltas=(1e-2, 1e-3, 1e-4), s: float = 2.0) -> list[tuple[float, float]]:
    """``(delta, ||e_{omega+delta} - e_omega||_{L^2_{-s}} / delta)`` for shrinking ``delta``."""
    ws = _LSWorkspace(V, m, grid, scheme)
    base = solve_lippmann_schwinger(omega, parity, V, m, grid, scheme, workspace=ws).e_values
    out = []
    for d in deltas:
        e = solve_lippmann_schwinger(omega + d, parity, V, m, grid, scheme, workspace=ws).e_values
        out.append((float(d), weighted_norm(e - base, s, grid) / d))
    return out


def solve_family(
    omegas: Iterable[float],
    parities: Sequence[str],
    V: np.ndarray,
    m: float,
    grid: Grid1D,
    scheme: str = "line",
    margin: float = 1e-6,
) -> list[ContinuumEigenfunction]:
    """Normalized eigenfunctions for every ``(parity, omega)``, in parity-then-omega order.

    Eigenfunctions depend on ``|omega|`` only; negative ``omega`` reuse the
    solve at ``|omega|``.
    """
    ws = _LSWorkspace(V, m, grid, scheme)
    omegas = np.asarray(list(omegas), dtype=float)
    cache: dict[tuple[str, float], ContinuumEigenfunction] = {}
    out = []
    for p in parities:
        for w in omegas:
            key = (p, abs(w))
            if key not in cache:
                ef = solve_lippmann_schwinger(abs(w), p, V, m, grid, scheme, margin, workspace=ws)
                cache[key] = normalize_continuum([ef], m, grid)[0]
            out.append(replace(cache[key], omega=float(w)))
    return out


# --------------------------------------------------------------------------- full resolvent


def _complex_theta(z: complex, m: float, h: float) -> complex:
    """Lattice phase with ``4 sin^2(theta/2)/h^2 = z - m^2`` and ``Im theta >= 0``."""
    root = np.sqrt(complex(z - m**2))
    theta = 2.0 * np.arcsin(0.5 * h * root)
    if theta.imag < 0 or (theta.imag == 0 and theta.real < 0):
        theta = -theta
    return complex(theta)


def resolvent(z: complex, V: np.ndarray, m: float, grid: Grid1D, scheme: str = "line") -> np.ndarray:
    """Operator matrix of ``(S - z)^{-1}`` for the problem on the whole line.

    For real ``z`` above threshold this is the outgoing boundary value
    ``R(z + i0)``.  The lattice scheme closes the box with the exact
    transparent condition, the line scheme uses ``R = R_0 (1 + V R_0)^{-1}``.
    """
    _check_scheme(scheme)
    V = np.asarray(V, dtype=float)
    n, h = grid.n_points, grid.spacing
    if scheme == "lattice":
        theta = _complex_theta(z, m, h)
        M = -np.diag(np.full(n - 1, 1.0 / h**2), 1) - np.diag(np.full(n - 1, 1.0 / h**2), -1)
        M = M.astype(complex)
        M[np.diag_indices(n)] = 2.0 / h**2 + m**2 + V - z
        edge = np.exp(1j * theta) / h**2
        M[0, 0] -= edge
        M[-1, -1] -= edge
        return np.linalg.inv(M)
    k = np.sqrt(complex(z - m**2))
    if k.imag < 0 or (k.imag == 0 and k.real < 0):
        k = -k
    idx = np.arange(n)
    K = 1j * np.exp(1j * k * h * np.abs(idx[:, None] - idx[None, :])) / (2.0 * k)
    R0 = _kernel_to_operator(K, grid, "line")
    return np.linalg.solve((np.eye(n) + V[:, None] * R0).T, R0.T).T


def ll2_eigenfunction(omega: float, parity: str, V: np.ndarray, m: float, grid: Grid1D, scheme: str = "line") -> np.ndarray:
    """``e = (1 - V R(omega^2 + i0))^* f`` from the full resolvent (unnormalized)."""
    R = resolvent(omega**2, V, m, grid, scheme)
    f = free_wave(omega, m, parity, grid, scheme)
    return f - np.conj(R) @ (np.asarray(V) * f)


def wave_operator_gap(omega: float, V: np.ndarray, m: float, grid: Grid1D, scheme: str = "line", s: float = 2.0) -> float:
    """Weighted norm of ``(1 + V R_0)^{-1} - (1 - V R)``, mapping ``L^2_s`` to ``L^2_{-s}``."""
    V = np.asarray(V, dtype=float)
    n = grid.n_points
    R0 = free_resolvent(omega, m, grid, scheme).operator()
    W_ls = np.linalg.inv(np.eye(n) + V[:, None] * R0)
    W_r = np.eye(n) - V[:, None] * resolvent(omega**2, V, m, grid, scheme)
    w = (1.0 + grid.points**2) ** (-0.5 * s)
    return float(np.linalg.norm(w[:, None] * (W_ls - W_r) * w[None, :], 2))


@dataclass
class LAPScan:
    epsilons: np.ndarray
    values: np.ndarray
    cauchy: np.ndarray
    limit: complex

    @property
    def monotone(self) -> bool:
        return bool(np.all(np.diff(self.cauchy) < 0))


def lap_surrogate(omega: float, V, m: float, grid: Grid1D, u: np.ndarray, v: np.ndarray, scheme: str = "line", epsilons=(1e-1, 1e-2, 1e-3, 1e-4, 1e-5)) -> LAPScan:
    """``<R(omega^2 + i eps) u, v>`` along shrinking ``eps`` and its ``eps = 0`` value."""
    eps = np.asarray(epsilons, dtype=float)
    vals = np.array([inner_product(resolvent(omega**2 + 1j * e, V, m, grid, scheme) @ u, v, grid) for e in eps])
    lim = inner_product(resolvent(omega**2, V, m, grid, scheme) @ u, v, grid)
    return LAPScan(eps, vals, np.abs(np.diff(vals)), lim)


# --------------------------------------------------------------------------- threshold behaviour


@dataclass
class ResonanceReport:
    resonant: bool
    indicator: float
    transmission: float
    probe_offsets: list[float]
    transmissions: list[float]
    wave_operator_norms: list[float]
    edge_eigenvalue: bool

    def to_dict(self) -> dict:
        return {
            "resonant": self.resonant,
            "indicator": self.indicator,
            "transmission": self.transmission,
            "probe_offsets": self.probe_offsets,
            "transmissions": self.transmissions,
            "wave_operator_norms": self.wave_operator_norms,
            "edge_eigenvalue": self.edge_eigenvalue,
        }


def jost_transmission(V: np.ndarray, grid: Grid1D, energy: float) -> complex:
    """Transmission coefficient of ``-D_h + V`` at ``energy`` above 0 on the infinite lattice.

    Jost solutions ``exp(+- i theta j)`` are continued inward from each end by
    the 3-point recurrence; ``T = 2 i sin(theta) / (h W)`` with the discrete
    Wronskian ``W`` evaluated mid-grid.  ``V = 0`` gives ``T = 1`` exactly.
    """
    V = np.asarray(V, dtype=float)
    n, h = V.size, grid.spacing
    theta = 2.0 * np.arcsin(0.5 * h * np.sqrt(energy))
    c = n // 2
    fp = np.empty(n, complex)
    fm = np.empty(n, complex)
    fp[-1], fp[-2] = np.exp(1j * theta * (n - 1)), np.exp(1j * theta * (n - 2))
    diag = 2.0 + h * h * (V - energy)
    for j in range(n - 2, c - 1, -1):
        fp[j - 1] = diag[j] * fp[j] - fp[j + 1]
    fm[0], fm[1] = 1.0, np.exp(-1j * theta)
    for j in range(1, c + 1):
        fm[j + 1] = diag[j] * fm[j] - fm[j - 1]
    W = (fm[c] * fp[c + 1] - fm[c + 1] * fp[c]) / h
    return complex(2j * np.sin(theta) / (h * W))


def detect_resonance(
    V: np.ndarray,
    m: float,
    grid: Grid1D,
    scheme: str = "lattice",
    offsets=(1e-1, 1e-2, 1e-3, 1e-4),
    threshold: float = 0.5,
    growth_limit: float = 1e3,
    eigenvalues: np.ndarray | None = None,
    edge_tol: float = 1e-8,
) -> ResonanceReport:
    """Classify the threshold ``omega = m`` as resonant or regular.

    The transmission probe is ``|T|`` at the smallest offset
    ``omega - m``; the indicator is the growth ``max/min`` of
    ``||W(omega)||_2`` along the offsets.  Resonant means a bounded
    indicator together with ``|T| > threshold``, or an eigenvalue of ``S``
    within ``edge_tol`` of ``m^2``.
    """
    V = np.asarray(V, dtype=float)
    ws = _LSWorkspace(V, m, grid, scheme)
    offsets = sorted(offsets, reverse=True)
    Ts, Wn = [], []
    for d in offsets:
        w = m + d
        Ts.append(abs(jost_transmission(V, grid, w**2 - m**2)))
        if ws.idx.size:
            prof, _ = _free_profile(w, m, grid, scheme)
            out = _kernel_to_operator(prof[ws.offsets], grid, scheme, ws.idx)[ws.idx, :]
            M = np.eye(ws.idx.size) + V[ws.idx][:, None] * out
            Wn.append(float(1.0 / np.linalg.svd(M, compute_uv=False)[-1]))
        else:
            Wn.append(1.0)
    indicator = float(max(Wn) / min(Wn))
    edge = bool(eigenvalues is not None and np.any(np.abs(np.asarray(eigenvalues) - m**2) < edge_tol))
    resonant = (indicator < growth_limit and Ts[-1] > threshold) or edge
    return ResonanceReport(bool(resonant), indicator, float(Ts[-1]), [float(d) for d in offsets], [float(t) for t in Ts], Wn, edge)


# --------------------------------------------------------------------------- quadrature


@dataclass(frozen=True)
class OmegaQuadrature:
    nodes: np.ndarray
    weights: np.ndarray
    panels: np.ndarray


def continuum_quadrature(m: float, omega_max: float, margin: float = 1e-6, nodes_per_panel: int = 16, max_width: float = 0.5) -> OmegaQuadrature:
    """Composite Gauss-Legendre rule on ``[m + margin, omega_max]``.

    Panel widths double away from the threshold until ``max_width``, then
    stay uniform, so each panel's width is proportional to its distance to ``m``
    near the edge.
    """
    if omega_max <= m + margin:
        raise ValueError("omega_max must exceed the threshold plus margin")
    edges = [m + margin]
    while edges[-1] - m < max_width and edges[-1] < omega_max:
        edges.append(min(m + 2.0 * (edges[-1] - m), m + max_width, omega_max))
    while edges[-1] < omega_max - 1e-12:
        edges.append(min(edges[-1] + max_width, omega_max))
    edges = np.array(edges)
    gx, gw = np.polynomial.legendre.leggauss(nodes_per_panel)
    lo, hi = edges[:-1, None], edges[1:, None]
    nodes = (0.5 * (hi - lo) * gx + 0.5 * (hi + lo)).ravel()
    weights = (0.5 * (hi - lo) * gw).ravel()
    return OmegaQuadrature(nodes, weights, edges)


def packet(family: Sequence[ContinuumEigenfunction], weights: np.ndarray, profile: np.ndarray, lifted: bool = True) -> np.ndarray:
    """``sum_j w_j g(omega_j) h_{omega_j}`` over a single-channel family."""
    vecs = np.array([ef.h_values if lifted else ef.e_values for ef in family])
    return (np.asarray(weights) * np.asarray(profile)) @ vecs


@dataclass
class SmearedDelta:
    lhs: float
    rhs: float

    @property
    def rel_error(self) -> float:
        return abs(self.lhs - self.rhs) / abs(self.rhs)


def smeared_delta_test(family: Sequence[ContinuumEigenfunction], weights: np.ndarray, profile: np.ndarray, grid: Grid1D) -> SmearedDelta:
    """Compare ``||sum w g h||^2`` with ``2 pi sum w |g|^2`` for one channel."""
    F = packet(family, weights, profile)
    lhs = grid.spacing * float(np.real(np.vdot(F, F)))
    rhs = 2.0 * np.pi * float(np.sum(np.asarray(weights) * np.abs(profile) ** 2))
    return SmearedDelta(lhs, rhs)


def bump(omega: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Smooth compactly supported profile on ``(lo, hi)``."""
    omega = np.asarray(omega, dtype=float)
    t = (2.0 * omega - lo - hi) / (hi - lo)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1
    out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
    return out
