"""Independent reference propagators and comparison reports.

The leapfrog integrator works only with sparse products by ``S``; it shares
no code with the eigendecomposition-based propagators, which makes it a check
on them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .grid import Grid1D, weighted_norm_stacked
from .linop import SpectralData, SymOperator


@dataclass
class Trajectory:
    """States ``X = (psi, psidot)`` on an ascending time grid."""

    times: np.ndarray
    states: list[np.ndarray]
    norms: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.states) != self.times.size:
            raise ValueError("times and states are misaligned")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    @property
    def energy_drift(self) -> float:
        if self.norms.size < 2:
            return 0.0
        return float(np.max(np.abs(self.norms - self.norms[0])) / max(abs(self.norms[0]), 1e-300))


def _field_energy(S: np.ndarray | sp.spmatrix, psi: np.ndarray, psid: np.ndarray) -> float:
    return float(np.real(np.vdot(psi, S @ psi)) + np.real(np.vdot(psid, psid)))


def stability_limit(S: SymOperator) -> float:
    """Largest stable leapfrog step ``2 / sqrt(lambda_max)`` (Gershgorin bound)."""
    M = S.matrix
    radius = np.max(np.abs(np.diag(M)) + np.sum(np.abs(M), axis=1) - np.abs(np.diag(M)))
    return float(2.0 / np.sqrt(radius))


def leapfrog(S: SymOperator, psi0: np.ndarray, psidot0: np.ndarray, dt: float, T: float, record_every: int = 1) -> Trajectory:
    """Stormer-Verlet integration of ``psi'' = -S psi``.

    ``T`` must be an integer multiple of ``dt`` (up to rounding).  Energies
    ``||psidot||^2 + <S psi, psi>`` at the recorded times are stored in
    ``norms``.

    Raises
    ------
    ValueError
        If ``dt`` is at or above the stability bound ``2 / sqrt(lambda_max)``.
    """
    if T <= 0 or dt <= 0:
        raise ValueError("dt and T must be positive")
    limit = stability_limit(S)
    if dt >= limit:
        raise ValueError(f"dt = {dt} violates the stability bound {limit:.4g}")
    steps = int(round(T / dt))
    if abs(steps * dt - T) > 1e-9 * T:
        raise ValueError("T must be a multiple of dt")
    A = sp.csr_matrix(S.matrix)
    psi = np.array(psi0, dtype=float)
    vel = np.array(psidot0, dtype=float)
    acc = -(A @ psi)
    times, states, energies = [0.0], [np.concatenate([psi, vel])], [_field_energy(A, psi, vel)]
    for n in range(1, steps + 1):
        vel_half = vel + 0.5 * dt * acc
        psi = psi + dt * vel_half
        acc = -(A @ psi)
        vel = vel_half + 0.5 * dt * acc
        if n % record_every == 0:
            times.append(n * dt)
            states.append(np.concatenate([psi, vel]))
            energies.append(_field_energy(A, psi, vel))
    return Trajectory(np.array(times), states, np.array(energies))


def _sinc_factor(root: np.ndarray, t: float, series_below: float = 1e-4) -> np.ndarray:
    """``sin(r t) / r`` with its series near ``r t = 0``."""
    arg = root * t
    out = np.empty_like(root)
    small = np.abs(arg) < series_below
    out[~small] = np.sin(arg[~small]) / root[~small]
    out[small] = t * (1.0 - arg[small] ** 2 / 6.0)
    return out


def exact_spectral_propagate(sd: SpectralData, psi0: np.ndarray, psidot0: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]:
    """``psi(t) = cos(sqrt(S) t) psi0 + sin(sqrt(S) t)/sqrt(S) psidot0`` and its derivative.

    Kernel eigenvalues are exact zeros, where the second factor reduces to ``t``.
    """
    vec = sd.eigenvectors
    root = np.sqrt(np.maximum(sd.clean_eigenvalues, 0.0))
    a = vec.T @ psi0
    b = vec.T @ psidot0
    c = np.cos(root * t)
    s = _sinc_factor(root, t)
    psi = vec @ (c * a + s * b)
    psid = vec @ (-root * np.sin(root * t) * a + c * b)
    return psi, psid


def exact_trajectory(sd: SpectralData, S: SymOperator, psi0, psidot0, times: Sequence[float]) -> Trajectory:
    states, energies = [], []
    for t in times:
        p, q = exact_spectral_propagate(sd, psi0, psidot0, t)
        states.append(np.concatenate([p, q]))
        energies.append(_field_energy(S.matrix, p, q))
    return Trajectory(np.asarray(times, float), states, np.array(energies))


def compare(traj_a: Trajectory, traj_b: Trajectory, system, s: float = 2.0, grid: Grid1D | None = None, measure: float = 1.0) -> dict:
    """Per-time and sup residuals in the X-, V- and weighted norms.

    ``system`` supplies ``Lambda`` for the graph norm ``||Lambda X|| + ||X||``.
    """
    if traj_a.times.shape != traj_b.times.shape or not np.allclose(traj_a.times, traj_b.times, rtol=0, atol=1e-12):
        raise ValueError("trajectories use different time grids")
    rows = []
    for t, xa, xb in zip(traj_a.times, traj_a.states, traj_b.states):
        d = np.asarray(xa) - np.asarray(xb)
        x_norm = float(np.sqrt(measure) * np.linalg.norm(d))
        v = float(np.sqrt(measure) * np.linalg.norm(system.Lambda @ d)) + x_norm
        w = weighted_norm_stacked(d, s, grid) if grid is not None else x_norm
        rows.append({"t": float(t), "x": x_norm, "v": v, "weighted": float(w)})
    return {
        "per_time": rows,
        "sup_x": max(r["x"] for r in rows),
        "sup_v": max(r["v"] for r in rows),
        "sup_weighted": max(r["weighted"] for r in rows),
        "weight_exponent": s,
    }


def convergence_order(steps: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of ``log(error)`` against ``log(step)``."""
    slope, _ = np.polyfit(np.log(steps), np.log(errors), 1)
    return float(slope)


def reflectionless_eigenfunction(x: np.ndarray, omega: float, m: float, parity: str) -> np.ndarray:
    """Closed-form scattering eigenfunction of ``-d^2/dx^2 + m^2 - (3 m^2/2) sech^2(m x/2)``.

    In ``y = m x / 2`` the potential is the reflectionless ``-6 sech^2 y``
    well.  Its Jost solution at ``q = 2k/m`` is
    ``(3 tanh^2 y - 3 i q tanh y - 1 - q^2) e^{iqy} / ((1 - iq)(2 - iq))``,
    and the combination normalized like ``sin(kx)`` or ``cos(kx)`` of the
    incoming waves is returned.
    """
    k = np.sqrt(omega**2 - m**2)
    q = 2.0 * k / m
    y = 0.5 * m * np.asarray(x)
    th = np.tanh(y)

    def jost(qq):
        return (3.0 * th**2 - 3j * qq * th - 1.0 - qq**2) * np.exp(1j * qq * y) / ((1.0 - 1j * qq) * (2.0 - 1j * qq))

    tau = (1.0 + 1j * q) * (2.0 + 1j * q) / ((1.0 - 1j * q) * (2.0 - 1j * q))
    if parity == "odd":
        return (jost(q) - tau * jost(-q)) / 2j
    return (jost(q) + tau * jost(-q)) / 2.0
