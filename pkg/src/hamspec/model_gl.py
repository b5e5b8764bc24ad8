"""Quartic double-well field model: potential, kink, and its linearization.

The family is ``U(psi) = m^2 / (8 a^2) * (psi^2 - a^2)^2`` with nonlinearity
``F = -U'``.  Its kink ``a * tanh(m x / 2)`` and the Poschl-Teller
linearization potential are available in closed form, which is what makes
analytic oracles possible downstream.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConditionViolation
from .grid import Grid1D


@dataclass(frozen=True)
class GLModel:
    """Double-well model with vacua ``+-a`` and vacuum mass ``m``."""

    vacuum: float = 1.0
    mass: float = float(np.sqrt(2.0))

    def __post_init__(self):
        if self.vacuum <= 0 or self.mass <= 0:
            raise ValueError("vacuum and mass must be positive")


@dataclass(frozen=True)
class KinkProfile:
    model: GLModel
    grid: Grid1D
    values: np.ndarray
    derivative: np.ndarray


def potential_U(psi, model: GLModel):
    a, m = model.vacuum, model.mass
    psi = np.asarray(psi, dtype=float)
    return m**2 / (8.0 * a**2) * (psi**2 - a**2) ** 2


def nonlinearity_F(psi, model: GLModel):
    """``F(psi) = -U'(psi)``."""
    a, m = model.vacuum, model.mass
    psi = np.asarray(psi, dtype=float)
    return m**2 / (2.0 * a**2) * psi * (a**2 - psi**2)


def nonlinearity_dF(psi, model: GLModel):
    a, m = model.vacuum, model.mass
    psi = np.asarray(psi, dtype=float)
    return m**2 / (2.0 * a**2) * (a**2 - 3.0 * psi**2)


def kink_profile(grid: Grid1D, model: GLModel, tol: float = 1e-8) -> KinkProfile:
    """Static kink ``s0 = a tanh(m x / 2)`` sampled on ``grid``.

    Raises
    ------
    ConditionViolation
        If the vacua are not reached at the box edges within ``tol``.
    """
    a, m = model.vacuum, model.mass
    if m * grid.half_length < 10:
        warnings.warn(f"m*L = {m * grid.half_length:.3g} < 10: box may be too short", stacklevel=2)
    y = 0.5 * m * grid.points
    s = a * np.tanh(y)
    ds = 0.5 * a * m / np.cosh(y) ** 2
    edge = a - s[-1]
    if edge > tol * a:
        raise ConditionViolation("kink", f"vacuum not reached at x=L (gap {edge:.3e})", edge)
    return KinkProfile(model, grid, s, ds)


def stationary_residual(kink: KinkProfile) -> np.ndarray:
    """Interior residual of ``s'' + F(s) = 0`` with the 3-point stencil."""
    s, h = kink.values, kink.grid.spacing
    d2 = (s[2:] - 2.0 * s[1:-1] + s[:-2]) / h**2
    return d2 + nonlinearity_F(s[1:-1], kink.model)


def linearization_potential(kink: KinkProfile) -> np.ndarray:
    """``V0 = -F'(s0) - m^2`` evaluated pointwise on the kink samples."""
    m = kink.model.mass
    # -F'(s) - m^2 = (3 m^2 / 2a^2)(s^2 - a^2); written via sech^2 to avoid cancellation
    sech2 = 1.0 / np.cosh(0.5 * m * kink.grid.points) ** 2
    return -1.5 * m**2 * sech2


@dataclass(frozen=True)
class LatticeLinearization:
    """Lattice-consistent discretization of the kink linearization.

    With the 3-point stencil ``D_h``, the operator
    ``-D_h + mass**2 + potential`` annihilates the sampled ``s0'`` to
    roundoff; ``mass`` is the lattice vacuum mass, which tends to ``m``
    as ``h -> 0``.
    """

    mass: float
    potential: np.ndarray


def lattice_linearization(kink: KinkProfile) -> LatticeLinearization:
    m, h = kink.model.mass, kink.grid.spacing
    delta = 0.5 * m * h
    b2 = np.sinh(delta) ** 2
    u = 1.0 / np.cosh(0.5 * m * kink.grid.points) ** 2
    mass2 = 4.0 * b2 / h**2
    # closed form of (D_h s0')/s0' - mass2 for s0' proportional to sech^2(m x / 2)
    pot = -(2.0 * u * b2 / h**2) * (1.0 + np.cosh(2.0 * delta) * (2.0 + u * b2)) / (1.0 + u * b2) ** 2
    return LatticeLinearization(float(np.sqrt(mass2)), pot)


def detuning(grid: Grid1D, strength: float) -> np.ndarray:
    """Gaussian bump ``strength * exp(-x^2)`` used to break the threshold resonance."""
    return strength * np.exp(-grid.points**2)


@dataclass(frozen=True)
class DecayFit:
    kappa: float
    C: float


def verify_decay(V: np.ndarray, grid: Grid1D, min_kappa: float = 0.1, floor: float = 1e-280) -> DecayFit:
    """Fit ``|V(x)| ~ C exp(-kappa |x|)`` on the tail ``|x| > L/2``.

    Samples with ``|V|`` below ``floor`` (underflow) are ignored.

    Raises
    ------
    ConditionViolation
        If the fitted rate is at most ``min_kappa``.
    """
    V = np.asarray(V, dtype=float)
    if not np.any(V != 0):
        raise ValueError("V vanishes identically")
    x = grid.points
    sel = (np.abs(x) > 0.5 * grid.half_length) & (np.abs(V) > floor)
    if sel.sum() < 2:
        raise ConditionViolation("decay", "no resolvable tail samples", None)
    slope, intercept = np.polyfit(np.abs(x[sel]), np.log(np.abs(V[sel])), 1)
    fit = DecayFit(float(-slope), float(np.exp(intercept)))
    if fit.kappa <= min_kappa:
        raise ConditionViolation("decay", f"fitted decay rate {fit.kappa:.3g} <= {min_kappa}", fit.kappa)
    return fit
