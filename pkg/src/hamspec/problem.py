"""Assembly of the discretized kink linearization from a handful of parameters."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from . import krein, linop, model_gl
from .grid import Grid1D, make_grid

_DETUNED = re.compile(r"^detuned(?:\(\s*([-+0-9.eE]+)\s*\))?$")


def parse_potential_mode(mode: str, default_strength: float = 0.3) -> tuple[str, float]:
    """``"cubic"``, ``"free"`` or ``"detuned(strength)"`` -> ``(kind, strength)``."""
    mode = mode.strip()
    if mode in ("cubic", "free"):
        return mode, 0.0
    hit = _DETUNED.match(mode)
    if hit:
        return "detuned", float(hit.group(1)) if hit.group(1) else default_strength
    raise ValueError(f"unknown potential mode '{mode}'")


@dataclass(eq=False)
class GLProblem:
    """Grid, potential, ``S`` and the Hamilton system of one configuration.

    ``mass`` is the vacuum mass entering ``S``.  In the ``lattice``
    discretization it is the lattice mass for which the sampled ``s0'`` is an
    exact zero mode; in ``sampled`` mode it is the model mass and ``V`` is
    the pointwise linearization potential.
    """

    grid: Grid1D
    model: model_gl.GLModel
    potential_mode: str
    discretization: str
    mass: float
    V: np.ndarray
    S: linop.SymOperator
    spectral: linop.SpectralData
    kink: model_gl.KinkProfile | None
    _system: krein.HamiltonSystem | None = field(default=None, repr=False)

    @property
    def system(self) -> krein.HamiltonSystem:
        if self._system is None:
            self._system = krein.assemble_gl_system(self.S, self.spectral)
        return self._system

    @property
    def edge(self) -> float:
        """Continuum threshold ``mass**2`` of the discretized ``S``."""
        return self.mass**2

    @property
    def zero_mode(self) -> np.ndarray | None:
        return None if self.kink is None else self.kink.derivative


def build_problem(
    half_length: float = 40.0,
    n_points: int = 801,
    vacuum: float = 1.0,
    mass: float = float(np.sqrt(2.0)),
    potential_mode: str = "cubic",
    discretization: str = "lattice",
    kernel_rel_tol: float = 1e-8,
) -> GLProblem:
    grid = make_grid(half_length, n_points)
    model = model_gl.GLModel(vacuum, mass)
    kind, strength = parse_potential_mode(potential_mode)
    if discretization not in ("lattice", "sampled"):
        raise ValueError(f"unknown discretization '{discretization}'")
    if kind == "free":
        kink = None
        m_S, V = mass, np.zeros(grid.n_points)
    else:
        kink = model_gl.kink_profile(grid, model)
        if discretization == "lattice":
            lat = model_gl.lattice_linearization(kink)
            m_S, V = lat.mass, lat.potential
        else:
            m_S, V = mass, model_gl.linearization_potential(kink)
        if kind == "detuned":
            V = V + model_gl.detuning(grid, strength)
    S = linop.assemble_S(grid, m_S, V)
    sd = linop.spectral_decompose(S, rel_tol=kernel_rel_tol)
    return GLProblem(grid, model, potential_mode, discretization, float(m_S), V, S, sd, kink)
