"""Spectral analysis of linear Hamilton systems ``dX/dt = J B X``.

Krein reduction to a Hermitian generator, Jordan structure at zero,
scattering eigenfunctions of 1D Schrodinger operators and the resulting
eigenfunction expansion, checked against independent propagators.
"""

__version__ = "0.1.0"
