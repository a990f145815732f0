"""Physical constants (exact 2019 SI values)."""

HBAR = 1.054571817e-34
"""Reduced Planck constant, J s."""

KB = 1.380649e-23
"""Boltzmann constant, J/K."""

AMU = 1.66053906660e-27
"""Atomic mass unit, kg (CODATA 2018)."""
