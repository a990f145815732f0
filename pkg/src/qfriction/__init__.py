"""Friction, dispersion and Monte Carlo tools for a light quantum particle
moving through a heavy classical (or quantum) gas."""

__version__ = "0.1.0"

from .constants import HBAR, KB  # noqa: E402
from .errors import ConfigError, DomainError, NumericError, QFrictionError  # noqa: E402
from .scales import (ParticleGasSystem, SystemScales, DimensionlessState,  # noqa: E402
                     derive_scales, to_dimensionless, from_dimensionless)

__all__ = [
    "HBAR", "KB", "ConfigError", "DomainError", "NumericError", "QFrictionError",
    "ParticleGasSystem", "SystemScales", "DimensionlessState", "derive_scales",
    "to_dimensionless", "from_dimensionless",
]
