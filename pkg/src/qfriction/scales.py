"""Physical system parameters, derived length/time/temperature scales and
reduced-unit conversion.

All quantities are SI. Every formula accepts ``hbar`` and ``kB`` keywords so
that the same code runs in reduced units (``hbar = kB = 1``).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .constants import HBAR, KB
from .errors import DomainError

INFINITE = math.inf
"""Returned for the thermal wavelength at zero temperature."""


class MassRatioWarning(UserWarning):
    """The gas particles are not much heavier than the light particle."""


def _require_positive(**values):
    for name, value in values.items():
        if not value > 0 or math.isinf(value):
            raise DomainError(f"{name} must be positive and finite, got {value!r}")


def _require_nonnegative(**values):
    for name, value in values.items():
        if not value >= 0 or math.isinf(value):
            raise DomainError(f"{name} must be non-negative and finite, got {value!r}")


def is_infinite(length):
    return length == INFINITE


def mean_free_path(cross_section, density):
    """Mean free path ``1/(sigma n)`` of the light particle.

    There is no sqrt(2) factor: the light particle is much faster than the
    gas, so the relative speed is its own speed.
    """
    _require_positive(cross_section=cross_section, density=density)
    return 1.0 / (cross_section * density)


def thermal_de_broglie(mass, temperature, *, hbar=HBAR, kB=KB):
    """Thermal wavelength ``hbar / (2 sqrt(m kB T))``; :data:`INFINITE` at T = 0."""
    _require_positive(mass=mass)
    _require_nonnegative(temperature=temperature)
    if temperature == 0:
        return INFINITE
    # separate roots keep tiny temperatures from underflowing the product
    return hbar / (2.0 * math.sqrt(mass) * math.sqrt(kB) * math.sqrt(temperature))


def characteristic_temperature(mass, mfp, *, hbar=HBAR, kB=KB):
    """Temperature at which the thermal wavelength equals the mean free path."""
    _require_positive(mass=mass, mfp=mfp)
    return hbar**2 / (4.0 * mass * mfp**2 * kB)


def collision_time_residual(mass, mfp, *, hbar=HBAR):
    """Zero-temperature collision time ``m lambda^2 / hbar``."""
    _require_positive(mass=mass, mfp=mfp)
    return mass * mfp**2 / hbar


@dataclass(frozen=True)
class ParticleGasSystem:
    """A light particle of mass ``mass`` among heavy gas particles.

    Parameters
    ----------
    mass : float
        Light (Brownian) particle mass, kg.
    gas_mass : float
        Gas particle mass, kg. Only used for the ``gas_mass >> mass`` check.
    cross_section : float
        Collision cross-section, m^2.
    density : float
        Gas number density, m^-3.
    temperature : float
        Gas temperature, K. Zero is allowed.
    """

    mass: float
    gas_mass: float
    cross_section: float
    density: float
    temperature: float = 0.0

    def __post_init__(self):
        _require_positive(mass=self.mass, gas_mass=self.gas_mass,
                          cross_section=self.cross_section, density=self.density)
        _require_nonnegative(temperature=self.temperature)
        if self.gas_mass / self.mass < 10:
            warnings.warn(
                f"gas_mass/mass = {self.gas_mass / self.mass:.3g} < 10; "
                "the light-particle approximation assumes heavy gas particles",
                MassRatioWarning, stacklevel=3)

    @classmethod
    def from_mean_free_path(cls, mass, gas_mass, mfp, temperature=0.0,
                            cross_section=1e-19):
        """Build a system whose density reproduces the given mean free path."""
        _require_positive(mfp=mfp, cross_section=cross_section)
        return cls(mass, gas_mass, cross_section, 1.0 / (cross_section * mfp),
                   temperature)

    def with_temperature(self, temperature):
        return ParticleGasSystem(self.mass, self.gas_mass, self.cross_section,
                                 self.density, temperature)

    @property
    def mfp(self):
        return mean_free_path(self.cross_section, self.density)


@dataclass(frozen=True)
class SystemScales:
    """Length, time and temperature scales derived from a system."""

    mfp: float
    thermal_wavelength: float
    T_lambda: float
    tau_residual: float
    b_residual: float


def derive_scales(system, *, hbar=HBAR, kB=KB):
    mfp = mean_free_path(system.cross_section, system.density)
    return SystemScales(
        mfp=mfp,
        thermal_wavelength=thermal_de_broglie(system.mass, system.temperature,
                                              hbar=hbar, kB=kB),
        T_lambda=characteristic_temperature(system.mass, mfp, hbar=hbar, kB=kB),
        tau_residual=collision_time_residual(system.mass, mfp, hbar=hbar),
        b_residual=hbar / mfp**2,
    )


@dataclass(frozen=True)
class DimensionlessState:
    """Reduced coordinates used on the figure axes.

    ``temperature`` is T/T_lambda, ``time`` is b t / m, ``dispersion`` is
    sigma_x^2 b / hbar and ``dispersion_mfp`` is sigma_x^2 / lambda^2.
    """

    temperature: float
    time: float
    dispersion: float
    dispersion_mfp: float

    def __post_init__(self):
        _require_nonnegative(temperature=self.temperature, time=self.time,
                             dispersion=self.dispersion,
                             dispersion_mfp=self.dispersion_mfp)


def _resolve_friction(system, scales, b):
    if b is None:
        if system.temperature == 0:
            return scales.b_residual
        raise DomainError(
            "a friction coefficient is required at T > 0: pass b= from one of "
            "friction.classical_friction, friction.friction_form_a, "
            "friction.friction_form_b_dimensional or friction.residual_friction")
    b = getattr(b, "b", b)
    _require_positive(b=b)
    return b


def to_dimensionless(system, scales, t, sigma_x2, b=None, *, hbar=HBAR):
    """Convert a (time, dispersion) pair to reduced coordinates.

    ``b`` may be a float or a :class:`~qfriction.friction.FrictionResult`; it
    may be omitted only at zero temperature, where the residual friction is
    the unique choice.
    """
    b = _resolve_friction(system, scales, b)
    _require_nonnegative(t=t, sigma_x2=sigma_x2)
    return DimensionlessState(
        temperature=system.temperature / scales.T_lambda,
        time=b * t / system.mass,
        dispersion=sigma_x2 * b / hbar,
        dispersion_mfp=sigma_x2 / scales.mfp**2,
    )


def from_dimensionless(system, scales, state, b=None, *, hbar=HBAR):
    """Inverse of :func:`to_dimensionless`; returns ``(T, t, sigma_x2)``."""
    b = _resolve_friction(system, scales, b)
    return (state.temperature * scales.T_lambda,
            state.time * system.mass / b,
            state.dispersion * hbar / b)
