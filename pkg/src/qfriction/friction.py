"""Friction and diffusion coefficients of a light particle in a heavy gas.

Four friction forms are provided:

* ``classical`` -- gas-kinetic ``sqrt(m kB T) / lambda``; zero at T = 0.
* ``residual`` -- zero-temperature quantum friction ``hbar / lambda^2``.
* ``thermal_a`` / ``thermal_b`` -- the two closed forms valid at any
  temperature. They differ by exactly a factor of two (``thermal_b`` is the
  larger); ``thermal_b`` in dimensionless form is what :func:`friction_form_b`
  returns and what :func:`qfriction.figures.fig1` tabulates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import HBAR, KB
from .errors import DomainError
from .numerics import x_minus_log1p
from .scales import characteristic_temperature, _require_nonnegative, _require_positive

FORMS = ("classical", "residual", "thermal_a", "thermal_b")

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class FrictionResult:
    """A friction coefficient together with its dimensionless value
    ``b lambda^2 / hbar`` and the formula that produced it."""

    b: float
    b_dimensionless: float
    form: str
    theta: float
    zero_temperature_limit: bool = False

    @property
    def mobility(self):
        return math.inf if self.b == 0 else 1.0 / self.b


def _theta(mass, temperature, mfp, hbar, kB):
    return temperature / characteristic_temperature(mass, mfp, hbar=hbar, kB=kB)


def classical_friction(mass, temperature, mfp, *, hbar=HBAR, kB=KB):
    """Gas-kinetic friction ``sqrt(m kB T) / lambda``.

    At T = 0 this returns ``b = 0``: a classical particle is at rest.
    """
    _require_positive(mass=mass, mfp=mfp)
    _require_nonnegative(temperature=temperature)
    b = math.sqrt(mass * kB * temperature) / mfp
    theta = _theta(mass, temperature, mfp, hbar, kB)
    return FrictionResult(b, 0.5 * math.sqrt(theta), "classical", theta,
                          zero_temperature_limit=temperature == 0)


def residual_friction(mfp, *, hbar=HBAR):
    """Zero-temperature friction ``hbar / lambda^2``; mobility ``lambda^2 / hbar``."""
    _require_positive(mfp=mfp)
    return FrictionResult(hbar / mfp**2, 1.0, "residual", 0.0,
                          zero_temperature_limit=True)


def friction_form_b(theta):
    """Dimensionless friction ``b lambda^2 / hbar`` at reduced temperature
    ``theta = T / T_lambda``::

        f(theta) = sqrt(theta) / sqrt(1 - log(1 + theta) / theta)

    Rises monotonically from ``sqrt(2)`` at ``theta = 0`` towards
    ``sqrt(theta)``.
    """
    if not theta >= 0 or math.isinf(theta):
        raise DomainError(f"theta must be non-negative and finite, got {theta!r}")
    if theta == 0:
        return SQRT2
    # 1 - log(1+theta)/theta == (theta - log1p(theta)) / theta
    return theta / math.sqrt(x_minus_log1p(theta))


def friction_form_a(mass, temperature, mfp, *, hbar=HBAR, kB=KB):
    """Thermal friction ``sqrt(m kB T / [lambda^2 - lT^2 log(1 + lambda^2/lT^2)])``
    with ``lT`` the thermal wavelength.

    Equal to half of :func:`friction_form_b` in dimensional units. At T = 0
    the analytic limit ``hbar / (sqrt(2) lambda^2)`` is returned, flagged via
    ``zero_temperature_limit``.
    """
    _require_positive(mass=mass, mfp=mfp)
    _require_nonnegative(temperature=temperature)
    if temperature == 0:
        return FrictionResult(hbar / (SQRT2 * mfp**2), 1.0 / SQRT2, "thermal_a",
                              0.0, zero_temperature_limit=True)
    lt2 = hbar**2 / (4.0 * mass * kB * temperature)
    # lambda^2 - lT^2 log(1 + lambda^2/lT^2) == lT^2 * x_minus_log1p(lambda^2/lT^2)
    denominator = lt2 * x_minus_log1p(mfp**2 / lt2)
    b = math.sqrt(mass * kB * temperature / denominator)
    theta = _theta(mass, temperature, mfp, hbar, kB)
    return FrictionResult(b, b * mfp**2 / hbar, "thermal_a", theta)


def friction_form_b_dimensional(mass, temperature, mfp, *, hbar=HBAR, kB=KB):
    _require_positive(mass=mass, mfp=mfp)
    _require_nonnegative(temperature=temperature)
    theta = _theta(mass, temperature, mfp, hbar, kB)
    f = friction_form_b(theta)
    return FrictionResult(f * hbar / mfp**2, f, "thermal_b", theta,
                          zero_temperature_limit=temperature == 0)


def friction(form, mass, temperature, mfp, *, hbar=HBAR, kB=KB):
    """Dispatch on a form name from :data:`FORMS`."""
    if form == "classical":
        return classical_friction(mass, temperature, mfp, hbar=hbar, kB=kB)
    if form == "residual":
        return residual_friction(mfp, hbar=hbar)
    if form == "thermal_a":
        return friction_form_a(mass, temperature, mfp, hbar=hbar, kB=kB)
    if form == "thermal_b":
        return friction_form_b_dimensional(mass, temperature, mfp, hbar=hbar, kB=kB)
    raise DomainError(f"unknown friction form {form!r}; choose from {', '.join(FORMS)}")


def einstein_diffusion(temperature, b, *, kB=KB):
    """Einstein diffusion constant ``kB T / b``."""
    b = getattr(b, "b", b)
    _require_positive(b=b)
    _require_nonnegative(temperature=temperature)
    return kB * temperature / b


def classical_diffusion(mass, temperature, mfp, *, kB=KB):
    """Gas-kinetic diffusion constant ``lambda sqrt(kB T / m)``."""
    _require_positive(mass=mass, mfp=mfp)
    _require_nonnegative(temperature=temperature)
    return mfp * math.sqrt(kB * temperature / mass)


@dataclass(frozen=True)
class SemiclassicalDeviation:
    """Quantum reduction of the diffusion constant at reduced temperature theta.

    ``exact_ratio`` is D/D_cl from the ``thermal_a`` friction;
    ``series_correction`` is the truncated semiclassical relative correction
    ``-1/(4 theta)``; ``comparator_correction`` is the heavy-particle result
    from the linear Boltzmann equation, ``+1/(4 theta)``.
    """

    theta: float
    exact_ratio: float
    exact_deficit: float
    leading_deficit: float
    series_correction: float
    comparator_correction: float


def semiclassical_deviation(theta):
    if not theta > 0 or math.isinf(theta):
        raise DomainError(f"theta must be positive and finite, got {theta!r}")
    x = math.log1p(theta) / theta
    ratio_sq = x_minus_log1p(theta) / theta  # 1 - x
    ratio = math.sqrt(ratio_sq)
    return SemiclassicalDeviation(
        theta=theta,
        exact_ratio=ratio,
        exact_deficit=x / (1.0 + ratio),  # 1 - sqrt(1 - x) without cancellation
        leading_deficit=0.5 * x,
        series_correction=-0.25 / theta,
        comparator_correction=0.25 / theta,
    )
