"""Position dispersion laws ``sigma_x^2(t)``.

Explicit laws are plain formulas; the two implicit laws (finite-temperature
quantum particle in a classical gas, and quantum particle in a quantum gas)
are solved with the safeguarded root finder from :mod:`qfriction.numerics`.
Laws that only hold after one collision time reject earlier times.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .constants import HBAR, KB
from .errors import DomainError
from .friction import friction
from .numerics import expand_bracket, gas_dispersion_potential, root_find, x_minus_log1p
from .scales import _require_nonnegative, _require_positive, is_infinite, thermal_de_broglie

REGIMES = ("einstein", "quantum_classical", "gas", "thermal", "quantum_gas",
           "cube_root", "log_law", "combined_gas", "fractional")


@dataclass(frozen=True)
class DispersionLaw:
    """A dispersion law bound to its parameters; call it with a time."""

    regime: str
    parameters: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise DomainError(f"unknown regime {self.regime!r}")

    def __call__(self, t):
        return _LAWS[self.regime](t=t, **self.parameters)

    @property
    def start_time(self):
        """First admissible time (the collision time for laws valid from it)."""
        p = self.parameters
        hbar = p.get("hbar", HBAR)
        if self.regime == "log_law":
            return p["mass"] / p["b"]
        if self.regime == "combined_gas":
            return p["mass"] * p["mfp"] ** 2 / hbar
        return 0.0


def einstein_law(D, t):
    """Classical diffusion ``2 D t``."""
    _require_nonnegative(D=D, t=t)
    return 2.0 * D * t


def quantum_subdiffusion(mass, b, t, *, hbar=HBAR):
    """Quantum particle in a classical bath at T = 0: ``hbar sqrt(t / (m b))``."""
    _require_positive(mass=mass, b=b)
    _require_nonnegative(t=t)
    return hbar * math.sqrt(t / (mass * b))


def gas_subdiffusion(mass, mfp, t, *, hbar=HBAR):
    """:func:`quantum_subdiffusion` with residual friction: ``lambda sqrt(hbar t / m)``."""
    _require_positive(mass=mass, mfp=mfp)
    _require_nonnegative(t=t)
    return mfp * math.sqrt(hbar * t / mass)


def time_dependent_diffusion(mass, mfp, t, *, hbar=HBAR, kB=KB):
    """Return ``(D(t), T_eff(t))``: the apparent diffusion coefficient
    ``sigma_x^2 / 2t`` of the gas law and the effective quantum temperature
    ``hbar / (4 kB t)``."""
    _require_positive(mass=mass, mfp=mfp)
    if not t > 0:
        raise DomainError("time_dependent_diffusion diverges at t = 0; need t > 0")
    D = mfp * math.sqrt(hbar / (4.0 * mass * t))
    return D, effective_temperature(t, hbar=hbar, kB=kB)


def effective_temperature(t, *, hbar=HBAR, kB=KB):
    if not t > 0:
        raise DomainError("effective temperature diverges at t = 0; need t > 0")
    return hbar / (4.0 * kB * t)


def solve_thermal_dispersion(D, thermal_wavelength, t, *, mass=None, b=None,
                             hbar=HBAR):
    """Solve ``s - lT^2 log(1 + s/lT^2) = 2 D t`` for the dispersion ``s``.

    The left side is strictly increasing from zero, so the root is unique.
    At zero temperature (``thermal_wavelength`` infinite) the equation
    degenerates to :func:`quantum_subdiffusion`, which needs ``mass`` and
    ``b``.
    """
    _require_nonnegative(D=D, t=t)
    if is_infinite(thermal_wavelength):
        if mass is None or b is None:
            raise DomainError("zero-temperature case needs mass= and b=")
        return quantum_subdiffusion(mass, b, t, hbar=hbar)
    _require_nonnegative(thermal_wavelength=thermal_wavelength)
    target = 2.0 * D * t
    if target == 0:
        return 0.0
    if thermal_wavelength == 0:
        return target
    scale = thermal_wavelength**2
    c = target / scale
    # reduced unknown x = s / lT^2 solves x - log(1+x) = c
    x = _monotone_root(lambda x: x_minus_log1p(x) - c,
                       lambda x: x / (1.0 + x),
                       guess=math.sqrt(2.0 * c) if c < 1 else c)
    return x * scale


def solve_quantum_gas_dispersion(mass, mfp, t, *, hbar=HBAR):
    """Solve ``u^2 - 2u + 2 log(1 + u) = hbar t / (m lambda^2)`` for
    ``u = sigma_x^2 / lambda^2`` and return ``sigma_x^2``."""
    _require_positive(mass=mass, mfp=mfp)
    _require_nonnegative(t=t)
    c = hbar * t / (mass * mfp**2)
    if c == 0:
        return 0.0
    u = _monotone_root(lambda u: gas_dispersion_potential(u) - c,
                       lambda u: 2.0 * u * u / (1.0 + u),
                       guess=(1.5 * c) ** (1 / 3) if c < 1 else math.sqrt(c))
    return u * mfp**2


def _monotone_root(fn, fprime, guess):
    lo, hi = expand_bracket(fn, 0.0, 2.0 * guess)
    return root_find(fn, (lo, hi), fprime=fprime, rtol=1e-15)


def cube_root_law(mass, mfp, t, *, hbar=HBAR):
    """Short-time quantum-gas law ``lambda (3 lambda hbar t / 2m)^(1/3)``."""
    _require_positive(mass=mass, mfp=mfp)
    _require_nonnegative(t=t)
    return mfp * (1.5 * mfp * hbar * t / mass) ** (1 / 3)


def cube_root_law_friction(mass, b, t, *, hbar=HBAR):
    """Same law written with friction: ``hbar (3t / 2 m b^2)^(1/3)``."""
    _require_positive(mass=mass, b=b)
    _require_nonnegative(t=t)
    return hbar * (1.5 * t / (mass * b * b)) ** (1 / 3)


def _check_after_collision(t, tau):
    if t < tau:
        raise DomainError(
            f"law holds only for t >= tau (collision time {tau:.6g}); got t={t:.6g}")


def log_law(mass, b, t, *, hbar=HBAR):
    """Classical particle in a zero-temperature quantum bath:
    ``(hbar/b) [log sqrt(b t / m) + 1]``, valid for ``t >= m/b``."""
    _require_positive(mass=mass, b=b)
    _check_after_collision(t, mass / b)
    return hbar / b * (0.5 * math.log(b * t / mass) + 1.0)


def combined_gas_law(mass, mfp, t, *, hbar=HBAR):
    """Approximate quantum particle in a quantum gas:
    ``lambda sqrt(hbar t/m) + lambda^2 [log(sqrt(hbar t/m)/lambda) + 1] / 3``."""
    _require_positive(mass=mass, mfp=mfp)
    tau = mass * mfp**2 / hbar
    _check_after_collision(t, tau)
    s = t / tau
    return mfp**2 * (math.sqrt(s) + (0.5 * math.log(s) + 1.0) / 3.0)


def fractional_law(alpha, mass, b, t, *, hbar=HBAR):
    """General fractional law ``(hbar/b) (b t / m)^(2 alpha)``, ``0 <= alpha <= 1``."""
    if not 0 <= alpha <= 1:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha!r}")
    _require_positive(mass=mass, b=b)
    _require_nonnegative(t=t)
    if alpha == 0:
        return hbar / b
    return hbar / b * (b * t / mass) ** (2.0 * alpha)


def thermal_dispersion(mass, temperature, mfp, t, *, form="thermal_a",
                       hbar=HBAR, kB=KB):
    """Finite-temperature dispersion with ``D = kB T / b(T)``.

    The friction form is explicit; ``thermal_a`` is the default because it
    reduces to the gas-kinetic friction at high temperature.
    """
    b = friction(form, mass, temperature, mfp, hbar=hbar, kB=kB).b
    lt = thermal_de_broglie(mass, temperature, hbar=hbar, kB=kB)
    D = kB * temperature / b
    return solve_thermal_dispersion(D, lt, t, mass=mass, b=b, hbar=hbar)


_LAWS = {
    "einstein": einstein_law,
    "quantum_classical": quantum_subdiffusion,
    "gas": gas_subdiffusion,
    "thermal": solve_thermal_dispersion,
    "quantum_gas": solve_quantum_gas_dispersion,
    "cube_root": cube_root_law,
    "log_law": log_law,
    "combined_gas": combined_gas_law,
    "fractional": fractional_law,
}
