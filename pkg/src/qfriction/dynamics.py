"""Virial-theorem ODEs for a quantum particle at zero temperature, in
reduced units.

``integrate_virial`` solves, with ``s = b t / m`` and ``y = sigma_x^2 b / hbar``::

    dy/ds = 1/(2y) + 1/(2s),   y(1) = 1

The first term is the Heisenberg velocity dispersion of the particle, the
second the effective temperature of a quantum bath. ``integrate_gas_virial``
solves the gas variant with ``u = sigma_x^2 / lambda^2`` and
``s' = hbar t / (m lambda^2)``::

    du/ds' = (1 + u) / (2 u^2)

whose exact implicit solution is ``u^2 - 2u + 2 log(1+u) = s'``.
"""
from __future__ import annotations

import math

from .errors import DomainError
from .numerics import OdeProblem, gas_dispersion_potential, ode_integrate

TERMS = ("quantum", "bath")


def virial_rhs(terms=TERMS):
    quantum = "quantum" in terms
    bath = "bath" in terms
    if not (quantum or bath) or set(terms) - set(TERMS):
        raise DomainError(f"terms must be a non-empty subset of {TERMS}")

    def rhs(s, y):
        return (0.5 / y if quantum else 0.0) + (0.5 / s if bath else 0.0)

    return rhs


def integrate_virial(s_end, rel_tol=1e-9, *, abs_tol=1e-12, s_eval=None,
                     terms=TERMS):
    """Integrate the reduced virial equation from ``y(1) = 1`` to ``s_end``.

    ``terms`` drops either right-hand-side term to recover the two limiting
    laws (``("quantum",)`` gives ``sqrt(s)``, ``("bath",)`` gives
    ``log(sqrt(s)) + 1``).
    """
    if not s_end > 1:
        raise DomainError(f"s_end must exceed 1, got {s_end!r}")
    if not 1e-12 <= rel_tol <= 1e-3:
        raise DomainError(f"rel_tol must lie in [1e-12, 1e-3], got {rel_tol!r}")
    problem = OdeProblem(virial_rhs(terms), 1.0, 1.0, s_end,
                         name="virial[" + "+".join(terms) + "]")
    return ode_integrate(problem, rel_tol, abs_tol, s_eval=s_eval)


def approx_virial(s):
    """Closed-form approximation ``sqrt(s) + [log(sqrt(s)) + 1] / 3``."""
    if not s >= 1:
        raise DomainError(f"approximation holds for s >= 1, got {s!r}")
    return math.sqrt(s) + (0.5 * math.log(s) + 1.0) / 3.0


def superposition(s):
    """Upper envelope ``sqrt(s) + log(sqrt(s)) + 1``."""
    if not s >= 1:
        raise DomainError(f"superposition holds for s >= 1, got {s!r}")
    return math.sqrt(s) + 0.5 * math.log(s) + 1.0


def gas_virial_rhs(s, u):
    return (1.0 + u) / (2.0 * u * u)


def integrate_gas_virial(s_end, rel_tol=1e-9, u0=1e-4, *, abs_tol=1e-12,
                         s_eval=None):
    """Integrate the gas virial equation from ``u(s0) = u0`` to ``s_end``.

    The start time ``s0`` comes from the exact implicit solution, which steps
    around the ``u^-2`` singularity at ``s' = 0``.
    """
    if not u0 > 0:
        raise DomainError(f"u0 must be positive, got {u0!r}")
    s0 = gas_dispersion_potential(u0)
    if not s_end > s0:
        raise DomainError(f"s_end must exceed the start time {s0!r}")
    if not 1e-12 <= rel_tol <= 1e-3:
        raise DomainError(f"rel_tol must lie in [1e-12, 1e-3], got {rel_tol!r}")
    problem = OdeProblem(gas_virial_rhs, s0, u0, s_end, name="gas_virial")
    return ode_integrate(problem, rel_tol, abs_tol, s_eval=s_eval)
