"""Curve tables reproducing the friction-versus-temperature and
dispersion-versus-time figures."""
from __future__ import annotations

import math

import numpy as np

from .dynamics import approx_virial, integrate_virial, superposition
from .errors import DomainError
from .friction import friction_form_b
from .tables import CurveTable


def log_grid(lo, hi, points):
    if points < 2:
        raise DomainError("points must be >= 2")
    return np.logspace(math.log10(lo), math.log10(hi), points)


def fig1(theta_min=1e-3, theta_max=1e3, points=61):
    """Dimensionless friction ``b lambda^2 / hbar`` against ``T / T_lambda``.

    ``f_classical`` is the high-temperature limit ``sqrt(theta)`` of the
    thermal curve (the gas-kinetic friction itself is half of that).
    """
    if not 0 < theta_min < theta_max:
        raise DomainError("need 0 < theta_min < theta_max")
    theta = log_grid(theta_min, theta_max, points)
    meta = {
        "figure": "fig1",
        "grid": "log",
        "styles": {"f_thermal_b": "solid", "f_classical": "dotted"},
        "notes": "f_thermal_b = sqrt(theta)/sqrt(1 - log(1+theta)/theta); "
                 "f_classical = sqrt(theta) (alternative gas-kinetic normalisation: sqrt(theta)/2)",
    }
    return CurveTable.from_columns([
        ("theta", "1", theta),
        ("f_thermal_b", "1", [friction_form_b(t) for t in theta]),
        ("f_classical", "1", np.sqrt(theta)),
    ], meta)


def fig2(s_max=1e4, points=81, rel_tol=1e-9):
    """Dimensionless dispersion ``sigma_x^2 b / hbar`` against ``t / tau``."""
    if not s_max > 1:
        raise DomainError("s_max must exceed 1")
    s = log_grid(1.0, s_max, points)
    s[0], s[-1] = 1.0, float(s_max)
    traj = integrate_virial(s[-1], rel_tol, s_eval=s.tolist())
    meta = {
        "figure": "fig2",
        "grid": "log",
        "rel_tol": rel_tol,
        "ode_steps": traj.n_steps,
        "styles": {"y_quantum_classical": "solid", "y_virial": "dashed",
                   "y_superposition": "dotted", "y_approx": "dashdot"},
    }
    return CurveTable.from_columns([
        ("s", "1", s),
        ("y_quantum_classical", "1", np.sqrt(s)),
        ("y_virial", "1", [traj(v) for v in s]),
        ("y_superposition", "1", [superposition(v) for v in s]),
        ("y_approx", "1", [approx_virial(v) for v in s]),
    ], meta)
