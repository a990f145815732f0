"""Shared numeric kernel: stable special functions, a safeguarded
Newton-bisection root finder and an adaptive Dormand-Prince integrator with
cubic Hermite dense output.

The integrator handles scalar, smooth, non-stiff problems only; that is all
the virial equations need.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable

from .errors import DomainError, NumericError

# --------------------------------------------------------------------------
# Stable elementary combinations


def x_minus_log1p(x):
    """Return ``x - log(1 + x)`` without cancellation for small ``x >= 0``."""
    if x < 0:
        raise DomainError(f"x_minus_log1p needs x >= 0, got {x!r}")
    if x < 0.1:
        total = 0.0
        power = x * x
        k = 2
        while True:
            term = power / k
            total += term if k % 2 == 0 else -term
            if term <= 1e-17 * total or term == 0.0:
                return total
            power *= x
            k += 1
    return x - math.log1p(x)


def gas_dispersion_potential(u):
    """Return ``u^2 - 2u + 2 log(1 + u)`` accurately for all ``u >= 0``.

    For small ``u`` the three terms cancel down to ``2u^3/3``, so the
    alternating series ``2 sum_{k>=3} (-1)^(k+1) u^k / k`` is used instead.
    """
    if u < 0:
        raise DomainError(f"u must be >= 0, got {u!r}")
    if u < 0.1:
        total = 0.0
        power = u**3
        k = 3
        while True:
            term = 2.0 * power / k
            total += term if k % 2 == 1 else -term
            if term <= 1e-17 * total or term == 0.0:
                return total
            power *= u
            k += 1
    return u * u - 2.0 * x_minus_log1p(u)


# --------------------------------------------------------------------------
# Root finding


def expand_bracket(fn, lo, hi, *, factor=2.0, max_iter=200):
    """Grow ``hi`` geometrically until ``fn`` changes sign on ``[lo, hi]``."""
    flo = fn(lo)
    if flo == 0:
        return lo, lo
    fhi = fn(hi)
    for _ in range(max_iter):
        if math.copysign(1.0, flo) != math.copysign(1.0, fhi) or fhi == 0:
            return lo, hi
        lo, flo = hi, fhi
        hi *= factor
        fhi = fn(hi)
    raise NumericError(
        f"no sign change found up to hi={hi:.6g} (f(lo)={flo:.6g}, f(hi)={fhi:.6g})")


def root_find(fn, bracket, *, fprime=None, rtol=1e-12, atol=0.0,
              bisect_rtol=1e-3, max_iter=400):
    """Root of a function that changes sign on ``bracket``.

    Bisection narrows the bracket to ``bisect_rtol``; Newton steps (when
    ``fprime`` is given) then polish the root, falling back to bisection
    whenever a step leaves the current bracket.

    Raises
    ------
    NumericError
        If the interval does not bracket a root or the iteration stalls.
    """
    lo, hi = map(float, bracket)
    if lo > hi:
        lo, hi = hi, lo
    flo, fhi = fn(lo), fn(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise NumericError(
            f"interval [{lo:.6g}, {hi:.6g}] does not bracket a root "
            f"(f(lo)={flo:.6g}, f(hi)={fhi:.6g})")
    rising = fhi > 0

    def width_ok(tol):
        return hi - lo <= tol * max(abs(lo), abs(hi)) + atol

    it = 0
    while not width_ok(bisect_rtol if fprime is not None else rtol):
        it += 1
        if it > max_iter:
            raise NumericError(f"bisection stalled on [{lo!r}, {hi!r}]")
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            return mid
        fm = fn(mid)
        if fm == 0:
            return mid
        if (fm > 0) == rising:
            hi = mid
        else:
            lo = mid
    if fprime is None:
        return 0.5 * (lo + hi)

    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        fx = fn(x)
        if fx == 0:
            return x
        if (fx > 0) == rising:
            hi = x
        else:
            lo = x
        d = fprime(x)
        step = fx / d if d != 0 else math.inf
        x_new = x - step
        if not lo < x_new < hi:
            # a step back onto a bracket end means rounding noise dominates;
            # bisection still shrinks the bracket, so this terminates
            x_new = 0.5 * (lo + hi)
            if x_new in (lo, hi):
                return x
        if abs(x_new - x) <= rtol * abs(x_new) + atol or x_new == x:
            return x_new
        x = x_new
    raise NumericError(f"Newton polish did not converge near x={x!r}")


# --------------------------------------------------------------------------
# ODE integration

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


LOCAL_SAFETY = 0.1


@dataclass(frozen=True)
class OdeProblem:
    """Scalar initial value problem ``dy/ds = rhs(s, y)`` on ``[s0, s_end]``."""

    rhs: Callable[[float, float], float]
    s0: float
    y0: float
    s_end: float
    name: str = ""


@dataclass
class Trajectory:
    """Accepted steps of an integration, with cubic Hermite dense output."""

    s: list
    y: list
    dydt: list
    rel_tol: float
    abs_tol: float
    n_steps: int = 0
    n_rejected: int = 0
    n_evals: int = 0
    name: str = ""
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.s)

    def __call__(self, s):
        """Interpolate ``y`` at ``s`` (exact at the accepted nodes)."""
        if not self.s[0] <= s <= self.s[-1]:
            raise DomainError(f"s={s!r} outside [{self.s[0]!r}, {self.s[-1]!r}]")
        i = bisect.bisect_left(self.s, s)
        if i < len(self.s) and self.s[i] == s:
            return self.y[i]
        s0, s1 = self.s[i - 1], self.s[i]
        y0, y1 = self.y[i - 1], self.y[i]
        f0, f1 = self.dydt[i - 1], self.dydt[i]
        h = s1 - s0
        w = (s - s0) / h
        h00 = (1 + 2 * w) * (1 - w) ** 2
        h10 = w * (1 - w) ** 2
        h01 = w * w * (3 - 2 * w)
        h11 = w * w * (w - 1)
        return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1


def ode_integrate(problem, rel_tol=1e-9, abs_tol=1e-12, *, s_eval=None,
                  h0=None, max_steps=1_000_000):
    """Integrate a scalar ODE with Dormand-Prince 5(4) and local error control.

    Local errors are held to ``LOCAL_SAFETY`` times the requested tolerances
    so that accumulated global error stays below ``rel_tol`` on the smooth
    monotone problems this is used for. Steps are shortened so that every
    point in ``s_eval`` is hit exactly.

    Raises
    ------
    NumericError
        On step-size underflow, a non-finite right-hand side, or when
        ``max_steps`` is exceeded.
    """
    if not problem.s_end > problem.s0:
        raise DomainError("s_end must exceed s0")
    if not rel_tol > 0:
        raise DomainError("rel_tol must be positive")
    rhs = problem.rhs
    s, y = float(problem.s0), float(problem.y0)
    s_end = float(problem.s_end)
    stops = sorted(p for p in (s_eval or ()) if s < p < s_end)
    stops.append(s_end)

    f = rhs(s, y)
    n_evals = 1
    if h0 is None:
        scale = abs_tol + rel_tol * abs(y)
        h = 0.01 * scale / max(abs(f), 1e-300) if f else 1e-3
        h = min(max(h, 1e-6 * (s_end - s)), 1e-2 * (s_end - s))
    else:
        h = h0
    traj = Trajectory([s], [y], [f], rel_tol, abs_tol, name=problem.name)
    next_stop = 0
    rejected = 0
    while s < s_end:
        if traj.n_steps + rejected > max_steps:
            raise NumericError(f"max_steps exceeded at s={s!r}")
        target = stops[next_stop]
        hit = s + h >= target
        step = target - s if hit else h
        if step <= 1e-14 * abs(s) or step <= 0:
            raise NumericError(f"step size underflow at s={s!r}, h={step!r}")

        k = [f]
        for i in range(1, 7):
            yi = y + step * sum(a * kj for a, kj in zip(_A[i], k))
            k.append(rhs(s + _C[i] * step, yi))
        n_evals += 6
        y_new = y + step * sum(b * kj for b, kj in zip(_B, k))
        err = step * sum(e * kj for e, kj in zip(_E, k))
        if not (math.isfinite(y_new) and math.isfinite(err)):
            raise NumericError(f"non-finite state at s={s!r}")
        scale = LOCAL_SAFETY * (abs_tol + rel_tol * max(abs(y), abs(y_new)))
        ratio = abs(err) / scale
        if ratio <= 1.0:
            s = target if hit else s + step
            y = y_new
            f = k[6]  # FSAL
            traj.s.append(s)
            traj.y.append(y)
            traj.dydt.append(f)
            traj.n_steps += 1
            if hit:
                next_stop += 1
            grow = 5.0 if ratio == 0 else min(5.0, 0.9 * ratio ** -0.2)
            # a step clipped onto an output point says nothing against the
            # previous proposal
            h = max(h, step * grow) if hit else step * grow
        else:
            rejected += 1
            h = step * max(0.2, 0.9 * ratio ** -0.2)
    traj.n_rejected = rejected
    traj.n_evals = n_evals
    return traj
