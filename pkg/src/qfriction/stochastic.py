"""Ensemble Monte Carlo for the Langevin equation and for free-flight
collisions.

Three schemes are available:

``underdamped``
    Stochastic Euler stepping of ``m dv = -b v dt + sqrt(2 b kT) dW``,
    ``dx = v dt`` from rest.
``overdamped``
    ``dx = sqrt(2 kT(t) / b) dW``. With ``temperature_mode="effective"`` the
    bath temperature is ``kT(t) = hbar / 4t`` (a zero-temperature quantum
    bath) and the run starts at the collision time with
    ``<x^2> = hbar / b``.
``collisional``
    Free flights of exponentially distributed length (mean free path
    ``mfp``); every collision redraws an isotropic 3-D Maxwell velocity.

Reproducibility: trajectory ``i`` draws all its random numbers from a
Philox stream keyed by ``(seed, i)``. Trajectories are processed in a fixed
partition of batches whose partial sums are reduced in batch order, so the
output is bit-identical for any number of worker threads.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .constants import HBAR, KB
from .errors import ConfigError, DomainError
from .friction import friction as _friction
from .tables import CurveTable

SCHEMES = ("underdamped", "overdamped", "collisional")
TEMPERATURE_MODES = ("constant", "effective")
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SimSystem:
    """Mechanical parameters of a simulation (reduced units by default).

    ``b`` is needed by the Langevin schemes, ``mfp`` by the collisional one.
    """

    mass: float = 1.0
    b: float | None = 1.0
    kT: float = 1.0
    hbar: float = 1.0
    mfp: float | None = None
    units: str = "reduced"

    def __post_init__(self):
        if not self.mass > 0:
            raise ConfigError("mass must be positive")
        if self.b is not None and not self.b > 0:
            raise ConfigError("b must be positive")
        if not self.kT >= 0:
            raise ConfigError("kT must be non-negative")
        if self.mfp is not None and not self.mfp > 0:
            raise ConfigError("mfp must be positive")

    @classmethod
    def from_gas(cls, system, form="classical", *, hbar=HBAR, kB=KB):
        """SI parameters for a :class:`~qfriction.scales.ParticleGasSystem`."""
        mfp = system.mfp
        b = _friction(form, system.mass, system.temperature, mfp, hbar=hbar, kB=kB).b
        return cls(mass=system.mass, b=b if b > 0 else None,
                   kT=kB * system.temperature, hbar=hbar, mfp=mfp, units="SI")

    @property
    def tau(self):
        """Velocity relaxation time ``m / b``."""
        if self.b is None:
            raise ConfigError("system has no friction coefficient")
        return self.mass / self.b

    @property
    def thermal_speed(self):
        return math.sqrt(self.kT / self.mass)


@dataclass(frozen=True)
class SimConfig:
    """Run parameters.

    ``n_batches`` fixes the partition of trajectories used for reduction and
    for batch-means error bars; ``workers`` only changes wall time.
    ``t_start`` defaults to 0, or to the collision time in effective mode.
    For the collisional scheme ``dt`` is the first point of the output grid.
    """

    dt: float
    t_end: float
    n_traj: int = 20_000
    seed: int = 0
    scheme: str = "underdamped"
    temperature_mode: str = "constant"
    t_start: float | None = None
    n_batches: int = 50
    workers: int = 1
    points_per_decade: int = 32

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.temperature_mode not in TEMPERATURE_MODES:
            raise ConfigError(f"temperature_mode must be one of {TEMPERATURE_MODES}")
        if not self.dt > 0:
            raise ConfigError("dt must be positive")
        if not self.t_end > self.dt:
            raise ConfigError("t_end must exceed dt")
        if self.n_traj < 100:
            raise ConfigError(f"n_traj must be at least 100, got {self.n_traj}")
        if not 1 <= self.n_batches <= self.n_traj:
            raise ConfigError("n_batches must lie in [1, n_traj]")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if not 0 <= self.seed <= _MASK64:
            raise ConfigError("seed must be an unsigned 64-bit integer")

    def validate(self, system):
        if self.scheme == "underdamped":
            if system.b is None:
                raise ConfigError("underdamped scheme needs a friction coefficient b")
            if self.dt > system.tau / 20:
                raise ConfigError(
                    f"dt={self.dt:.6g} must be <= tau/20 = {system.tau / 20:.6g}")
            if self.temperature_mode != "constant":
                raise ConfigError("underdamped scheme supports constant temperature only")
        elif self.scheme == "overdamped":
            if system.b is None:
                raise ConfigError("overdamped scheme needs a friction coefficient b")
            if self.temperature_mode == "effective" and self.start_time(system) < system.tau:
                raise DomainError(
                    "the quantum-bath law holds for t >= tau; "
                    f"t_start={self.t_start!r} < tau={system.tau!r}")
        else:
            if system.mfp is None:
                raise ConfigError("collisional scheme needs a mean free path mfp")
            if not system.kT > 0:
                raise ConfigError("collisional scheme needs kT > 0")
        if self.t_end <= self.start_time(system) + self.dt:
            raise ConfigError("t_end must exceed t_start + dt")

    def start_time(self, system):
        if self.t_start is not None:
            return self.t_start
        if self.scheme == "overdamped" and self.temperature_mode == "effective":
            return system.tau
        return 0.0


@dataclass
class EnsembleStats:
    """Ensemble moments on the logarithmic output grid.

    ``sigma_x2`` is ``<x^2>`` and ``sigma_v2`` is ``<v^2>`` (``None`` for the
    overdamped scheme); every ``*_se`` is the standard error of the
    corresponding mean. ``batch_sigma_x2`` holds ``<x^2>`` per batch and
    feeds the batch-means uncertainty of fitted coefficients.
    """

    t: np.ndarray
    sigma_x2: np.ndarray
    sigma_x2_se: np.ndarray
    mean_x: np.ndarray
    mean_x_se: np.ndarray
    sigma_v2: np.ndarray | None
    sigma_v2_se: np.ndarray | None
    mean_v: np.ndarray | None
    mean_v_se: np.ndarray | None
    noise_position: np.ndarray | None
    noise_position_se: np.ndarray | None
    batch_sigma_x2: np.ndarray
    batch_sizes: np.ndarray
    n_traj: int
    config: SimConfig
    system: SimSystem
    fits: dict = field(default_factory=dict)

    def to_table(self, metadata=None):
        length2, time = ("m^2", "s") if self.system.units == "SI" else ("1", "1")
        speed2 = "m^2/s^2" if self.system.units == "SI" else "1"
        columns = [("t", time, self.t), ("sigma_x2", length2, self.sigma_x2),
                   ("sigma_x2_se", length2, self.sigma_x2_se),
                   ("mean_x", length2.replace("^2", ""), self.mean_x),
                   ("mean_x_se", length2.replace("^2", ""), self.mean_x_se)]
        if self.sigma_v2 is not None:
            columns += [("sigma_v2", speed2, self.sigma_v2),
                        ("sigma_v2_se", speed2, self.sigma_v2_se)]
        config = asdict(self.config)
        del config["workers"]  # must not change the output bytes
        meta = {"n_traj": self.n_traj, "config": config,
                "system": asdict(self.system), "grid": "log"}
        meta.update(metadata or {})
        return CurveTable.from_columns(columns, meta)


# --------------------------------------------------------------------------
# Random streams and grids


def trajectory_rng(seed, index):
    """Counter-based stream for one trajectory, keyed by ``(seed, index)``."""
    return np.random.Generator(np.random.Philox(key=[seed & _MASK64, index]))


def log_grid_steps(dt, n_steps, points_per_decade=32):
    """Step indices ``k >= 1`` closest to a logarithmic grid on ``[dt, n_steps dt]``."""
    decades = math.log10(n_steps)
    n = max(2, int(math.ceil(decades * points_per_decade)) + 1)
    k = np.rint(np.logspace(0.0, decades, n)).astype(np.int64)
    return np.unique(np.clip(k, 1, n_steps))


def _batches(n_traj, n_batches):
    edges = np.linspace(0, n_traj, n_batches + 1).round().astype(np.int64)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


# --------------------------------------------------------------------------
# Batch kernels. Each returns raw sums over its trajectories, shape
# (n_moments, n_grid), in the order given by _MOMENTS.

_MOMENTS = ("x", "x2", "x4", "v", "v2", "v4", "xf", "xf2")


def _underdamped_batch(system, config, lo, hi, grid):
    n_steps = int(grid[-1])
    n = hi - lo
    noise = np.empty((n, n_steps))
    for j, i in enumerate(range(lo, hi)):
        noise[j] = trajectory_rng(config.seed, i).standard_normal(n_steps)
    dt = config.dt
    decay = system.b / system.mass * dt
    kick = math.sqrt(2.0 * system.b * system.kT / system.mass**2 * dt)
    x = np.zeros(n)
    v = np.zeros(n)
    out = np.zeros((len(_MOMENTS), len(grid)))
    record = dict(zip(grid.tolist(), range(len(grid))))
    for k in range(n_steps):
        xi = noise[:, k]
        g = record.get(k + 1)
        if g is not None:
            xf = x * xi
            out[6, g] = xf.sum()
            out[7, g] = (xf * xf).sum()
        v = v - decay * v + kick * xi
        x = x + v * dt
        if g is not None:
            _moments_into(out, g, x, v)
    return out


def _overdamped_batch(system, config, lo, hi, grid):
    n_steps = int(grid[-1])
    n = hi - lo
    t0 = config.start_time(system)
    effective = config.temperature_mode == "effective"
    x0 = np.zeros(n)
    noise = np.empty((n, n_steps))
    for j, i in enumerate(range(lo, hi)):
        rng = trajectory_rng(config.seed, i)
        if effective:
            x0[j] = rng.standard_normal() * math.sqrt(system.hbar / system.b)
        noise[j] = rng.standard_normal(n_steps)
    t_left = t0 + config.dt * np.arange(n_steps)
    kT = system.hbar / (4.0 * t_left) if effective else np.full(n_steps, system.kT)
    amplitude = np.sqrt(2.0 * kT / system.b * config.dt)
    path = np.cumsum(noise * amplitude, axis=1)
    out = np.zeros((len(_MOMENTS), len(grid)))
    for g, k in enumerate(grid.tolist()):
        x_before = x0 + (path[:, k - 2] if k >= 2 else 0.0)
        xf = x_before * noise[:, k - 1]
        out[6, g] = xf.sum()
        out[7, g] = (xf * xf).sum()
        _moments_into(out, g, x0 + path[:, k - 1], None)
    return out


def _collisional_batch(system, config, lo, hi, times):
    c = system.thermal_speed
    mean_flight = system.mfp * math.sqrt(2.0 / math.pi) / c
    chunk = int(1.2 * config.t_end / mean_flight) + 16
    out = np.zeros((len(_MOMENTS), len(times)))
    xs = np.empty((hi - lo, len(times)))
    vs = np.empty((hi - lo, len(times)))
    for j, i in enumerate(range(lo, hi)):
        rng = trajectory_rng(config.seed, i)
        durations, vx = [], []
        elapsed = 0.0
        while elapsed <= config.t_end:
            length = rng.exponential(system.mfp, chunk)
            vel = rng.standard_normal((chunk, 3)) * c
            d = length / np.sqrt(np.einsum("ij,ij->i", vel, vel))
            durations.append(d)
            vx.append(vel[:, 0])
            elapsed += d.sum()
        d = np.concatenate(durations)
        vx = np.concatenate(vx)
        ends = np.cumsum(d)
        starts = ends - d
        x_start = np.concatenate(([0.0], np.cumsum(vx * d)[:-1]))
        f = np.searchsorted(ends, times, side="right")
        xs[j] = x_start[f] + vx[f] * (times - starts[f])
        vs[j] = vx[f]
    for g in range(len(times)):
        _moments_into(out, g, xs[:, g], vs[:, g])
    return out


def _moments_into(out, g, x, v):
    x2 = x * x
    out[0, g] = x.sum()
    out[1, g] = x2.sum()
    out[2, g] = (x2 * x2).sum()
    if v is not None:
        v2 = v * v
        out[3, g] = v.sum()
        out[4, g] = v2.sum()
        out[5, g] = (v2 * v2).sum()


# --------------------------------------------------------------------------
# Drivers


def _run(system, config):
    config.validate(system)
    t0 = config.start_time(system)
    with_start = False
    if config.scheme == "collisional":
        n = max(2, int(math.ceil(math.log10(config.t_end / config.dt)
                                 * config.points_per_decade)) + 1)
        grid = np.logspace(math.log10(config.dt), math.log10(config.t_end), n)
        times = grid
        kernel = _collisional_batch
    else:
        n_steps = int(round((config.t_end - t0) / config.dt))
        grid = log_grid_steps(config.dt, n_steps, config.points_per_decade)
        times = t0 + grid * config.dt
        kernel = _underdamped_batch if config.scheme == "underdamped" else _overdamped_batch
        if config.temperature_mode == "effective":
            with_start = True
            times = np.concatenate(([t0], times))

    def work(bounds):
        sums = kernel(system, config, bounds[0], bounds[1], grid)
        if with_start:
            sums = np.concatenate((_initial_sums(system, config, *bounds), sums), axis=1)
        return sums

    batches = _batches(config.n_traj, config.n_batches)
    if config.workers > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            partials = list(pool.map(work, batches))
    else:
        partials = [work(b) for b in batches]
    return _reduce(partials, batches, times, system, config)


def _initial_sums(system, config, lo, hi):
    # the effective-mode start value, drawn first from each stream
    x0 = np.array([trajectory_rng(config.seed, i).standard_normal()
                   for i in range(lo, hi)]) * math.sqrt(system.hbar / system.b)
    out = np.zeros((len(_MOMENTS), 1))
    _moments_into(out, 0, x0, None)
    out[6:, 0] = np.nan
    return out


def _reduce(partials, batches, times, system, config):
    total = np.zeros_like(partials[0])
    for p in partials:
        total = total + p
    N = config.n_traj
    sizes = np.array([b - a for a, b in batches])

    def mean_se(first, second):
        mean = total[first] / N
        var = np.maximum(total[second] / N - mean**2, 0.0)
        return mean, np.sqrt(var / N)

    mean_x, mean_x_se = mean_se(0, 1)
    sigma_x2, sigma_x2_se = mean_se(1, 2)
    has_v = config.scheme != "overdamped"
    if has_v:
        mean_v, mean_v_se = mean_se(3, 4)
        sigma_v2, sigma_v2_se = mean_se(4, 5)
    else:
        mean_v = mean_v_se = sigma_v2 = sigma_v2_se = None
    if config.scheme == "collisional":
        noise, noise_se = None, None
    else:
        noise, noise_se = mean_se(6, 7)
    batch_sigma_x2 = np.array([p[1] / n for p, n in zip(partials, sizes)])
    return EnsembleStats(times, sigma_x2, sigma_x2_se, mean_x, mean_x_se,
                         sigma_v2, sigma_v2_se, mean_v, mean_v_se, noise, noise_se,
                         batch_sigma_x2, sizes, N, config, system)


def simulate_langevin(config, system):
    """Underdamped Langevin ensemble at constant temperature."""
    if config.scheme != "underdamped":
        raise ConfigError("simulate_langevin needs scheme='underdamped'")
    return _run(system, config)


def simulate_overdamped(config, system):
    if config.scheme != "overdamped":
        raise ConfigError("simulate_overdamped needs scheme='overdamped'")
    return _run(system, config)


def simulate_quantum_bath(config, system):
    """Overdamped particle in a zero-temperature quantum bath.

    The fitted coefficient of ``log t`` is stored under ``stats.fits`` and
    should approach ``hbar / 2b``.
    """
    if config.scheme != "overdamped" or config.temperature_mode != "effective":
        raise ConfigError(
            "simulate_quantum_bath needs scheme='overdamped', temperature_mode='effective'")
    stats = _run(system, config)
    t0 = config.start_time(system)
    stats.fits["log_coefficient"] = fit_log_coefficient(stats, t0, config.t_end)
    return stats


def simulate_collisional(config, system):
    """Free-flight/collision ensemble; stores the late-time diffusion constant."""
    if config.scheme != "collisional":
        raise ConfigError("simulate_collisional needs scheme='collisional'")
    stats = _run(system, config)
    stats.fits["diffusion"] = empirical_diffusion(stats)
    return stats


def simulate(config, system):
    """Dispatch on ``config.scheme`` and attach the standard fits."""
    if config.scheme == "collisional":
        return simulate_collisional(config, system)
    if config.temperature_mode == "effective":
        return simulate_quantum_bath(config, system)
    stats = _run(system, config)
    tau = system.tau
    if config.t_end >= 20 * tau:
        stats.fits["diffusion"] = empirical_diffusion(stats, t_min=10 * tau)
    return stats


# --------------------------------------------------------------------------
# Estimators


@dataclass(frozen=True)
class FitResult:
    """A fitted coefficient with a batch-means standard error and 95% CI."""

    value: float
    se: float
    ci_low: float
    ci_high: float
    n_points: int

    def as_dict(self):
        return asdict(self)


def _slope(x, y):
    xc = x - x.mean()
    return float(xc @ (y - y.mean()) / (xc @ xc))


def fit_slope(stats, t_min, t_max, *, abscissa="t", scale=1.0):
    """Least-squares slope of ``<x^2>`` against ``t`` (or ``log t``) on the
    grid points in ``[t_min, t_max]``, multiplied by ``scale``."""
    mask = (stats.t >= t_min * (1 - 1e-12)) & (stats.t <= t_max * (1 + 1e-12))
    if mask.sum() < 3:
        raise DomainError(f"fewer than 3 grid points in [{t_min!r}, {t_max!r}]")
    x = stats.t[mask] if abscissa == "t" else np.log(stats.t[mask])
    value = scale * _slope(x, stats.sigma_x2[mask])
    per_batch = np.array([scale * _slope(x, row[mask]) for row in stats.batch_sigma_x2])
    w = stats.batch_sizes / stats.batch_sizes.sum()
    if len(per_batch) > 1:
        var = np.sum(w * (per_batch - np.sum(w * per_batch)) ** 2) / (1 - np.sum(w * w))
        se = float(math.sqrt(var * np.sum(w * w)))
    else:
        se = math.nan
    return FitResult(value, se, value - 1.96 * se, value + 1.96 * se, int(mask.sum()))


def empirical_diffusion(stats, t_min=None, t_max=None):
    """Half the late-time slope of ``<x^2>``; defaults to the last decade."""
    t_max = stats.t[-1] if t_max is None else t_max
    t_min = t_max / 10 if t_min is None else t_min
    return fit_slope(stats, t_min, t_max, scale=0.5)


def fit_log_coefficient(stats, t_min, t_max):
    """Coefficient of ``log t`` in ``<x^2>``."""
    return fit_slope(stats, t_min, t_max, abscissa="log")


@dataclass(frozen=True)
class VirialReport:
    t: np.ndarray
    friction_side: np.ndarray
    kinetic_side: np.ndarray
    rel_discrepancy: np.ndarray

    @property
    def max_discrepancy(self):
        return float(np.max(np.abs(self.rel_discrepancy)))

    @property
    def rms_discrepancy(self):
        return float(np.sqrt(np.mean(self.rel_discrepancy**2)))


def virial_check(stats, system, *, t_min=None, span=1.5):
    """Compare ``b d<x^2>/dt`` with ``2 m <v^2>`` after inertial transients.

    The derivative is a central difference between grid points a factor of
    about ``sqrt(span)`` below and above each time; ``t_min`` defaults to
    ten relaxation times.
    """
    if stats.sigma_v2 is None:
        raise DomainError("virial check needs velocity moments (underdamped run)")
    tau = system.tau
    if stats.t[-1] < 20 * tau:
        raise DomainError(f"virial check needs t_end >= 20 tau, got {stats.t[-1]!r}")
    t_min = 10 * tau if t_min is None else t_min
    t = stats.t
    half = math.sqrt(span)
    rows = []
    for i in np.nonzero(t > t_min)[0]:
        lo = np.searchsorted(t, t[i] / half)
        hi = np.searchsorted(t, t[i] * half)
        if hi >= len(t) or lo >= i or hi <= i:
            continue
        deriv = (stats.sigma_x2[hi] - stats.sigma_x2[lo]) / (t[hi] - t[lo])
        rows.append((t[i], system.b * deriv, 2 * system.mass * stats.sigma_v2[i]))
    if len(rows) < 3:
        raise DomainError("insufficient late-time samples for the virial check")
    tt, lhs, rhs = map(np.array, zip(*rows))
    return VirialReport(tt, lhs, rhs, (lhs - rhs) / rhs)
