"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 numeric failure, 4 I/O failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict

from . import __version__, presets
from . import dispersion as disp
from . import friction as fr
from . import scales
from .constants import HBAR, KB
from .errors import DomainError, NumericError
from .figures import fig1, fig2, log_grid
from .stochastic import SimConfig, SimSystem, simulate, virial_check
from .tables import CurveTable, dumps
from .units import parse_quantity, split_quantity

EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 2, 3, 4


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# Parameters shared by compute and sweep

PARAMS = {
    # flag: (key, dimension, help)
    "m": ("m", "mass", "particle mass"),
    "M": ("M", "mass", "gas particle mass"),
    "sigma": ("sigma", "area", "collision cross-section"),
    "n": ("n", "density", "gas number density"),
    "T": ("T", "temperature", "temperature"),
    "lambda": ("lambda", "length", "mean free path (overrides sigma*n)"),
    "t": ("t", "time", "time"),
}

_FORM_ALIASES = {"A": "thermal_a", "B": "thermal_b", "a": "thermal_a", "b": "thermal_b"}


def _need(p, *keys, quantity):
    missing = [k for k in keys if p.get(k) is None]
    if missing:
        raise UsageError(f"{quantity} needs {', '.join('--' + k for k in missing)}")


def _mfp(p, quantity):
    if p.get("lambda") is not None:
        return p["lambda"]
    _need(p, "sigma", "n", quantity=quantity + " (or --lambda)")
    return scales.mean_free_path(p["sigma"], p["n"])


def _form(p):
    form = p.get("form") or ("residual" if not p.get("T") else "thermal_a")
    form = _FORM_ALIASES.get(form, form)
    if form not in fr.FORMS:
        raise UsageError(f"--form must be one of {', '.join(fr.FORMS)} (or A/B)")
    return form


_FORM_FORMULA = {
    "classical": "b = sqrt(m kB T)/lambda",
    "residual": "b = hbar/lambda^2",
    "thermal_a": "b = sqrt(m kB T/[lambda^2 - lT^2 ln(1 + lambda^2/lT^2)])",
    "thermal_b": "b = (hbar/lambda^2) sqrt(theta)/sqrt(1 - ln(1+theta)/theta)",
}


def _friction(p, q):
    _need(p, "m", quantity=q)
    form = _form(p)
    T = p.get("T") or 0.0
    if form != "residual":
        _need(p, "T", quantity=q)
    return fr.friction(form, p["m"], T, _mfp(p, q)), form


def _q_lambda(p):
    return _mfp(p, "lambda"), "m", "lambda = 1/(sigma n)"


def _q_lambda_T(p):
    _need(p, "m", "T", quantity="lambda_T")
    return scales.thermal_de_broglie(p["m"], p["T"]), "m", "lT = hbar/(2 sqrt(m kB T))"


def _q_T_lambda(p):
    _need(p, "m", quantity="T_lambda")
    return (scales.characteristic_temperature(p["m"], _mfp(p, "T_lambda")), "K",
            "T_lambda = hbar^2/(4 m lambda^2 kB)")


def _q_tau(p):
    _need(p, "m", quantity="tau")
    return (scales.collision_time_residual(p["m"], _mfp(p, "tau")), "s",
            "tau = m lambda^2/hbar")


def _q_b(p):
    res, form = _friction(p, "b")
    return res.b, "kg/s", f"{_FORM_FORMULA[form]} [{form}]"


def _q_b_dimensionless(p):
    res, form = _friction(p, "b_dimensionless")
    return res.b_dimensionless, "1", f"b lambda^2/hbar [{form}]"


def _q_mobility(p):
    res, form = _friction(p, "mobility")
    return res.mobility, "s/kg", f"1/b [{form}]"


def _q_D(p):
    res, form = _friction(p, "D")
    return fr.einstein_diffusion(p.get("T") or 0.0, res.b), "m^2/s", f"D = kB T/b [{form}]"


def _q_D_classical(p):
    _need(p, "m", "T", quantity="D_classical")
    return (fr.classical_diffusion(p["m"], p["T"], _mfp(p, "D_classical")), "m^2/s",
            "D = lambda sqrt(kB T/m)")


def _q_theta(p):
    _need(p, "m", "T", quantity="theta")
    return (p["T"] / scales.characteristic_temperature(p["m"], _mfp(p, "theta")), "1",
            "theta = T/T_lambda")


def _q_T_eff(p):
    _need(p, "t", quantity="T_eff")
    return disp.effective_temperature(p["t"]), "K", "T(t) = hbar/(4 kB t)"


def _q_D_t(p):
    _need(p, "m", "t", quantity="D_t")
    D, _ = disp.time_dependent_diffusion(p["m"], _mfp(p, "D_t"), p["t"])
    return D, "m^2/s", "D(t) = lambda sqrt(hbar/(4 m t))"


_LAW_FORMULA = {
    "einstein": "sigma_x^2 = 2 D t",
    "quantum_classical": "sigma_x^2 = hbar sqrt(t/(m b))",
    "gas": "sigma_x^2 = lambda sqrt(hbar t/m)",
    "thermal": "sigma_x^2 - lT^2 ln(1 + sigma_x^2/lT^2) = 2 D t",
    "quantum_gas": "sigma_x^4/lambda^2 - 2 sigma_x^2 + 2 lambda^2 ln(1 + sigma_x^2/lambda^2) = hbar t/m",
    "cube_root": "sigma_x^2 = lambda (3 lambda hbar t/(2m))^(1/3)",
    "log_law": "sigma_x^2 = (hbar/b)[ln sqrt(b t/m) + 1]",
    "combined_gas": "sigma_x^2 = lambda sqrt(hbar t/m) + lambda^2 [ln(sqrt(hbar t/m)/lambda) + 1]/3",
    "fractional": "sigma_x^2 = (hbar/b)(b t/m)^(2 alpha)",
}


def _q_sigma_x2(p):
    law = p.get("law") or "gas"
    if law not in _LAW_FORMULA:
        raise UsageError(f"--law must be one of {', '.join(_LAW_FORMULA)}")
    _need(p, "m", "t", quantity=f"sigma_x2 --law {law}")
    m, t = p["m"], p["t"]
    lam = _mfp(p, "sigma_x2")
    if law in ("gas", "quantum_gas", "cube_root", "combined_gas"):
        fn = {"gas": disp.gas_subdiffusion, "quantum_gas": disp.solve_quantum_gas_dispersion,
              "cube_root": disp.cube_root_law, "combined_gas": disp.combined_gas_law}[law]
        value = fn(m, lam, t)
    elif law == "thermal":
        _need(p, "T", quantity="sigma_x2 --law thermal")
        form = _form({**p, "form": p.get("form") or "thermal_a"})
        value = disp.thermal_dispersion(m, p["T"], lam, t, form=form)
    else:
        b = _friction(p, "sigma_x2")[0].b
        if law == "einstein":
            value = disp.einstein_law(fr.einstein_diffusion(p.get("T") or 0.0, b), t)
        elif law == "quantum_classical":
            value = disp.quantum_subdiffusion(m, b, t)
        elif law == "log_law":
            value = disp.log_law(m, b, t)
        else:
            _need(p, "alpha", quantity="sigma_x2 --law fractional")
            value = disp.fractional_law(p["alpha"], m, b, t)
    return value, "m^2", _LAW_FORMULA[law]


QUANTITIES = {
    "lambda": _q_lambda,
    "lambda_T": _q_lambda_T,
    "T_lambda": _q_T_lambda,
    "tau": _q_tau,
    "b": _q_b,
    "b_dimensionless": _q_b_dimensionless,
    "mobility": _q_mobility,
    "D": _q_D,
    "D_classical": _q_D_classical,
    "theta": _q_theta,
    "T_eff": _q_T_eff,
    "D_t": _q_D_t,
    "sigma_x2": _q_sigma_x2,
}


def compute(quantity, params):
    """Evaluate ``quantity``; returns ``(value, unit, formula)``."""
    if quantity not in QUANTITIES:
        raise UsageError(f"unknown quantity {quantity!r}; choose from {', '.join(QUANTITIES)}")
    return QUANTITIES[quantity](params)


def _params_from_args(args):
    p = {}
    if args.preset:
        raw = presets.load_raw(args.preset)
        p.update({"m": raw.get("mass"), "M": raw.get("gas_mass"),
                  "sigma": raw.get("cross_section"), "n": raw.get("density"),
                  "T": raw.get("temperature"), "lambda": raw.get("mean_free_path")})
    for flag, (key, dim, _) in PARAMS.items():
        text = getattr(args, "p_" + flag, None)
        if text is not None:
            p[key] = parse_quantity(text, dim)
            if key in ("sigma", "n") and getattr(args, "p_lambda", None) is None:
                p["lambda"] = None
    p["form"] = getattr(args, "form", None)
    p["law"] = getattr(args, "law", None)
    p["alpha"] = getattr(args, "alpha", None)
    return p


# --------------------------------------------------------------------------
# Output helpers


def run_spec(args, command):
    """Reproducible description of the run embedded in every output file.

    The output path and worker count are left out so that identical runs
    produce identical bytes.
    """
    skip = {"output", "figure", "workers", "func"}
    params = {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}
    return {"command": command, "parameters": params, "version": __version__}


def _emit(table, args, *, svg_options=None):
    fmt = args.format or (args.output.rsplit(".", 1)[-1].lower() if args.output else "csv")
    if fmt not in ("csv", "json", "svg"):
        raise UsageError(f"--format must be csv, json or svg, got {fmt!r}")
    text = dumps(table, fmt, **(svg_options or {}))
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if getattr(args, "figure", None):
        from .plotting import plot_table
        plot_table(table, args.figure, title=(svg_options or {}).get("title"))


# --------------------------------------------------------------------------
# Commands


def cmd_fig1(args):
    points = args.points or 61
    table = fig1(args.theta_min, args.theta_max, points)
    table.metadata["run"] = run_spec(args, "fig1")
    _emit(table, args, svg_options={"title": "b lambda^2/hbar vs T/T_lambda"})


def cmd_fig2(args):
    table = fig2(args.s_max, args.points or 81, args.rel_tol)
    table.metadata["run"] = run_spec(args, "fig2")
    _emit(table, args, svg_options={"title": "sigma_x^2 b/hbar vs t/tau"})


def cmd_compute(args):
    p = _params_from_args(args)
    value, unit, formula = compute(args.quantity, p)
    if not (args.format and not args.output):
        print(f"{args.quantity} = {value:.10g} {unit}    [{formula}]")
    if args.output or args.format:
        if not math.isfinite(value):
            raise NumericError(f"{args.quantity} is not finite ({value}); nothing to write")
        table = CurveTable([args.quantity], [unit], [[value]],
                           {"formula": formula, "run": run_spec(args, "compute")})
        _emit(table, args)


def cmd_sweep(args):
    p = _params_from_args(args)
    if args.vary not in PARAMS:
        raise UsageError(f"--vary must be one of {', '.join(PARAMS)}")
    key, dim, _ = PARAMS[args.vary]
    start, stop = parse_quantity(args.start, dim), parse_quantity(args.stop, dim)
    points = args.points or 50
    if args.linear:
        grid = [start + (stop - start) * i / (points - 1) for i in range(points)]
    else:
        if not 0 < start < stop:
            raise UsageError("a logarithmic sweep needs 0 < --start < --stop")
        grid = log_grid(start, stop, points).tolist()
    values, unit, formula = [], "", ""
    for x in grid:
        value, unit, formula = compute(args.quantity, {**p, key: x})
        values.append(value)
    dim_units = {"mass": "kg", "area": "m^2", "density": "m^-3", "temperature": "K",
                 "length": "m", "time": "s"}
    table = CurveTable.from_columns(
        [(key, dim_units[dim], grid), (args.quantity, unit, values)],
        {"formula": formula, "grid": "linear" if args.linear else "log",
         "run": run_spec(args, "sweep")})
    _emit(table, args)


_SIM_SCHEMES = {
    "langevin": ("underdamped", "constant", 0.01, 50.0),
    "quantum-bath": ("overdamped", "effective", 0.01, 100.0),
    "collisional": ("collisional", "constant", 0.01, 200.0),
}


def _sim_system(args):
    scheme = args.scheme
    if args.preset:
        gas = presets.load(args.preset)
        if args.p_T is not None:
            gas = gas.with_temperature(parse_quantity(args.p_T, "temperature"))
        if args.p_lambda is not None:
            gas = scales.ParticleGasSystem.from_mean_free_path(
                gas.mass, gas.gas_mass, parse_quantity(args.p_lambda, "length"),
                gas.temperature, gas.cross_section)
        form = _FORM_ALIASES.get(args.form, args.form) or (
            "classical" if gas.temperature > 0 else "residual")
        system = SimSystem.from_gas(gas, form)
        if scheme != "collisional" and system.b is None:
            raise UsageError("the chosen friction form vanishes; pick another --form or --T")
        return system
    lam = float(args.p_lambda) if args.p_lambda is not None else 1.0
    T = float(args.p_T) if args.p_T is not None else None
    kT = args.kT if T is None else T
    return SimSystem(mass=args.mass, b=args.b, kT=kT, hbar=args.hbar, mfp=lam)


def _time_arg(text, unit_time):
    value, suffix = split_quantity(text)
    if suffix:
        return parse_quantity(text, "time")
    return value * unit_time


def cmd_simulate(args):
    scheme, mode, dt_default, t_end_default = _SIM_SCHEMES[args.scheme]
    system = _sim_system(args)
    unit_time = (system.mfp / system.thermal_speed if scheme == "collisional"
                 else system.tau)
    config = SimConfig(
        dt=_time_arg(args.dt or str(dt_default), unit_time),
        t_end=_time_arg(args.t_end or str(t_end_default), unit_time),
        n_traj=args.n_traj, seed=args.seed if args.seed is not None else 0,
        scheme=scheme, temperature_mode=mode, n_batches=args.n_batches,
        workers=args.workers)
    stats = simulate(config, system)
    report = simulation_report(stats)
    run = run_spec(args, "simulate")
    table = stats.to_table({"run": run})
    report_text = json.dumps({"run": run, **report}, indent=1, sort_keys=True) + "\n"
    if args.output:
        _emit(table, args, svg_options={"columns": ["sigma_x2"], "title": args.scheme})
        with open(args.output + ".report.json", "w", encoding="utf-8") as fh:
            fh.write(report_text)
    sys.stdout.write(report_text)


def simulation_report(stats):
    """Fitted coefficients, their confidence intervals and analytic targets."""
    system, config = stats.system, stats.config
    fits = {name: fit.as_dict() for name, fit in stats.fits.items()}
    report = {"scheme": config.scheme, "temperature_mode": config.temperature_mode,
              "n_traj": stats.n_traj, "fits": fits, "targets": {}}
    targets = report["targets"]
    if config.scheme == "collisional":
        c = system.thermal_speed
        tc = system.mfp / c
        targets["diffusion_gas_kinetic"] = system.mfp * c
        targets["collision_time"] = tc
        targets["sigma_x2_at_collision_time_target"] = system.mfp**2
        report["sigma_x2_at_collision_time"] = float(_interp_log(stats, tc))
    elif config.temperature_mode == "effective":
        targets["log_coefficient"] = system.hbar / (2 * system.b)
    else:
        targets["diffusion"] = system.kT / system.b
        targets["sigma_v2"] = system.kT / system.mass if stats.sigma_v2 is not None else None
        if stats.sigma_v2 is not None:
            late = stats.t >= stats.t[-1] / 2
            report["sigma_v2_late"] = float(stats.sigma_v2[late].mean())
            if stats.t[-1] >= 20 * system.tau and system.kT > 0:
                report["virial_max_discrepancy"] = virial_check(stats, system).max_discrepancy
    return report


def _interp_log(stats, t):
    import numpy as np
    return np.interp(math.log(t), np.log(stats.t), stats.sigma_x2)


def cmd_preset_list(args):
    for name in presets.available():
        raw = presets.load_raw(name)
        system = presets.load(name)
        sc = scales.derive_scales(system)
        print(f"{name}: m={raw['mass']:.6g} kg, lambda={sc.mfp:.6g} m, "
              f"T={system.temperature:.6g} K, T_lambda={sc.T_lambda:.6g} K, "
              f"tau={sc.tau_residual:.6g} s")
        if raw.get("description"):
            print("    " + raw["description"])


# --------------------------------------------------------------------------
# Parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument("--preset", help="preset name or path to a preset JSON file")
    common.add_argument("--output", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json", "svg"))
    common.add_argument("--figure", help="also render a matplotlib figure to this path")

    parser = argparse.ArgumentParser(prog="qfriction", allow_abbrev=False,
                                     description="Quantum friction of a light particle in a heavy gas.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fig1", parents=[common], allow_abbrev=False,
                       help="dimensionless friction vs reduced temperature")
    p.add_argument("--theta-min", type=float, default=1e-3)
    p.add_argument("--theta-max", type=float, default=1e3)
    p.add_argument("--points", type=int)
    p.set_defaults(func=cmd_fig1)

    p = sub.add_parser("fig2", parents=[common], allow_abbrev=False,
                       help="dimensionless dispersion vs reduced time")
    p.add_argument("--s-max", type=float, default=1e4)
    p.add_argument("--points", type=int)
    p.add_argument("--rel-tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_fig2)

    def add_params(p):
        for flag, (_, dim, text) in PARAMS.items():
            p.add_argument("--" + flag, dest="p_" + flag, metavar="VALUE",
                           help=f"{text} ({dim}; unit suffix allowed)")
        p.add_argument("--form", help="friction form: " + ", ".join(fr.FORMS) + " (or A/B)")
        p.add_argument("--law", help="dispersion law for sigma_x2: " + ", ".join(_LAW_FORMULA))
        p.add_argument("--alpha", type=float, help="exponent of the fractional law")

    p = sub.add_parser("compute", parents=[common], allow_abbrev=False,
                       help="evaluate one quantity")
    p.add_argument("quantity", help=", ".join(QUANTITIES))
    add_params(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("sweep", parents=[common], allow_abbrev=False,
                       help="evaluate a quantity over a parameter range")
    p.add_argument("quantity", help=", ".join(QUANTITIES))
    add_params(p)
    p.add_argument("--vary", required=True, help="parameter to sweep: " + ", ".join(PARAMS))
    p.add_argument("--start", required=True)
    p.add_argument("--stop", required=True)
    p.add_argument("--points", type=int)
    p.add_argument("--linear", action="store_true", help="linear instead of log grid")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", parents=[common], allow_abbrev=False,
                       help="run an ensemble Monte Carlo simulation")
    p.add_argument("scheme", choices=tuple(_SIM_SCHEMES))
    p.add_argument("--seed", type=int)
    p.add_argument("--n-traj", type=int, default=20_000)
    p.add_argument("--n-batches", type=int, default=50)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--dt", help="time step; bare numbers are multiples of the "
                                "relaxation (collision) time, or give seconds e.g. 1e-15s")
    p.add_argument("--t-end", help="end time, same convention as --dt")
    p.add_argument("--mass", type=float, default=1.0, help="reduced-unit mass")
    p.add_argument("--b", type=float, default=1.0, help="reduced-unit friction")
    p.add_argument("--kT", type=float, default=1.0, help="reduced-unit thermal energy")
    p.add_argument("--hbar", type=float, default=1.0, help="reduced-unit Planck constant")
    p.add_argument("--T", dest="p_T", help="temperature (with --preset; unit suffix allowed)")
    p.add_argument("--lambda", dest="p_lambda", help="mean free path")
    p.add_argument("--form", help="friction form used with --preset")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("preset-list", allow_abbrev=False, help="list shipped presets")
    p.set_defaults(func=cmd_preset_list)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"qfriction: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"qfriction: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"qfriction: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
