"""Preset systems shipped as JSON data files."""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from ..errors import DomainError
from ..scales import ParticleGasSystem
from ..units import parse_quantity


def available():
    return sorted(p.name[:-5] for p in resources.files(__name__).iterdir()
                  if p.name.endswith(".json"))


def _resolve(name):
    path = Path(name)
    if path.suffix == ".json" and path.exists():
        return path.read_text(encoding="utf-8")
    names = available()
    matches = [n for n in names if n == name] or [n for n in names if n.startswith(name)]
    if len(matches) != 1:
        raise DomainError(f"unknown preset {name!r}; available: {', '.join(names)}")
    return resources.files(__name__).joinpath(matches[0] + ".json").read_text(encoding="utf-8")


def load_raw(name):
    """Preset fields converted to SI floats (plus ``name``/``description``)."""
    doc = json.loads(_resolve(name))
    dims = {"mass": "mass", "gas_mass": "mass", "cross_section": "area",
            "density": "density", "mean_free_path": "length", "temperature": "temperature"}
    out = {k: doc[k] for k in ("name", "description") if k in doc}
    for key, dim in dims.items():
        if key in doc:
            out[key] = parse_quantity(doc[key], dim)
    return out


def load(name):
    """Return the preset as a :class:`ParticleGasSystem`."""
    raw = load_raw(name)
    if "density" in raw:
        return ParticleGasSystem(raw["mass"], raw["gas_mass"], raw["cross_section"],
                                 raw["density"], raw.get("temperature", 0.0))
    return ParticleGasSystem.from_mean_free_path(
        raw["mass"], raw["gas_mass"], raw["mean_free_path"],
        raw.get("temperature", 0.0), raw.get("cross_section", 1e-19))
