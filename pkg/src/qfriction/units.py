"""Parsing of command-line quantities with unit suffixes ("3e-10m", "1.33K")."""
from __future__ import annotations

import re

from .constants import AMU
from .errors import DomainError

_PREFIX = {"": 1.0, "k": 1e3, "c": 1e-2, "m": 1e-3, "u": 1e-6, "µ": 1e-6,
           "n": 1e-9, "p": 1e-12, "f": 1e-15}

_LENGTH = {p + "m": f for p, f in _PREFIX.items() if p != "k"}
_LENGTH["A"] = 1e-10

UNITS = {
    "mass": {"kg": 1.0, "g": 1e-3, "u": AMU, "amu": AMU},
    "length": _LENGTH,
    "area": {**{k + "^2": v**2 for k, v in _LENGTH.items()},
             **{k + "2": v**2 for k, v in _LENGTH.items()}},
    "density": {**{k + "^-3": v**-3 for k, v in _LENGTH.items()},
                **{k + "-3": v**-3 for k, v in _LENGTH.items()}},
    "temperature": {"K": 1.0, "mK": 1e-3, "uK": 1e-6, "nK": 1e-9},
    "time": {p + "s": f for p, f in _PREFIX.items() if p not in ("k", "c")},
    "friction": {"kg/s": 1.0},
    "energy": {"J": 1.0},
}

_NUMBER = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(.*?)\s*$")


def split_quantity(text):
    """Return ``(number, suffix)``; the suffix is ``""`` for a bare number."""
    m = _NUMBER.match(str(text))
    if not m:
        raise DomainError(f"cannot parse quantity {text!r}")
    return float(m.group(1)), m.group(2)


def parse_quantity(text, dimension):
    """Convert ``text`` to SI. A bare number is taken to be SI already."""
    value, suffix = split_quantity(text)
    if not suffix:
        return value
    table = UNITS[dimension]
    if suffix not in table:
        raise DomainError(
            f"unit {suffix!r} is not a {dimension} unit; use one of {', '.join(table)}")
    return value * table[suffix]
