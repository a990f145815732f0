"""Columnar curve data and its CSV, JSON and SVG serializations.

CSV layout::

    # {"key": ...}          one JSON-encoded metadata entry per comment line
    # units: 1,1,1
    theta,f_thermal_b,f_classical
    0.001,1.4137...,0.0316...

Floats are written with ``repr`` (shortest round-trip form), so reading a
file back reproduces every value bit-for-bit.
"""
from __future__ import annotations

import csv
import io
import json
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .errors import DomainError

SCHEMA_VERSION = 1
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_DASHES = ("", "6,3", "2,3", "8,3,2,3", "4,4", "1,2")


@dataclass
class CurveTable:
    """Named, unit-tagged columns; the first column is the abscissa."""

    names: list
    units: list
    rows: list
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.names) != len(self.units):
            raise DomainError("names and units differ in length")
        for row in self.rows:
            if len(row) != len(self.names):
                raise DomainError("row length does not match the column count")
            if not all(math.isfinite(v) for v in row):
                raise DomainError(f"non-finite value in row {row!r}")
        xs = [r[0] for r in self.rows]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise DomainError("abscissa must be strictly increasing")

    @classmethod
    def from_columns(cls, columns, metadata=None):
        """Build from ``(name, unit, values)`` triples."""
        names = [c[0] for c in columns]
        units = [c[1] for c in columns]
        rows = [list(map(float, r)) for r in zip(*(c[2] for c in columns))]
        return cls(names, units, rows, dict(metadata or {}))

    def column(self, name):
        i = self.names.index(name)
        return [r[i] for r in self.rows]

    def __len__(self):
        return len(self.rows)


def _fmt(value):
    return repr(float(value))


def to_csv(table):
    buf = io.StringIO()
    for key, value in table.metadata.items():
        buf.write("# " + json.dumps({key: value}, sort_keys=True) + "\n")
    buf.write("# units: " + ",".join(table.units) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.names)
    for row in table.rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def from_csv(text):
    metadata, units, body = {}, None, []
    for line in text.splitlines():
        if line.startswith("# units:"):
            units = line[len("# units:"):].strip().split(",")
        elif line.startswith("#"):
            metadata.update(json.loads(line[1:]))
        elif line.strip():
            body.append(line)
    reader = csv.reader(body)
    names = next(reader)
    rows = [[float(v) for v in r] for r in reader]
    return CurveTable(names, units or [""] * len(names), rows, metadata)


def to_json(table):
    doc = {
        "schema_version": SCHEMA_VERSION,
        "metadata": table.metadata,
        "columns": [{"name": n, "unit": u} for n, u in zip(table.names, table.units)],
        "rows": table.rows,
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def from_json(text):
    doc = json.loads(text)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise DomainError(f"unsupported schema_version {doc.get('schema_version')!r}")
    cols = doc["columns"]
    return CurveTable([c["name"] for c in cols], [c["unit"] for c in cols],
                      doc["rows"], doc["metadata"])


def is_log_grid(xs, rtol=0.05):
    """True when successive abscissa ratios agree to within ``rtol``."""
    if len(xs) < 3 or xs[0] <= 0:
        return False
    steps = [math.log(b / a) for a, b in zip(xs, xs[1:])]
    return all(abs(d - steps[0]) <= rtol * abs(steps[0]) for d in steps)


def svg_emit(table, *, columns=None, title=None, width=640, height=420,
             log_x=None, log_y=None):
    """Render ``columns`` (default: every ordinate) as SVG polylines.

    Axes are logarithmic where the table metadata says ``"grid": "log"`` or
    the abscissa is geometric; the ordinate axis follows the abscissa when
    all plotted values are positive.
    """
    if not table.rows:
        raise DomainError("cannot plot an empty table")
    columns = list(columns or table.names[1:])
    xs = table.column(table.names[0])
    ys = {c: table.column(c) for c in columns}
    if log_x is None:
        log_x = table.metadata.get("grid") == "log" or is_log_grid(xs)
    log_x = log_x and xs[0] > 0
    if log_y is None:
        log_y = log_x and all(v > 0 for c in columns for v in ys[c])

    def tx(v):
        return math.log10(v) if log_x else v

    def ty(v):
        return math.log10(v) if log_y else v

    left, right, top, bottom = 70, 160, 30, 50
    pw, ph = width - left - right, height - top - bottom
    x0, x1 = tx(min(xs)), tx(max(xs))
    all_y = [ty(v) for c in columns for v in ys[c]]
    y0, y1 = min(all_y), max(all_y)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1

    def px(v):
        return left + (tx(v) - x0) / (x1 - x0) * pw

    def py(v):
        return top + ph - (ty(v) - y0) / (y1 - y0) * ph

    svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg",
                     width=str(width), height=str(height),
                     viewBox=f"0 0 {width} {height}")
    ET.SubElement(svg, "rect", x=str(left), y=str(top), width=str(pw),
                  height=str(ph), fill="none", stroke="black")
    if title:
        ET.SubElement(svg, "text", x=str(left), y="20", **{"font-size": "14"}).text = title
    for frac in (0.0, 0.5, 1.0):
        xv, yv = x0 + frac * (x1 - x0), y0 + frac * (y1 - y0)
        xl = f"{10**xv:.3g}" if log_x else f"{xv:.3g}"
        yl = f"{10**yv:.3g}" if log_y else f"{yv:.3g}"
        ET.SubElement(svg, "text", x=f"{left + frac * pw:.1f}", y=str(height - bottom + 18),
                      **{"font-size": "11", "text-anchor": "middle"}).text = xl
        ET.SubElement(svg, "text", x=str(left - 6), y=f"{top + ph - frac * ph + 4:.1f}",
                      **{"font-size": "11", "text-anchor": "end"}).text = yl
    xlabel = table.names[0] + (" (log)" if log_x else "")
    ET.SubElement(svg, "text", x=f"{left + pw / 2:.1f}", y=str(height - 10),
                  **{"font-size": "12", "text-anchor": "middle"}).text = xlabel
    for k, c in enumerate(columns):
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys[c]))
        attrs = {"points": pts, "fill": "none", "stroke": _PALETTE[k % len(_PALETTE)],
                 "stroke-width": "1.5"}
        if _DASHES[k % len(_DASHES)]:
            attrs["stroke-dasharray"] = _DASHES[k % len(_DASHES)]
        line = ET.SubElement(svg, "polyline", **attrs)
        ET.SubElement(line, "title").text = c
        ly = top + 15 + 18 * k
        ET.SubElement(svg, "line", x1=str(width - right + 10), y1=str(ly),
                      x2=str(width - right + 35), y2=str(ly),
                      stroke=attrs["stroke"], **({"stroke-dasharray": attrs["stroke-dasharray"]}
                                                 if "stroke-dasharray" in attrs else {}))
        ET.SubElement(svg, "text", x=str(width - right + 40), y=str(ly + 4),
                      **{"font-size": "11"}).text = c
    ET.SubElement(svg, "desc").text = json.dumps(table.metadata, sort_keys=True)
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(svg, encoding="unicode") + "\n"


def dumps(table, fmt, **svg_options):
    if fmt == "csv":
        return to_csv(table)
    if fmt == "json":
        return to_json(table)
    if fmt == "svg":
        return svg_emit(table, **svg_options)
    raise DomainError(f"unknown format {fmt!r}; choose csv, json or svg")


def write(table, path, fmt=None, **svg_options):
    fmt = fmt or str(path).rsplit(".", 1)[-1].lower()
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(dumps(table, fmt, **svg_options))


def read(path):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return from_json(text) if str(path).endswith(".json") else from_csv(text)
