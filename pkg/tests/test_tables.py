import json
import math
import xml.etree.ElementTree as ET

import pytest
from hypothesis import given, strategies as st

from qfriction import presets, tables
from qfriction.errors import DomainError
from qfriction.figures import fig1, fig2
from qfriction.tables import CurveTable
from qfriction.units import parse_quantity, split_quantity

SVG = "{http://www.w3.org/2000/svg}"


def polylines(svg_text):
    return ET.fromstring(svg_text.split("\n", 1)[1]).findall(f"{SVG}polyline")


def test_fig1_table():
    table = fig1()
    theta, f = table.column("theta"), table.column("f_thermal_b")
    assert len(table) == 61
    i = theta.index(min(theta, key=lambda v: abs(v - 1)))
    assert theta[i] == pytest.approx(1.0, rel=1e-12)
    assert f[i] == pytest.approx(1.8052400, abs=1e-6)
    assert all(b > a for a, b in zip(f, f[1:]))
    low = fig1(1e-6, 1e-3, 4)
    assert low.column("f_thermal_b")[0] == pytest.approx(math.sqrt(2), abs=1e-3)
    with pytest.raises(DomainError):
        fig1(1.0, 0.5)


def test_fig2_table():
    table = fig2()
    assert len(table) == 81
    first = table.rows[0]
    assert first[1:] == pytest.approx([1.0, 1.0, 2.0, 4 / 3])
    for s, lo, mid, hi, _ in table.rows:
        assert lo <= mid <= hi
    s = table.column("s")
    i = s.index(100.0) if 100.0 in s else min(range(len(s)), key=lambda k: abs(s[k] - 100))
    assert 10.0 <= table.column("y_virial")[i] <= 13.303
    with pytest.raises(DomainError):
        fig2(1.0)


def test_svg_structure():
    one, two = tables.svg_emit(fig1()), tables.svg_emit(fig2())
    assert len(polylines(one)) == 2
    assert len(polylines(two)) == 4
    root = ET.fromstring(one.split("\n", 1)[1])
    desc = json.loads(root.find(f"{SVG}desc").text)
    assert desc["figure"] == "fig1"
    with pytest.raises(DomainError):
        tables.svg_emit(CurveTable(["x", "y"], ["1", "1"], []))


def test_svg_linear_axes_for_linear_grid():
    t = CurveTable.from_columns([("x", "1", [0.0, 1.0, 2.0]), ("y", "1", [0.0, 1.0, 4.0])])
    text = tables.svg_emit(t)
    assert "(log)" not in text
    assert len(polylines(text)) == 1


def test_table_validation():
    with pytest.raises(DomainError):
        CurveTable(["x", "y"], ["1", "1"], [[0.0, math.nan]])
    with pytest.raises(DomainError):
        CurveTable(["x", "y"], ["1", "1"], [[1.0, 0.0], [1.0, 2.0]])
    with pytest.raises(DomainError):
        CurveTable(["x"], ["1", "1"], [])


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(st.lists(finite, min_size=1, max_size=20, unique=True), st.data())
def test_csv_and_json_round_trip_bit_exact(xs, data):
    xs = sorted(xs)
    ys = data.draw(st.lists(finite, min_size=len(xs), max_size=len(xs)))
    t = CurveTable.from_columns([("x", "m", xs), ("y", "kg/s", ys)], {"k": [1, "two"]})
    for back in (tables.from_csv(tables.to_csv(t)), tables.from_json(tables.to_json(t))):
        assert back.names == t.names and back.units == t.units
        assert back.metadata == t.metadata
        assert all(a == b and math.copysign(1, a) == math.copysign(1, b)
                   for ra, rb in zip(t.rows, back.rows) for a, b in zip(ra, rb))


def test_csv_layout():
    text = tables.to_csv(fig1(points=3))
    lines = text.splitlines()
    assert all(line.startswith("#") for line in lines[:-4])
    assert lines[-4] == "theta,f_thermal_b,f_classical"
    for field in lines[-1].split(","):
        assert len(field.replace(".", "").replace("-", "").split("e")[0].lstrip("0")) >= 1


def test_json_schema_version():
    doc = json.loads(tables.to_json(fig1(points=3)))
    assert doc["schema_version"] == tables.SCHEMA_VERSION
    assert doc["columns"][0] == {"name": "theta", "unit": "1"}
    doc["schema_version"] = 99
    with pytest.raises(DomainError):
        tables.from_json(json.dumps(doc))


def test_write_and_read(tmp_path):
    t = fig2(points=9)
    for suffix in ("csv", "json"):
        path = tmp_path / f"f.{suffix}"
        tables.write(t, path)
        assert tables.read(path).rows == t.rows
    with pytest.raises(DomainError):
        tables.dumps(t, "xlsx")


def test_is_log_grid():
    assert tables.is_log_grid([1, 10, 100, 1000])
    assert not tables.is_log_grid([1, 2, 3, 4])
    assert not tables.is_log_grid([0, 1, 10])


def test_units():
    assert parse_quantity("3e-10m", "length") == 3e-10
    assert parse_quantity("3A", "length") == pytest.approx(3e-10)
    assert parse_quantity("1.33K", "temperature") == 1.33
    assert parse_quantity("1.43ps", "time") == pytest.approx(1.43e-12)
    assert parse_quantity("2.5e-20", "area") == 2.5e-20
    assert parse_quantity("1nm^2", "area") == pytest.approx(1e-18)
    assert split_quantity(" 5 mK ") == (5.0, "mK")
    with pytest.raises(DomainError, match="not a length unit"):
        parse_quantity("3K", "length")
    with pytest.raises(DomainError):
        split_quantity("K3")


def test_presets(tmp_path):
    assert "hydrogen-in-solid" in presets.available()
    system = presets.load("hydrogen")
    assert system.mass == 1.6735e-27
    assert system.mfp == pytest.approx(3e-10, rel=1e-12)
    custom = tmp_path / "mine.json"
    custom.write_text(json.dumps({"mass": "2u", "gas_mass": "40u", "mean_free_path": "5A",
                                  "temperature": "2K"}))
    mine = presets.load(str(custom))
    assert mine.temperature == 2.0 and mine.mfp == pytest.approx(5e-10)
    with pytest.raises(DomainError, match="unknown preset"):
        presets.load("helium")


def test_plotting(tmp_path):
    from qfriction.plotting import plot_table
    for t in (fig1(points=11), fig2(points=11)):
        path = tmp_path / f"{t.metadata['figure']}.png"
        plot_table(t, path, title="x")
        assert path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
