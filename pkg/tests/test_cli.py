import json
import math
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from qfriction import tables
from qfriction.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def value_of(stdout):
    return float(stdout.split("=", 1)[1].split()[0])


def test_compute_hydrogen(capsys):
    code, out, _ = run(capsys, "compute", "b", "--preset", "hydrogen", "--T", "0")
    assert code == 0
    assert value_of(out) == pytest.approx(1.17e-15, rel=0.01)
    assert "hbar/lambda^2" in out
    assert value_of(run(capsys, "compute", "tau", "--preset", "hydrogen")[1]) == \
        pytest.approx(1.43e-12, rel=0.01)
    assert value_of(run(capsys, "compute", "T_lambda", "--preset", "hydrogen")[1]) == \
        pytest.approx(1.33, rel=0.01)


def test_compute_unit_suffixes(capsys):
    a = value_of(run(capsys, "compute", "tau", "--m", "1.6735e-27kg", "--lambda", "3A")[1])
    b = value_of(run(capsys, "compute", "tau", "--m", "1.6735e-27", "--lambda", "3e-10m")[1])
    assert a == pytest.approx(b, rel=1e-12)


def test_compute_forms_and_laws(capsys):
    base = ("--preset", "hydrogen", "--T", "2K")
    a = value_of(run(capsys, "compute", "b", *base, "--form", "A")[1])
    b = value_of(run(capsys, "compute", "b", *base, "--form", "thermal_b")[1])
    assert b == pytest.approx(2 * a, rel=1e-12)
    code, out, _ = run(capsys, "compute", "sigma_x2", *base, "--t", "10ps", "--law", "thermal")
    assert code == 0 and value_of(out) > 0


def test_compute_json_output(capsys, tmp_path):
    code, out, _ = run(capsys, "compute", "tau", "--preset", "hydrogen", "--format", "json")
    doc = json.loads(out)
    assert doc["columns"] == [{"name": "tau", "unit": "s"}]
    assert doc["metadata"]["run"]["version"]


def test_usage_errors(capsys):
    code, _, err = run(capsys, "compute", "bogus")
    assert code == 2 and "unknown quantity" in err
    code, _, err = run(capsys, "compute", "tau", "--m", "1kg")
    assert code == 2 and "lambda" in err
    code, _, err = run(capsys, "compute", "tau", "--m", "1K", "--lambda", "1m")
    assert code == 2
    code, _, _ = run(capsys, "fig1", "--theta-min", "10", "--theta-max", "1")
    assert code == 2
    code, _, _ = run(capsys, "simulate", "langevin", "--dt", "0.5", "--n-traj", "200")
    assert code == 2
    with pytest.raises(SystemExit) as exc:
        main(["nosuchcommand"])
    assert exc.value.code == 2


def test_io_error(capsys, tmp_path):
    code, _, err = run(capsys, "fig1", "--output", str(tmp_path / "missing" / "x.csv"))
    assert code == 4 and "I/O" in err


def test_numeric_error(capsys, monkeypatch):
    from qfriction import cli
    from qfriction.errors import NumericError

    def boom(*a, **k):
        raise NumericError("forced")
    monkeypatch.setattr(cli, "fig2", boom)
    assert run(capsys, "fig2")[0] == 3


def test_fig_outputs(capsys, tmp_path):
    csv_path, svg1, svg2 = tmp_path / "f1.csv", tmp_path / "f1.svg", tmp_path / "f2.svg"
    assert main(["fig1", "--output", str(csv_path)]) == 0
    table = tables.read(csv_path)
    assert table.metadata["run"]["command"] == "fig1"
    assert table.metadata["run"]["version"]
    assert main(["fig1", "--output", str(svg1)]) == 0
    assert main(["fig2", "--format", "svg", "--output", str(svg2)]) == 0
    ns = "{http://www.w3.org/2000/svg}"
    assert len(ET.parse(svg1).getroot().findall(f"{ns}polyline")) == 2
    assert len(ET.parse(svg2).getroot().findall(f"{ns}polyline")) == 4


def test_figure_flag(capsys, tmp_path):
    png = tmp_path / "f.png"
    assert main(["fig2", "--points", "11", "--output", str(tmp_path / "f.csv"),
                 "--figure", str(png)]) == 0
    assert png.stat().st_size > 0


def test_sweep(capsys, tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "b", "--preset", "hydrogen", "--vary", "T", "--start", "0.1K",
                 "--stop", "10K", "--points", "5", "--output", str(out)]) == 0
    t = tables.read(out)
    assert len(t) == 5 and t.names == ["T", "b"]
    b = t.column("b")
    assert all(y > x for x, y in zip(b, b[1:]))


def test_preset_list(capsys):
    code, out, _ = run(capsys, "preset-list")
    assert code == 0 and "hydrogen-in-solid" in out


def _simulate(tmp_path, name, *extra):
    path = tmp_path / name
    assert main(["simulate", *extra, "--output", str(path)]) == 0
    return path.read_bytes(), (tmp_path / (name + ".report.json")).read_bytes()


@pytest.mark.parametrize("scheme", ["langevin", "quantum-bath", "collisional"])
def test_simulate_deterministic_across_workers(capsys, tmp_path, scheme):
    args = (scheme, "--seed", "42", "--n-traj", "400", "--t-end", "25")
    a = _simulate(tmp_path, "a.csv", *args, "--workers", "1")
    b = _simulate(tmp_path, "b.csv", *args, "--workers", "3")
    assert a == b


def test_simulate_report_contents(capsys, tmp_path):
    _, report = _simulate(tmp_path, "q.json", "quantum-bath", "--n-traj", "400", "--b", "2")
    doc = json.loads(report)
    assert doc["targets"]["log_coefficient"] == 0.25
    fit = doc["fits"]["log_coefficient"]
    assert fit["ci_low"] < fit["value"] < fit["ci_high"]


def test_simulate_collisional_mfp_halving(capsys, tmp_path):
    def D(lam):
        _, report = _simulate(tmp_path, f"c{lam}.csv", "collisional", "--n-traj", "20000",
                              "--lambda", lam, "--t-end", "200", "--dt", "0.01", "--workers", "4")
        return json.loads(report)["fits"]["diffusion"]
    one, half = D("1"), D("0.5")
    assert abs(half["value"] - one["value"] / 2) < 1.96 * math.hypot(half["se"], one["se"] / 2)


def test_simulate_with_preset_si(capsys, tmp_path):
    _, report = _simulate(tmp_path, "h.csv", "langevin", "--preset", "hydrogen", "--T", "5K",
                          "--n-traj", "200", "--t-end", "25")
    doc = json.loads(report)
    assert doc["targets"]["diffusion"] > 0
    assert doc["run"]["parameters"]["preset"] == "hydrogen"


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "qfriction", "compute", "T_lambda",
                           "--preset", "hydrogen"], capture_output=True, text=True)
    assert proc.returncode == 0 and "K" in proc.stdout
