import csv
import json
import os
import subprocess
import sys

import pytest

from distgeo import cli
from distgeo.errors import ConfigError, DistGeoError, UsageError


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


@pytest.mark.parametrize("doc, path", [
    ({"tol": -1}, "config.tol"),
    ({"N": 0}, "config.N"),
    ({"model": ["torus", "bogus"]}, "config.model[1]"),
    ({"apex": {"coords": [0, "x"]}}, "config.apex.coords"),
    ({"apex": {"coords": [0, 0], "chart": 3}}, "config.apex.chart"),
    ({"kind": "nope"}, "config.kind"),
    ({"colour": 1}, "config.colour"),
    ({"seed": True}, "config.seed"),
])
def test_config_errors_carry_path(doc, path):
    with pytest.raises(ConfigError) as exc:
        cli.load_config(doc)
    assert exc.value.path == path
    assert str(exc.value).startswith(path)


def test_flags_override_config():
    cfg = cli.load_config({"kind": "cutlocus", "N": 64, "tol": 1e-2, "model": "sphere"},
                          {"N": 128})
    assert cfg.N == 128 and cfg.tol == 1e-2 and cfg.model == ["sphere"]
    with pytest.raises(ConfigError) as exc:
        cli.load_config({}, {"grid": -4})
    assert exc.value.path == "flags.grid"


def test_all_defaults_to_every_model():
    cfg = cli.load_config({"kind": "all"})
    assert cfg.model == list(cli.ALL_MODELS)
    assert ("pairing", "ellipsoid") not in cli._plan(cfg)
    assert ("weaksense", None) in cli._plan(cfg)


def test_read_config_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError) as exc:
        cli.read_config(str(bad))
    assert exc.value.path == str(bad)
    with pytest.raises(ConfigError):
        cli.read_config(str(tmp_path / "missing.json"))


def test_apex_forms():
    assert cli.load_config({"apex": [0.1, 0.2]}).apex == {"coords": [0.1, 0.2], "chart": 0}


def _run(tmp_path, name, *args):
    out = tmp_path / name
    code = cli.main([*args, "--quiet", "--out", str(out)])
    return code, out


def test_cutlocus_run_is_deterministic(tmp_path):
    args = ("cutlocus", "--model", "torus", "--N", "512")
    c1, o1 = _run(tmp_path, "a", *args)
    c2, o2 = _run(tmp_path, "b", *args)
    assert c1 == c2 == 0
    for name in ("cutlocus_torus.csv", os.path.join("plots", "cutlocus-points.csv"),
                 os.path.join("plots", "jump-profile.csv")):
        assert (o1 / name).read_bytes() == (o2 / name).read_bytes()
    r1, r2 = (json.loads((o / "report.json").read_text()) for o in (o1, o2))
    for r in (r1, r2):
        del r["header"]
        del r["config"]["out"]
    assert r1 == r2
    assert "runtime" not in read_rows(o1 / "cutlocus_torus.csv")[0]


def test_plot_columns(tmp_path):
    code, out = _run(tmp_path, "s", "cutlocus", "--model", "sphere", "--N", "64")
    assert code == 0
    assert read_rows(out / "plots" / "cutlocus-points.csv")[0] == [
        "model", "v_angle", "x", "y", "z", "jump"]
    assert read_rows(out / "plots" / "conjugate-scan.csv")[0] == ["v_angle", "c_v"]
    report = json.loads((out / "report.json").read_text())
    assert report["passed"] and report["experiments"][0]["model"] == "sphere"


def test_impossible_tolerance_exits_one(tmp_path):
    code, out = _run(tmp_path, "p", "pairing", "--model", "sphere", "--grid", "32",
                     "--tol", "1e-15")
    assert code == 1
    report = json.loads((out / "report.json").read_text())
    assert not report["passed"]
    header = read_rows(out / "pairing_sphere.csv")[0]
    assert header[:4] == ["model", "field", "kind", "lhs"]


def test_config_error_exits_two(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"tol": "small"}))
    assert cli.main(["cutlocus", "--config", str(cfg), "--quiet"]) == 2
    assert "config.tol" in capsys.readouterr().err


def test_unsupported_pairing_model_exits_two(tmp_path):
    code, _ = _run(tmp_path, "x", "pairing", "--model", "plane")
    assert code == 2


def test_engine_error_exits_three(tmp_path, monkeypatch):
    def boom(*a, **k):
        raise DistGeoError("integrator blew up")
    monkeypatch.setitem(cli.RUNNERS, "cutlocus", boom)
    code, out = _run(tmp_path, "e", "cutlocus", "--model", "torus")
    assert code == 3
    report = json.loads((out / "report.json").read_text())
    assert "integrator blew up" in report["experiments"][0]["error"]


def test_emit_plot_data_errors(tmp_path):
    report = cli.RunReport(cli.load_config({"out": str(tmp_path)}))
    with pytest.raises(UsageError):
        cli.emit_plot_data(report, "histogram")
    with pytest.raises(UsageError):
        cli.emit_plot_data(report, "refinement")
    report.add_series("conjugate-scan", ["v_angle", "c_v"], [(0.0, 3.0)])
    path = cli.emit_plot_data(report, "conjugate-scan")
    assert read_rows(path) == [["v_angle", "c_v"], ["0.0", "3.0"]]


def test_console_script_version():
    out = subprocess.run([sys.executable, "-m", "distgeo.cli", "--version"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("distgeo ")
