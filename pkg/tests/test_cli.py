import csv
import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from rankone.cli import run
from rankone.oracles import h3_heat_kernel
from rankone.output import write_atomic


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_space(tmp_path, capsys):
    assert run(["space", "--space", "damek-ricci", "--m", "1", "--k", "1", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "space.json").read_text())
    assert doc["label"] == "DR(1,1)" and doc["schema_version"] == 1
    assert json.loads(capsys.readouterr().out) == doc


def test_eigen_points_and_dimension(tmp_path):
    assert run(["eigen", "--lambda", "1.5", "--rmax", "5", "--n", "11", "--dim", "3", "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "eigen.csv")
    assert len(rows) == 11
    r = float(rows[4]["r"])
    assert float(rows[4]["re_phi"]) == pytest.approx(math.sin(1.5 * r) / (1.5 * math.sinh(r)), abs=1e-9)
    assert (tmp_path / "eigen.json").exists()


def test_eigen_complex_lambda(tmp_path):
    assert run(["eigen", "--lambda", "0,1", "--rmax", "3", "--n", "5", "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "eigen.csv")
    assert all(float(row["re_phi"]) == pytest.approx(1.0, rel=1e-8) for row in rows)


def test_spectrum(tmp_path):
    assert run(["spectrum", "--lmax", "20", "--n", "21", "--out", str(tmp_path), "--format", "csv"]) == 0
    rows = _rows(tmp_path / "spectrum.csv")
    assert len(rows) == 21
    assert float(rows[-1]["density"]) == pytest.approx(400.0, rel=1e-7)
    # the header still goes to a sidecar
    assert json.loads((tmp_path / "spectrum.json").read_text())["lambda_min"] == 0.05


def test_spectrum_json_only(tmp_path):
    assert run(["spectrum", "--lmax", "20", "--n", "5", "--out", str(tmp_path), "--format", "json"]) == 0
    doc = json.loads((tmp_path / "spectrum.json").read_text())
    assert doc["columns"] == ["lambda", "density"] and len(doc["rows"]) == 5
    assert not (tmp_path / "spectrum.csv").exists()


def test_heat(tmp_path):
    assert run(["heat", "--t", "0.5", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "heat.json").read_text())
    assert doc["norms"]["L1"] == pytest.approx(1.0, rel=1e-7)
    assert doc["norms"]["L2"] == pytest.approx(doc["norms"]["L2_spectral"], rel=1e-8)
    rows = _rows(tmp_path / "heat.csv")
    r = np.array([float(x["r"]) for x in rows])
    v = np.array([float(x["re"]) for x in rows])
    assert np.max(np.abs(v - h3_heat_kernel(0.5, r))) < 1e-9


def test_schrodinger(tmp_path):
    assert run(["schrodinger", "--t", "0.3", "--init", "gaussian:1", "--out", str(tmp_path)]) == 0
    norms = json.loads((tmp_path / "schrodinger.json").read_text())["norms"]
    assert norms["L2"] == pytest.approx(norms["L2_initial"], rel=1e-8)


def test_transform(tmp_path):
    r = np.linspace(0.0, 12.0, 600)
    src = tmp_path / "in.csv"
    src.write_text("r,re,im\n" + "".join(f"{float(x)!r},{math.exp(-x * x)!r},0\n" for x in r))
    out = tmp_path / "fhat.csv"
    assert run(["transform", "--in", str(src), "--output", str(out), "--out", str(tmp_path)]) == 0
    norms = json.loads(out.with_suffix(".json").read_text())["norms"]
    assert norms["L2"] == pytest.approx(norms["spectral_L2"], rel=1e-8)
    assert len(_rows(out)) == 600


@pytest.mark.parametrize("argv", [
    ["eigen", "--lambda", "bogus"],
    ["eigen", "--lambda", "1", "--rmax", "-1"],
    ["heat", "--t", "-1"],
    ["schrodinger", "--t", "1", "--init", "bump:1"],
    ["verify", "nope"],
    ["space", "--unknown-flag"],
    ["space", "--set", "no.such=1"],
    ["space", "--set", "broken"],
    ["space", "--space", "damek-ricci", "--k", "0"],
    ["space", "--jobs", "0"],
    ["transform", "--in", "/nonexistent.csv"],
    [],
])
def test_usage_errors(tmp_path, argv, capsys):
    assert run([*argv, "--out", str(tmp_path)] if argv else argv) == 2
    assert capsys.readouterr().err


def test_config_file_and_env(tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("space.n = 5\n")
    monkeypatch.setenv("RANKONE_OUTPUT_DIR", str(tmp_path / "env"))
    assert run(["space", "--config", str(cfg)]) == 0
    assert json.loads((tmp_path / "env" / "space.json").read_text())["label"] == "H5"
    assert run(["space", "--config", str(cfg), "--dim", "4", "--out", str(tmp_path / "flag")]) == 0
    assert json.loads((tmp_path / "flag" / "space.json").read_text())["label"] == "H4"


def test_verify_single_check(tmp_path, capsys):
    assert run(["verify", "smoothing", "--out", str(tmp_path)]) == 0
    assert capsys.readouterr().out.startswith("PASS  smoothing")
    doc = json.loads((tmp_path / "verify" / "H3" / "smoothing.json").read_text())
    assert doc["pass"] is True and doc["schema_version"] == 1
    rows = _rows(tmp_path / "verify" / "H3" / "summary.csv")
    assert list(rows[0]) == ["check_name", "metric", "value", "op", "bound", "pass"]
    assert all(row["pass"] == "true" for row in rows)


def test_verify_failure_exit_code(tmp_path, capsys):
    argv = ["verify", "heat_norm_asymptotics", "--out", str(tmp_path),
            "--set", "verify.tolerance_overrides.heat_norm_asymptotics.tol=1e-30"]
    assert run(argv) == 1
    assert "FAIL" in capsys.readouterr().out


def test_atomic_write_leaves_no_temporaries(tmp_path):
    target = tmp_path / "sub" / "x.txt"
    write_atomic(target, "one")
    write_atomic(target, b"two")
    assert target.read_bytes() == b"two"
    assert os.listdir(target.parent) == ["x.txt"]


def test_report(tmp_path):
    assert run(["report", "--out", str(tmp_path), "--set", "grid.lambda_points=50"]) == 0
    files = sorted(p.name for p in (tmp_path / "report").iterdir())
    assert {"density.csv", "density.png"} <= set(files)
    assert sum(f.endswith(".png") for f in files) == sum(f.endswith(".csv") for f in files)
    assert (tmp_path / "report" / "density.png").read_bytes()[:4] == b"\x89PNG"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rankone", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "verify" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "rankone", "eigen"], capture_output=True, text=True)
    assert proc.returncode == 2 and "usage" in proc.stderr
