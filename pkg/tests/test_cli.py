import json
import subprocess
import sys

import pytest

from grasscert import rho, span_to_projection
from grasscert.affine import plane_from_points
from grasscert.cli import (EXIT_DOMAIN, EXIT_OK, EXIT_UNSATISFIED, EXIT_USAGE, parse_range,
                           parse_window, run)
from grasscert.serialize import dumps


def out_of(capsys):
    return capsys.readouterr().out


def test_metric_example(capsys):
    code = run(["metric", "--space", "G", "--a", "[[1,0],[0,0]]", "--b", "[[0,0],[0,1]]",
                "-p", "20"])
    assert code == EXIT_OK
    val = json.loads(out_of(capsys))["value"]
    assert val["lo"] == val["hi"] == "1*2^-0"


def test_metric_matches_library(capsys):
    a, b = [[1, 0], [0, 0]], [["1/2", "1/2"], ["1/2", "1/2"]]
    run(["metric", "--a", json.dumps(a), "--b", json.dumps(b), "-p", "16"])
    lib = rho(span_to_projection([(1, 0)]), span_to_projection([(1, 1)]), 16)
    assert out_of(capsys) == dumps(lib.to_json()) + "\n"


def test_precision_env(capsys, monkeypatch):
    monkeypatch.setenv("GRASSCERT_PRECISION", "7")
    run(["metric", "--a", "[[1,0],[0,0]]", "--b", "[[0,0],[0,1]]"])
    assert json.loads(out_of(capsys))["precision"] == 7
    monkeypatch.setenv("GRASSCERT_PRECISION", "x")
    assert run(["metric", "--a", "[[1,0],[0,0]]", "--b", "[[0,0],[0,1]]"]) == EXIT_USAGE


def test_fit_plane(capsys, tmp_path):
    pts = [[0, 0, 1], [1, 0, 1], [0, 1, 1]]
    f = tmp_path / "pts.json"
    f.write_text(json.dumps(pts))
    assert run(["fit-plane", "--points", f"@{f}"]) == EXIT_OK
    assert out_of(capsys) == dumps(plane_from_points(pts).to_json()) + "\n"
    assert run(["fit-plane", "--points", "[[0,0],[1,1],[2,2]]"]) == EXIT_DOMAIN


def test_fit_plane_boxes(capsys):
    boxes = [[["0", "1/1024"], ["1", "1025/1024"]], [["1", "1025/1024"], ["1", "1025/1024"]]]
    assert run(["fit-plane", "--points", json.dumps(boxes), "-r", "10"]) == EXIT_OK
    out = json.loads(out_of(capsys))
    assert set(out) == {"plane", "bound"}


def test_intersect(capsys):
    assert run(["intersect", "--a", "[0,0,0]", "--b", "[1,0,0]"]) == EXIT_OK
    meet = json.loads(out_of(capsys))
    assert meet["direction"]["proj"][1][1] == "1/1"
    assert run(["intersect", "--a", "[1,0,0]", "--b", "[1,0,1]"]) == EXIT_DOMAIN


def test_net_and_dim(capsys, tmp_path):
    out = tmp_path / "net.json"
    assert run(["net", "--space", "G(2,1)", "-r", "2", "-o", str(out)]) == EXIT_OK
    net = json.loads(out.read_text())
    assert len(net["elements"]) == 8 and net["audit"]["covered"] == 1000
    pts = tmp_path / "pts.json"
    pts.write_text(json.dumps([[f"{i}/256", "0"] for i in range(256)]))
    prof = tmp_path / "prof.csv"
    assert run(["dim", "--input", f"@{pts}", "--scales", "1:8", "--window", "2:7",
                "--profile", str(prof)]) == EXIT_OK
    assert json.loads(out_of(capsys))["slope"] == pytest.approx(1.0)
    assert prof.read_text().startswith("r,N\n")


def test_dim_of_planes(capsys, tmp_path):
    lines = [plane_from_points([(0, f"{j}/8"), (1, f"{j}/8")]).to_json() for j in range(8)]
    f = tmp_path / "lines.json"
    f.write_text(json.dumps(lines))
    assert run(["dim", "--input", f"@{f}", "--planes", "A(2,1)", "--scales", "1:3"]) == EXIT_OK
    assert "slope" in json.loads(out_of(capsys))


def test_usage_errors(capsys):
    assert run([]) == EXIT_USAGE
    assert run(["bogus"]) == EXIT_USAGE
    assert run(["metric", "--a", "[[1"]) == EXIT_USAGE
    assert run(["metric", "--a", "[[1,0],[0,0]]", "--b", "[[1,0],[0,0]]", "-p", "0"]) == EXIT_USAGE
    assert run(["net", "--space", "Q(2,1)", "-r", "2"]) == EXIT_USAGE
    assert run(["metric", "--a", "[[1,1],[0,0]]", "--b", "[[1,0],[0,0]]"]) == EXIT_DOMAIN


def test_ranges():
    assert parse_range("2:10:2") == [2, 4, 6, 8, 10]
    assert parse_range("1,3") == [1, 3]
    assert parse_window("3:9") == (3, 9)
    assert parse_window(None) is None


def _small_config(tmp_path, tolerance=None):
    cfg = {"schema": 1, "seed": 0, "experiments": [
        {"id": "sq", "type": "grid_calibration", "n": 2, "side_exponent": 6,
         "scales": [1, 2, 3, 4, 5, 6], "window": [2, 5], "tolerance": 0.05},
        {"id": "line", "type": "union",
         "family": {"n": 2, "k": 1, "params": ["1/3", "0"],
                    "subset": {"specs": [None], "scale": "1"}},
         "full_depth": 8, "scales": {"from": 1, "to": 8}, "window": [3, 8],
         "param_scales": [2, 4, 6]}]}
    if tolerance is not None:
        cfg["tolerance"] = tolerance
    f = tmp_path / "suite.json"
    f.write_text(json.dumps(cfg))
    return f


def test_experiment_command(tmp_path, capsys):
    cfg = _small_config(tmp_path)
    out, prof = tmp_path / "r.jsonl", tmp_path / "profiles"
    assert run(["experiment", "--config", str(cfg), "-o", str(out),
                "--profiles", str(prof)]) == EXIT_OK
    rows = [json.loads(x) for x in out.read_text().splitlines()]
    assert [r["id"] for r in rows] == ["line", "sq"] and all(r["satisfied"] for r in rows)
    assert (prof / "sq.points.csv").exists()
    out2 = tmp_path / "r2.jsonl"
    run(["experiment", "--config", str(cfg), "-o", str(out2)])
    assert out.read_bytes() == out2.read_bytes()


def test_experiment_unsatisfied_exit(tmp_path):
    bad = {"schema": 1, "experiments": [
        {"id": "wrong_target", "type": "cantor_calibration",
         "cantor": {"base": 2, "digits": [0, 1], "depth": 10}, "scales": [1, 2, 3, 4, 5, 6],
         "tolerance": 0.05}]}
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(bad))
    # the full interval has dimension 1; a negative tolerance cannot be met
    assert run(["experiment", "--config", str(f), "--tolerance", "-1", "-o",
                str(tmp_path / "o")]) == EXIT_UNSATISFIED


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "grasscert", "metric", "--a", "[[1,0],[0,0]]",
                          "--b", "[[1,0],[0,0]]"], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["value"]["hi"] == "0*2^-0"
