import csv
import json
import subprocess
import sys
from importlib import resources

import jsonschema
import numpy as np
import pytest

from scramblab.cli import main
from scramblab.hamiltonian import preset
from scramblab.spectral import sector_r_statistics


def schema(name):
    return json.loads(resources.files("scramblab").joinpath(f"schemas/{name}.json").read_text())


def run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path)])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def load(path):
    return json.loads(path.read_text())


def test_rstats_outputs_and_schema(tmp_path):
    assert run(tmp_path, "rstats", "--n", "10", "--preset", "nnn") == 0
    summary = load(tmp_path / "summary.json")
    jsonschema.validate(summary, schema("rstats"))
    jsonschema.validate(load(tmp_path / "manifest.json"), schema("manifest"))
    assert summary["references"]["goe"] == pytest.approx(0.5307)
    _, st_ = sector_r_statistics(preset("nnn", 10))
    assert summary["mean_r"] == st_.mean_r
    assert len(read_csv(tmp_path / "r_values.csv")) == len(st_.r_values)
    assert not (tmp_path / "histogram.svg").exists()


def test_rstats_integrable_point(tmp_path):
    assert run(tmp_path, "rstats", "--lambda", "0", "--f", "1", "--g", "0", "--n", "12") == 0
    assert load(tmp_path / "summary.json")["mean_r"] < 0.48


def test_svg_only_on_request(tmp_path):
    assert run(tmp_path, "rstats", "--n", "8", "--format", "svg") == 0
    assert (tmp_path / "histogram.svg").read_text().startswith("<svg")
    assert not (tmp_path / "summary.json").exists()
    assert (tmp_path / "manifest.json").exists()


def test_otoc_csv_and_determinism(tmp_path):
    args = ["otoc", "--n", "8", "--samples", "2", "--tmax", "3", "--tstep", "0.5", "--seed", "4"]
    assert run(tmp_path / "a", *args) == 0
    assert run(tmp_path / "b", *args) == 0
    rows = read_csv(tmp_path / "a" / "otoc.csv")
    assert float(rows[0]["t"]) == 0.0 and abs(float(rows[0]["C"])) < 1e-10
    assert len(rows) == 7
    assert (tmp_path / "a" / "otoc.csv").read_bytes() == (tmp_path / "b" / "otoc.csv").read_bytes()
    jsonschema.validate(load(tmp_path / "a" / "summary.json"), schema("otoc"))


def test_scaling_from_points(tmp_path):
    pts = tmp_path / "pts.csv"
    pts.write_text("N,C\n" + "".join(f"{n},{n ** -3.0!r}\n" for n in range(9, 16)))
    assert run(tmp_path / "o", "scaling", "--points", str(pts)) == 0
    summary = load(tmp_path / "o" / "scaling.json")
    jsonschema.validate(summary, schema("scaling"))
    assert summary["power_law"]["alpha"] == pytest.approx(3.0, abs=1e-9)


def test_scaling_pipeline_small(tmp_path):
    assert run(tmp_path, "scaling", "--n", "6:8", "--samples", "1", "--tmax", "2",
               "--tstep", "0.1", "--engine", "eigen") == 0
    summary = load(tmp_path / "scaling.json")
    jsonschema.validate(summary, schema("scaling"))
    assert summary["ns"] == [6, 7, 8]
    assert {p.name for p in tmp_path.glob("otoc_N*.csv")} == {"otoc_N6.csv", "otoc_N7.csv", "otoc_N8.csv"}


def test_entropy_both_presets(tmp_path):
    assert run(tmp_path, "entropy", "--n", "8", "--tmax", "3", "--tstep", "0.5") == 0
    summary = load(tmp_path / "summary.json")
    jsonschema.validate(summary, schema("entropy"))
    assert set(summary["curves"]) == {"nn", "nnn"}
    rows = read_csv(tmp_path / "entropy.csv")
    for label in ("nn", "nnn"):
        S = [float(r["S"]) for r in rows if r["preset"] == label]
        assert abs(S[0]) < 1e-10
        assert max(S) <= 4 * np.log(2) + 1e-9


def test_sweep_single_point_matches_rstats(tmp_path):
    assert run(tmp_path / "s", "sweep", "--n", "10", "--grid", "0.9:0.9:1,0.84:0.84:1",
               "--parallelism", "1") == 0
    assert run(tmp_path / "r", "rstats", "--n", "10", "--lambda", "0.9", "--f", "0.84", "--g", "1") == 0
    sweep = load(tmp_path / "s" / "sweep.json")
    jsonschema.validate(sweep, schema("sweep"))
    assert sweep["argmax"]["mean_r"] == load(tmp_path / "r" / "summary.json")["mean_r"]


def test_replay_reproduces_outputs(tmp_path):
    first = tmp_path / "first"
    assert run(first, "otoc", "--n", "7", "--samples", "2", "--tmax", "2", "--seed", "9") == 0
    manifest = load(first / "manifest.json")
    assert "--out" not in manifest["argv"]
    second = tmp_path / "second"
    assert main(["replay", str(first / "manifest.json"), "--out", str(second)]) == 0
    again = load(second / "manifest.json")
    assert again["outputs"] == manifest["outputs"]
    for name in manifest["outputs"]:
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_usage_errors_exit_1(tmp_path, capsys):
    assert run(tmp_path, "rstats", "--n", "3") == 1
    with pytest.raises(SystemExit) as exc:
        main(["rstats"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == 1
    assert run(tmp_path, "otoc", "--n", "6", "--r", "9") == 1
    assert list(tmp_path.iterdir()) == []


def test_numeric_failure_exit_2_and_cleanup(tmp_path):
    pts = tmp_path / "pts.csv"
    pts.write_text("N,C\n9,0.1\n10,0.0\n11,0.05\n")
    out = tmp_path / "o"
    assert run(out, "scaling", "--points", str(pts)) == 2
    assert not out.exists() or list(out.iterdir()) == []


def test_thread_env_honored(tmp_path, monkeypatch):
    monkeypatch.setenv("SCRAMBLAB_THREADS", "2")
    assert run(tmp_path, "sweep", "--n", "8", "--grid", "0:1:2,0.5:1:2") == 0
    assert load(tmp_path / "manifest.json")["config"]["parallelism"] == 2


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "scramblab.cli", "rstats", "--n", "8",
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "summary.json").exists()
