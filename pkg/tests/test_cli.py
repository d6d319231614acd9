import json
import os

import pytest

from radarnet.cli import main


def run(*args):
    return main([str(a) for a in args])


def files(d):
    return sorted(os.listdir(d)) if os.path.isdir(d) else []


@pytest.fixture
def short_config(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"sim_duration": 120.0, "arrival_rate": 1.5}))
    return p


def test_missing_config_is_usage_error(tmp_path):
    out = tmp_path / "out"
    assert run("simulate", "--config", tmp_path / "nope.json", "--out", out) == 2
    assert files(out) == []


def test_unknown_config_key_is_usage_error(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"sim_duration": 10, "turbo": True}))
    assert run("simulate", "--config", p, "--out", tmp_path / "out") == 2
    assert files(tmp_path / "out") == []


@pytest.mark.parametrize("argv", [["frobnicate"], ["simulate", "--bogus"], [], ["analyze"]])
def test_usage_errors(argv, tmp_path):
    assert main(argv + ["--out", str(tmp_path)] if argv[:1] == ["analyze"] else argv) == 2


def test_simulate_then_analyze_and_worldline(short_config, tmp_path):
    out = tmp_path / "a"
    assert run("simulate", "--config", short_config, "--seed", 7, "--out", out) == 0
    names = files(out)
    assert len(names) == 3 and all(n.startswith("simulate-") for n in names)
    report = json.loads((out / [n for n in names if n.endswith("report.json")][0]).read_text())
    assert report["seed"] == 7 and report["config"]["seed"] == 7
    log = out / [n for n in names if n.endswith("events.csv")][0]
    traj = out / [n for n in names if n.endswith("trajectories.csv")][0]
    assert log.read_text().startswith(f"# config_hash={report['config_hash']} seed=7")

    assert run("analyze", "--log", log, "--out", out) == 0
    assert run("worldline", "--log", log, "--trajectories", traj, "--config", short_config, "--out", out) == 0
    wl = json.loads((out / [n for n in files(out) if n.startswith("worldline-") and n.endswith(".json")][0]).read_text())
    assert wl["partition_ok"] and wl["speed_ok"]


def test_simulate_is_byte_identical(short_config, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("simulate", "--config", short_config, "--seed", 7, "--out", a) == 0
    assert run("simulate", "--config", short_config, "--seed", 7, "--out", b) == 0
    assert files(a) == files(b)
    for n in files(a):
        assert (a / n).read_bytes() == (b / n).read_bytes()


def test_decouple_builtin_cases(tmp_path):
    assert run("decouple", "--out", tmp_path) == 0
    data = json.loads((tmp_path / files(tmp_path)[0]).read_text())
    first = data["results"][0]
    assert first["branches"] == [{"amplitude": "1", "delay": 1}, {"amplitude": "1/2", "delay": 3}]
    assert all(r["reconstructs"] for r in data["results"])


def test_decouple_rejects_bad_fixture(tmp_path):
    p = tmp_path / "f.json"
    p.write_text(json.dumps({"cases": [{"y": "1 + z^-1"}]}))
    assert run("decouple", "--input", p, "--out", tmp_path / "o") == 2
    assert files(tmp_path / "o") == []


def test_detect(tmp_path):
    assert run("detect", "--trials", 100, "--seed", 1, "--out", tmp_path) == 0
    metrics = json.loads((tmp_path / [n for n in files(tmp_path) if n.endswith("metrics.json")][0]).read_text())
    assert metrics["test_accuracy"] >= 0.95 and metrics["seed"] == 1


def test_verify_quick_reports_lens_comparison(tmp_path):
    assert run("verify", "--quick", "--trials", 2000, "--out", tmp_path) == 0
    compat = [n for n in files(tmp_path) if n.endswith("compatibility.json")]
    data = json.loads((tmp_path / compat[0]).read_text())
    names = [e["name"] for e in data["entries"]]
    assert "lens_integral_quadrature" in names and names == sorted(names)
