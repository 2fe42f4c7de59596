import csv
import json
import math

import pytest

from stokes_dtn.cli import main
from stokes_dtn.config import EXPERIMENTS, ConfigError, load_config, validate_config
from stokes_dtn.reports import CheckRecord, RunReport


def test_defaults():
    cfg = validate_config({}, "dtn-verify")
    assert (cfg.n, cfg.L, cfg.y_levels, cfg.top, cfg.band_limit, cfg.seed) == (256, 2 * math.pi, 256, 4 * math.pi, 32, 42)
    assert cfg.trial_count == 20 and cfg.scan_limit == 64


def test_all_problems_are_reported():
    with pytest.raises(ConfigError) as err:
        validate_config({"n": 100, "p": 1, "workers": 0, "bogus": 1}, "dtn-verify")
    msgs = " | ".join(err.value.problems)
    for part in ("power of two", "1<p<∞", "workers", "'bogus'"):
        assert part in msgs


@pytest.mark.parametrize("raw", [{"band_limit": 65}, {"k_max": 1}, {"Y": -1.0}, {"seed": -3}, {"c0_policy": "big"}])
def test_rejections(raw):
    with pytest.raises(ConfigError):
        validate_config(raw, "commutator-sweep")


def test_experiment_mismatch():
    with pytest.raises(ConfigError):
        validate_config({"experiment": "kernel-check"}, "dtn-verify")


def test_load_config(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"n": 64, "band_limit": 8, "trials": 3}))
    cfg = load_config(path, "square-report")
    assert cfg.n == 64 and cfg.trial_count == 3
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(path, "square-report")


def test_check_records():
    assert CheckRecord("a", 1.0, "<=", 1.0).passed
    assert not CheckRecord("a", float("nan"), "<=", 1.0).passed
    assert not CheckRecord("a", 3.0, "<", 3.0).passed
    with pytest.raises(ValueError):
        CheckRecord("a", 1.0, "==", 1.0)


def test_report_files(tmp_path):
    rep = RunReport("demo", {"n": 8})
    rep.check("x", 0.5, "<=", 1.0)
    rep.table("rows", ["k", "v", "ok"]).add(1, 0.1, True)
    rep.write(tmp_path)
    rows = list(csv.reader((tmp_path / "demo_rows.csv").open()))
    assert rows == [["k", "v", "ok"], ["1", "0.1", "true"]]
    summary = json.loads((tmp_path / "demo_summary.json").read_text())
    assert summary["passed"] and summary["checks"][0]["value"] == 0.5


def test_cli_runs_and_writes(tmp_path, capsys):
    cfg = tmp_path / "k.json"
    cfg.write_text(json.dumps({"trials": 2}))
    code = main(["kernel-check", "--config", str(cfg), "--out", str(tmp_path / "out"), "--plots"])
    assert code == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out
    names = {p.name for p in (tmp_path / "out").iterdir()}
    assert {"kernel-check_checks.csv", "kernel-check_summary.json", "kernel-check_kernel_residual_vs_h.svg"} <= names


def test_cli_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": 12}))
    assert main(["dtn-verify", "--config", str(bad), "--out", str(tmp_path)]) == 2
    assert "power of two" in capsys.readouterr().err
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["kernel-check", "--out", str(blocker / "sub"), "--quiet"]) == 2
    small = tmp_path / "sq.json"
    small.write_text(json.dumps({"n": 64, "band_limit": 8, "trials": 2, "y_levels": 64}))
    # the displayed square-function chain fails on the half-plane
    assert main(["square-report", "--config", str(small), "--out", str(tmp_path / "sq"), "--quiet"]) == 1


def test_registry_covers_experiments():
    from stokes_dtn.experiments import REGISTRY

    assert set(REGISTRY) == set(EXPERIMENTS)
