import json
import os

import numpy as np
import pandas as pd
import pytest
import yaml

from main import run

CALIBRATION = "data/dbt_calibration.yaml"


def load_yaml(path):
    with open(path, encoding="utf-8") as f:
        return yaml.safe_load(f)


def test_validate_ok(tmp_path):
    assert run(["validate", "data/example_scenario.yaml", "--out", str(tmp_path), "--quiet"]) == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["command"] == "validate"
    assert "data/example_scenario.yaml" in manifest["inputs"]


def test_validate_reports_config_errors(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("molecules:\n  - gamma0: -1\n")
    assert run(["validate", str(bad), "--out", str(tmp_path), "--quiet"]) == 2


def test_missing_input_is_a_data_error(tmp_path):
    assert run(["fit", "sdlaw", "--points", str(tmp_path / "absent.csv"), "--out", str(tmp_path), "--quiet"]) == 3


def test_flat_trace_is_a_fit_error(tmp_path):
    trace = tmp_path / "flat.csv"
    pd.DataFrame({
        "sweep_index": 0,
        "time_s": np.arange(100) * 0.01,
        "detuning_MHz": np.arange(100) * 5.0,
        "counts": 5,
    }).to_csv(trace, index=False)
    assert run(["fit", "voigt", "--trace", str(trace), "--out", str(tmp_path), "--quiet"]) == 4


def test_blue_target_is_infeasible(tmp_path, capsys):
    status = run(["plan", "--target", "100", "--calibration", CALIBRATION, "--out", str(tmp_path), "--quiet"])
    assert status == 5
    assert "target_shift" in capsys.readouterr().err


def test_plan_for_calibrated_molecule(tmp_path):
    assert run(["plan", "--target", "-14000", "--calibration", CALIBRATION, "--out", str(tmp_path), "--quiet"]) == 0
    plan = load_yaml(tmp_path / "plan.yaml")
    assert plan["kind"] == "plan"
    assert plan["predicted_sigma"] == pytest.approx(86.0, abs=0.05)
    assert plan["field"]["e_x"] == pytest.approx(0.0, abs=1e-9)
    assert plan["calibration"]["a_z"] == pytest.approx(0.0445714, rel=1e-5)
    assert plan["schedule"] is None

    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert str(tmp_path / "plan.yaml") in manifest["outputs"]
    assert CALIBRATION in manifest["inputs"]


def test_plan_with_schedule(tmp_path):
    args = ["plan", "--target", "-14000", "--calibration", CALIBRATION, "--operating-voltage", "-25",
            "--out", str(tmp_path), "--quiet"]
    assert run(args) == 0
    schedule = load_yaml(tmp_path / "plan.yaml")["schedule"]
    assert schedule["kind"] == "direct"
    assert schedule["steps"][0]["v_bias"] == pytest.approx(-25.0)


def test_calibrate_then_plan(tmp_path):
    assert run(["calibrate", "--out", str(tmp_path), "--quiet"]) == 0
    calibration = load_yaml(tmp_path / "calibration.yaml")
    assert calibration["derived"]["a_x"] == pytest.approx(1.29733, rel=1e-5)

    plan_dir = tmp_path / "plan"
    args = ["plan", "--target", "-14000", "--calibration", str(tmp_path / "calibration.yaml"),
            "--out", str(plan_dir), "--quiet"]
    assert run(args) == 0
    assert load_yaml(plan_dir / "plan.yaml")["predicted_sigma"] == pytest.approx(86.0, abs=0.05)


def test_scan_is_reproducible(tmp_path):
    for name, seed in (("a", "5"), ("b", "5"), ("c", "6")):
        assert run(["simulate", "scan", "--seed", seed, "--out", str(tmp_path / name), "--quiet"]) == 0
    a = (tmp_path / "a" / "scan.csv").read_bytes()
    assert a == (tmp_path / "b" / "scan.csv").read_bytes()
    assert a != (tmp_path / "c" / "scan.csv").read_bytes()
    assert json.loads((tmp_path / "a" / "manifest.json").read_text())["seed"] == 5


def test_scan_fit_and_report(tmp_path):
    assert run(["simulate", "scan", "--seed", "11", "--out", str(tmp_path), "--quiet"]) == 0
    trace = str(tmp_path / "scan.csv")

    assert run(["fit", "voigt", "--trace", trace, "--out", str(tmp_path), "--quiet"]) == 0
    fit = load_yaml(tmp_path / "voigt_fit.yaml")
    assert fit["center"] == pytest.approx(0.0, abs=30.0)

    assert run(["report", "spectrum", "--trace", trace, "--out", str(tmp_path), "--quiet"]) == 0
    assert (tmp_path / "spectrum_table.csv").exists()
    assert (tmp_path / "spectrum.png").stat().st_size > 0


def test_sdlaw_fit_and_report(tmp_path):
    assert run(["fit", "sdlaw", "--points", "data/sdlaw_points.csv", "--out", str(tmp_path), "--quiet"]) == 0
    fit = load_yaml(tmp_path / "sdlaw_fit.yaml")
    assert fit["a"] == pytest.approx(0.410, abs=0.01)
    assert fit["sigma_e"] == pytest.approx(0.475, abs=0.01)

    assert run(["report", "sdlaw", "--points", "data/sdlaw_points.csv", "--out", str(tmp_path), "--quiet"]) == 0
    assert (tmp_path / "sdlaw_table.csv").exists()
    assert (tmp_path / "sdlaw.png").exists()


def test_parabola_from_centre_table(tmp_path):
    voltages = np.linspace(-100, 50, 16)
    centers = tmp_path / "centers.csv"
    pd.DataFrame({"voltage_V": voltages, "center_MHz": -4.6592 * (voltages + 25.0) ** 2}).to_csv(centers, index=False)
    assert run(["fit", "parabola", "--centers", str(centers), "--out", str(tmp_path), "--quiet"]) == 0
    fit = load_yaml(tmp_path / "parabola_fit.yaml")
    assert fit["kappa_xx"] == pytest.approx(1.82, rel=1e-6)
    assert fit["vertex_voltage"] == pytest.approx(-25.0, abs=1e-6)

    assert run(["report", "parabola", "--centers", str(centers), "--out", str(tmp_path), "--quiet"]) == 0
    assert (tmp_path / "parabola.png").exists()


def test_polarizability(tmp_path):
    args = ["polarizability", "--three-level", "12", "25", "1.6", "2.0", "--out", str(tmp_path), "--quiet"]
    assert run(args) == 0
    result = load_yaml(tmp_path / "polarizability.yaml")
    assert result["kappa"] == pytest.approx(0.06943, rel=1e-3)
    assert result["inside_sanity_band"] is False


def test_output_directory_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("STARKTUNE_OUTPUT_DIR", str(tmp_path / "env"))
    assert run(["calibrate", "--quiet"]) == 0
    assert os.path.exists(tmp_path / "env" / "calibration.yaml")


def test_failed_runs_still_write_a_manifest(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("molecules:\n  - gamma0: -1\n")
    out = tmp_path / "scenario"
    assert run(["simulate", "scenario", "--config", str(bad), "--out", str(out), "--quiet"]) == 2
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["status"] == "failed"
    assert manifest["error"]["type"] == "ConfigError"
    assert manifest["error"]["exit_status"] == 2
    assert str(bad) in manifest["inputs"]
    assert manifest["outputs"] == {}
    assert manifest["finished"]

    out = tmp_path / "plan"
    assert run(["plan", "--target", "100", "--calibration", CALIBRATION, "--out", str(out), "--quiet"]) == 5
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["error"]["binding"] == "target_shift"


def test_successful_run_is_marked_ok(tmp_path):
    assert run(["calibrate", "--out", str(tmp_path), "--quiet"]) == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["status"] == "ok"
    assert manifest["error"] is None
