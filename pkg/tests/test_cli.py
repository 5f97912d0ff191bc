import csv
import json

import pytest

from wentzell.cli import main


def write_config(tmp_path, cfg, name="run.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg, indent=2))
    return p


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


SMALL_GRID = {"Nr": 8, "Ntheta": 16, "Nt": 32, "T": 1.0}


def test_simulate_conservative_preset_has_negligible_drift(tmp_path):
    cfg = write_config(tmp_path, {"grid": SMALL_GRID, "coefficients": {"preset": "zero"}})
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "a")]) == 0
    rows = read_rows(tmp_path / "a" / "energy.csv")
    assert len(rows) == 33
    assert max(float(r["drift"]) for r in rows) <= 1e-10
    summary = json.loads((tmp_path / "a" / "summary.json").read_text())
    assert "hidden_regularity" in summary
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert manifest["command"] == "simulate" and manifest["exit_code"] == 0
    assert {"energy.csv", "trajectory.wntz", "summary.json"} <= set(manifest["files"])


def test_simulate_is_deterministic(tmp_path):
    cfg = write_config(tmp_path, {"grid": SMALL_GRID, "coefficients": {"preset": "real_well"},
                                  "simulate": {"initial": "low_modes", "control": "pulse"}})
    for out in ("a", "b"):
        assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / out),
                     "--seed", "7"]) == 0
    for name in ("energy.csv", "trajectory.wntz", "summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_delta_not_above_d_is_a_config_error(tmp_path, capsys):
    cfg = write_config(tmp_path, {"coefficients": {"d": 2.0, "delta": 1.0}, "carleman": {}})
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "x")]) == 2
    err = capsys.readouterr().err
    assert "assumption delta > d violated" in err
    assert "run.json:" in err


def test_delta_rule_only_applies_when_blocks_are_active(tmp_path):
    cfg = write_config(tmp_path, {"grid": SMALL_GRID, "coefficients": {"d": 2.0, "delta": 1.0}})
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "x")]) == 0
    assert main(["hum", "--config", str(cfg), "--out", str(tmp_path / "y")]) == 2


@pytest.mark.parametrize("bad,fragment", [
    ({"grid": {"Nr": 4}}, "Nr"),
    ({"grid": {"Ntheta": 17}}, "even"),
    ({"coefficients": {"d": -1.0}}, "d"),
    ({"coefficients": {"preset": "nope"}}, "preset"),
    ({"geometry": {"radius": 3.0}}, "radius"),
])
def test_invalid_configs_exit_with_code_two(tmp_path, capsys, bad, fragment):
    cfg = write_config(tmp_path, bad)
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "x")]) == 2
    assert fragment in capsys.readouterr().err


def test_malformed_json_reports_line(tmp_path, capsys):
    p = tmp_path / "broken.json"
    p.write_text('{\n  "grid": {\n    "Nr": 8,,\n  }\n}\n')
    assert main(["simulate", "--config", str(p)]) == 2
    assert "broken.json:3:" in capsys.readouterr().err


@pytest.fixture(scope="module")
def carleman_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("carleman")
    cfg = write_config(out, {"carleman": {"refine": True}})
    code = main(["carleman", "--config", str(cfg), "--out", str(out / "run"), "--threads", "2"])
    return code, out / "run"


def test_carleman_cells_have_nonnegative_ratios_and_flag(carleman_run):
    code, run = carleman_run
    assert code == 0
    rows = read_rows(run / "sweep.csv")
    assert len(rows) == 36
    for r in rows[:3]:
        assert float(r["ratio"]) >= 0
    assert all(r["delta_gt_d"] == "true" for r in rows)


def test_carleman_refinement_changes_constant_below_one_percent(carleman_run):
    _, run = carleman_run
    summary = json.loads((run / "summary.json").read_text())
    assert summary["refinement_delta"] <= 1e-2
    assert summary["C"] > 0


HUM_BASE = {"grid": SMALL_GRID, "coefficients": {"preset": "rotation_drift"},
            "hum": {"observability_T": [1.0], "cutoff": 8, "n_modes": 3}}


def test_hum_zero_target_gives_empty_control(tmp_path):
    cfg = write_config(tmp_path, {**HUM_BASE, "hum": {**HUM_BASE["hum"], "target": "zero"}})
    assert main(["hum", "--config", str(cfg), "--out", str(tmp_path / "h")]) == 0
    rows = read_rows(tmp_path / "h" / "control.csv")
    assert rows == []
    diag = json.loads((tmp_path / "h" / "diagnostics.json").read_text())
    assert diag["iterations"] == 0


def test_hum_steers_default_target(tmp_path):
    cfg = write_config(tmp_path, HUM_BASE)
    assert main(["hum", "--config", str(cfg), "--out", str(tmp_path / "h")]) == 0
    diag = json.loads((tmp_path / "h" / "diagnostics.json").read_text())
    assert diag["converged"] and diag["steering_error"] <= 1e-3
    obs = read_rows(tmp_path / "h" / "observability.csv")
    assert obs[0]["observable"] == "true"


def test_hum_masked_boundary_gives_infinite_constant(tmp_path):
    cfg = write_config(tmp_path, {**HUM_BASE, "hum": {**HUM_BASE["hum"], "mask": "none",
                                                      "target": "zero"}})
    assert main(["hum", "--config", str(cfg), "--out", str(tmp_path / "h")]) == 0
    obs = read_rows(tmp_path / "h" / "observability.csv")
    assert obs[0]["C_obs"] == "inf" and obs[0]["observable"] == "false"


def test_verify_passes_on_defaults(tmp_path, capsys):
    cfg = write_config(tmp_path, {"grid": SMALL_GRID})
    assert main(["verify", "--config", str(cfg), "--out", str(tmp_path / "v")]) == 0
    rows = read_rows(tmp_path / "v" / "verify.csv")
    assert {r["check"] for r in rows} == {"adjointness", "conservation", "green_identity",
                                          "conjugation_identity", "gauge_round_trip"}
    assert all(r["passed"] == "true" for r in rows)
    assert capsys.readouterr().out.count("PASS") == 5


def test_verify_names_the_injected_failure(tmp_path, capsys):
    cfg = write_config(tmp_path, {"grid": SMALL_GRID,
                                  "verify": {"fault": "flux_normal_derivative"}})
    assert main(["verify", "--config", str(cfg), "--out", str(tmp_path / "v")]) == 1
    out = capsys.readouterr().out
    assert "FAIL adjointness" in out
    assert "failing checks: adjointness" in out
    manifest = json.loads((tmp_path / "v" / "manifest.json").read_text())
    assert manifest["exit_code"] == 1
