"""End-to-end tests for the config-driven command line tool."""

import csv
import json
import math

import pytest

from pinchnet import cli
from pinchnet.errors import ConfigError, NumericError


def _write(tmp_path, text, name="config.yaml"):
    path = tmp_path / name
    path.write_text(text)
    return path


def _read_rows(out_dir):
    with open(out_dir / "results.csv", newline="") as handle:
        return list(csv.DictReader(handle))


# ---------------------------------------------------------------- loading

def test_minimal_config_gets_paper_defaults(tmp_path):
    cfg = cli.load_config(_write(tmp_path, "mode: analyze\n"))
    assert cfg.mode == "analyze"
    assert cfg.params.f_c == 28e9
    assert cfg.params.N_L == 3
    assert cfg.params.N_N == 2
    # -174 dBm/Hz over 100 MHz comes to -94 dBm
    assert cfg.params.sigma2 == pytest.approx(10 ** (-12.4), rel=1e-12)
    assert cfg.sweep is None


def test_dbm_strings_convert_once(tmp_path):
    cfg = cli.load_config(_write(tmp_path, (
        "mode: analyze\n"
        "params:\n"
        "  P: \"30 dBm\"\n"
        "  sigma2: \"-94 dBm\"\n")))
    assert cfg.params.P == pytest.approx(1.0, rel=1e-12)
    assert cfg.params.sigma2 == pytest.approx(10 ** (-12.4), rel=1e-12)


def test_lambda_alias(tmp_path):
    cfg = cli.load_config(_write(tmp_path, (
        "mode: analyze\n"
        "params: {lambda: 2.0e-6}\n")))
    assert cfg.params.lam == 2.0e-6


def test_bandwidth_sets_noise_floor(tmp_path):
    cfg = cli.load_config(_write(tmp_path, (
        "mode: analyze\n"
        "params: {bandwidth: 1.0e6}\n")))
    # 20 dB less bandwidth than the default floor
    assert cfg.params.sigma2 == pytest.approx(10 ** (-14.4), rel=1e-12)


def test_bandwidth_with_sigma2_conflicts(tmp_path):
    path = _write(tmp_path, (
        "mode: analyze\n"
        "params: {bandwidth: 1.0e8, sigma2: 1.0e-12}\n"))
    with pytest.raises(ConfigError, match="bandwidth"):
        cli.load_config(path)


def test_even_preset_count_rejected(tmp_path):
    path = _write(tmp_path, "mode: analyze\nparams: {Np: 10}\n")
    with pytest.raises(ConfigError, match="Np"):
        cli.load_config(path)


def test_waveguide_longer_than_cluster_rejected(tmp_path):
    path = _write(tmp_path, "mode: analyze\nparams: {L: 40.0, R: 20.0}\n")
    with pytest.raises(ConfigError, match="params"):
        cli.load_config(path)


def test_missing_mode_rejected(tmp_path):
    with pytest.raises(ConfigError, match="mode"):
        cli.load_config(_write(tmp_path, "params: {Np: 11}\n"))


def test_unknown_mode_rejected(tmp_path):
    with pytest.raises(ConfigError, match="mode"):
        cli.load_config(_write(tmp_path, "mode: plot\n"))


def test_unknown_param_rejected(tmp_path):
    path = _write(tmp_path, "mode: analyze\nparams: {Npp: 11}\n")
    with pytest.raises(ConfigError, match="Npp"):
        cli.load_config(path)


def test_unknown_top_level_key_rejected(tmp_path):
    with pytest.raises(ConfigError, match="modee"):
        cli.load_config(_write(tmp_path, "modee: analyze\n"))


def test_sweep_must_name_system_parameter(tmp_path):
    path = _write(tmp_path, (
        "mode: analyze\n"
        "sweep: {parameter: K, values: [50, 100]}\n"))
    with pytest.raises(ConfigError, match="sweep.parameter"):
        cli.load_config(path)


def test_sweep_values_validated_up_front(tmp_path):
    path = _write(tmp_path, (
        "mode: analyze\n"
        "sweep: {parameter: Np, values: [3, 4, 5]}\n"))
    with pytest.raises(ConfigError, match=r"sweep.values\[1\]"):
        cli.load_config(path)


def test_overrides_apply_before_validation(tmp_path):
    path = _write(tmp_path, "mode: analyze\nparams: {Np: 11}\n")
    cfg = cli.load_config(path, ["params.Np=21", "mode=bounds",
                                 "params.P=30 dBm"])
    assert cfg.params.Np == 21
    assert cfg.mode == "bounds"
    assert cfg.params.P == pytest.approx(1.0, rel=1e-12)


def test_override_requires_key_value(tmp_path):
    path = _write(tmp_path, "mode: analyze\n")
    with pytest.raises(ConfigError, match="--set"):
        cli.load_config(path, ["params.Np"])


# ---------------------------------------------------------------- running

def test_analyze_sweep_monotone_in_presets(tmp_path):
    path = _write(tmp_path, (
        "mode: analyze\n"
        "params: {Rbar: 2.0}\n"
        "sweep: {parameter: Np, values: [3, 5, 11, 21]}\n"))
    out = tmp_path / "out"
    assert cli.main([str(path), "--out", str(out)]) == 0
    rows = _read_rows(out)
    outages = [float(r["analytic_outage"]) for r in rows]
    assert [int(float(r["swept_value"])) for r in rows] == [3, 5, 11, 21]
    assert all(a >= b - 1e-15 for a, b in zip(outages, outages[1:]))
    assert all(r["sim_outage"] == "" for r in rows)
    assert all(r["error"] == "" for r in rows)


def test_bounds_mode_brackets_outage(tmp_path):
    path = _write(tmp_path, "mode: bounds\nparams: {Rbar: 2.0}\n")
    out = tmp_path / "out"
    assert cli.main([str(path), "--out", str(out)]) == 0
    (row,) = _read_rows(out)
    lower = float(row["lower_bound"])
    mid = float(row["analytic_outage"])
    upper = float(row["upper_bound"])
    assert lower <= mid + 1e-12
    assert mid <= upper + 1e-12


def test_simulate_same_seed_byte_identical(tmp_path):
    path = _write(tmp_path, (
        "mode: simulate\n"
        "sim: {n_realizations: 2000, seed: 7}\n"))
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert cli.main([str(path), "--out", str(out_a)]) == 0
    assert cli.main([str(path), "--out", str(out_b)]) == 0
    assert (out_a / "results.csv").read_bytes() == (out_b / "results.csv").read_bytes()


def test_worker_count_does_not_change_csv(tmp_path):
    path = _write(tmp_path, (
        "mode: simulate\n"
        "sim: {n_realizations: 2000, seed: 7, batch_size: 250}\n"))
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert cli.main([str(path), "--out", str(out_a)]) == 0
    assert cli.main([str(path), "--out", str(out_b), "--set",
                     "sim.workers=3"]) == 0
    assert (out_a / "results.csv").read_bytes() == (out_b / "results.csv").read_bytes()


def test_compare_mode_flags_agreement(tmp_path):
    path = _write(tmp_path, (
        "mode: compare\n"
        "params: {Rbar: 3.0}\n"
        "sim: {n_realizations: 4000, seed: 11}\n"))
    out = tmp_path / "out"
    assert cli.main([str(path), "--out", str(out)]) == 0
    (row,) = _read_rows(out)
    assert row["agreement"] == "true"
    assert float(row["sim_std_error"]) >= 0.0


def test_rate_mode_runs_both_engines(tmp_path):
    path = _write(tmp_path, (
        "mode: rate\n"
        "sim: {n_realizations: 1500, seed: 3}\n"))
    out = tmp_path / "out"
    assert cli.main([str(path), "--out", str(out)]) == 0
    (row,) = _read_rows(out)
    analytic = float(row["analytic_rate"])
    simulated = float(row["sim_rate"])
    se = float(row["sim_std_error"])
    assert abs(analytic - simulated) <= 5.0 * se
    assert row["analytic_outage"] == ""


def test_report_echo_reproduces_csv(tmp_path):
    path = _write(tmp_path, (
        "mode: analyze\n"
        "bounds: true\n"
        "params: {Rbar: 2.0, P: \"20 dBm\"}\n"
        "sweep: {parameter: Np, values: [3, 11]}\n"))
    out_a = tmp_path / "a"
    assert cli.main([str(path), "--out", str(out_a)]) == 0
    report = json.loads((out_a / "report.json").read_text())
    assert report["version"]
    assert report["seed"] == 12345

    echo_path = tmp_path / "echo.json"
    echo_path.write_text(json.dumps(report["config"]))
    out_b = tmp_path / "b"
    assert cli.main([str(echo_path), "--out", str(out_b)]) == 0
    assert (out_a / "results.csv").read_bytes() == (out_b / "results.csv").read_bytes()


def test_report_rows_carry_wall_times(tmp_path):
    path = _write(tmp_path, "mode: analyze\n")
    out = tmp_path / "out"
    assert cli.main([str(path), "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    (row,) = report["rows"]
    assert row["wall_time_analysis"] > 0.0
    assert row["wall_time_sim"] is None
    with open(out / "results.csv") as handle:
        header = handle.readline().strip().split(",")
    assert "wall_time_analysis" not in header


def test_numeric_failure_marks_row_and_exit_status(tmp_path, monkeypatch):
    calls = {"n": 0}
    real = cli.outage_probability

    def flaky(inputs, acfg):
        calls["n"] += 1
        if calls["n"] == 2:
            raise NumericError("synthetic instability")
        return real(inputs, acfg)

    monkeypatch.setattr(cli, "outage_probability", flaky)
    path = _write(tmp_path, (
        "mode: analyze\n"
        "params: {Rbar: 2.0}\n"
        "sweep: {parameter: Np, values: [3, 5, 11]}\n"))
    out = tmp_path / "out"
    assert cli.main([str(path), "--out", str(out)]) == 1
    rows = _read_rows(out)
    assert len(rows) == 3
    assert rows[0]["error"] == ""
    assert "synthetic instability" in rows[1]["error"]
    assert rows[1]["analytic_outage"] == ""
    assert rows[2]["error"] == ""


def test_config_error_exit_code(tmp_path, capsys):
    path = _write(tmp_path, "mode: analyze\nparams: {Np: 10}\n")
    assert cli.main([str(path)]) == 2
    assert "Np" in capsys.readouterr().err


def test_missing_file_exit_code(tmp_path, capsys):
    assert cli.main([str(tmp_path / "absent.yaml")]) == 2
    assert "no such config" in capsys.readouterr().err


def test_nine_significant_digit_cells():
    assert cli._format_cell(0.0012345678912345) == "0.00123456789"
    assert cli._format_cell(1.0) == "1"
    assert cli._format_cell(None) == ""
    assert cli._format_cell(True) == "true"
    assert cli._format_cell(21) == "21"
