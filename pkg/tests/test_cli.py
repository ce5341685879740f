"""The railcal command line: exit codes, output, and config precedence."""
from __future__ import annotations

import csv
import os

import pytest

from railcal.cli import main


def run_cli(*argv) -> int:
    return main(list(argv))


def test_health(capsys):
    assert run_cli("health") == 0
    out = capsys.readouterr().out
    assert '"status": "ok"' in out


def test_scenarios(capsys):
    assert run_cli("scenarios") == 0
    out = capsys.readouterr().out
    assert "reference" in out and "crowding_sensitive" in out


def test_fixture(tmp_path, capsys):
    out_dir = str(tmp_path / "case")
    assert run_cli("fixture", "--out", out_dir) == 0
    out = capsys.readouterr().out
    assert "passengers: 27650" in out
    assert os.path.isfile(os.path.join(out_dir, "network.txt"))


def test_generate_from_input(fixture_dir, tmp_path, capsys):
    out_dir = str(tmp_path / "ds")
    code = run_cli("generate", "--out", out_dir, "--input", fixture_dir, "--seed", "0")
    assert code == 0
    out = capsys.readouterr().out
    assert f"dataset written to {out_dir}" in out
    assert "scenario: reference  seed: 0" in out
    assert os.path.isfile(os.path.join(out_dir, "afc.csv"))


def test_generate_unknown_scenario_is_input_error(fixture_dir, tmp_path, capsys):
    code = run_cli("generate", "--out", str(tmp_path / "x"),
                   "--input", fixture_dir, "--scenario", "rush_hour")
    assert code == 1
    assert "unknown scenario" in capsys.readouterr().err


def test_calibrate_writes_report(dataset_dir, tmp_path, capsys):
    out_dir = str(tmp_path / "exp")
    code = run_cli(
        "calibrate", dataset_dir,
        "--algorithms", "nmsa", "--budget", "6", "--replications", "1",
        "--out", out_dir,
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "best_final_Z" in out
    assert "car_capacity" in out
    assert f"report written to {out_dir}" in out
    assert os.path.isfile(os.path.join(out_dir, "traces.csv"))

    assert run_cli("report", out_dir) == 0
    assert "output digests verified" in capsys.readouterr().out


def test_calibrate_rejects_multiple_algorithms(dataset_dir, capsys):
    code = run_cli("calibrate", dataset_dir, "--algorithms", "nmsa,ga", "--budget", "3")
    assert code == 1
    assert "use compare" in capsys.readouterr().err


def test_compare_selected_algorithms(dataset_dir, capsys):
    code = run_cli(
        "compare", dataset_dir,
        "--algorithms", "nmsa,ga", "--budget", "5", "--replications", "1",
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "* deterministic search, run once" in out


def test_report_on_missing_directory(tmp_path, capsys):
    assert run_cli("report", str(tmp_path / "nothing")) == 1
    assert "not an experiment directory" in capsys.readouterr().err


def test_unknown_config_key_is_input_error(dataset_dir, tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("turbo = yes\n")
    code = run_cli("calibrate", dataset_dir, "--config", str(cfg), "--budget", "3")
    assert code == 1
    assert "unknown keys" in capsys.readouterr().err


def test_flag_overrides_config_file(dataset_dir, tmp_path, capsys):
    cfg = tmp_path / "plan.cfg"
    cfg.write_text("budget = 4\nreplications = 1\nalgorithms = nmsa\n")

    from_file = str(tmp_path / "exp_file")
    assert run_cli("calibrate", dataset_dir, "--config", str(cfg), "--out", from_file) == 0
    from_flag = str(tmp_path / "exp_flag")
    assert run_cli("calibrate", dataset_dir, "--config", str(cfg),
                   "--budget", "6", "--out", from_flag) == 0
    capsys.readouterr()

    def n_evals(exp_dir):
        with open(os.path.join(exp_dir, "traces.csv"), newline="") as f:
            return sum(1 for _ in csv.reader(f)) - 1

    assert n_evals(from_file) == 4  # config value beats the default of 100
    assert n_evals(from_flag) == 6  # flag beats the config value


def test_unreachable_server_is_internal_fault(capsys):
    code = run_cli("--server", "http://127.0.0.1:59999", "health")
    assert code == 2
    assert "cannot reach service" in capsys.readouterr().err


def test_missing_subcommand_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        run_cli()
    assert exc.value.code == 2
