"""CLI contract: commands, exit codes, output files."""

import csv
import json

import pytest

from test_config import VALID
from slasim.cli import (
    EXIT_ABORT,
    EXIT_INVALID,
    EXIT_OK,
    REPORT_CSV,
    REPORT_JSON,
    TXLOG_FILE,
    main,
)


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(VALID))
    return path


def run_cli(*args):
    return main([str(a) for a in args])


def test_run_writes_three_files(config_file, tmp_path):
    out = tmp_path / "out"
    assert run_cli("run", "--config", config_file, "--out", out) == EXIT_OK
    for name in (REPORT_JSON, REPORT_CSV, TXLOG_FILE):
        assert (out / name).exists()


def test_malformed_config_names_field(tmp_path, capsys):
    bad = json.loads(json.dumps(VALID))
    del bad["escrow_deposit"]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    assert run_cli("run", "--config", path, "--out", tmp_path / "out") == EXIT_INVALID
    assert "escrow_deposit" in capsys.readouterr().err


def test_seed_override_echoed(config_file, tmp_path):
    out = tmp_path / "out"
    assert run_cli("run", "--config", config_file, "--out", out, "--seed", 777) == EXIT_OK
    report = json.loads((out / REPORT_JSON).read_text())
    assert report["seed"] == 777
    assert report["config"]["seed"] == 777


def test_underfunded_scenario_aborts(tmp_path, capsys):
    broke = json.loads(json.dumps(VALID))
    broke["escrow_deposit"] = 10  # cannot cover the first accrual
    path = tmp_path / "broke.json"
    path.write_text(json.dumps(broke))
    assert run_cli("run", "--config", path, "--out", tmp_path / "out") == EXIT_ABORT
    assert "escrow" in capsys.readouterr().err


def test_replay_unmodified_log(config_file, tmp_path, capsys):
    out = tmp_path / "out"
    run_cli("run", "--config", config_file, "--out", out)
    report = json.loads((out / REPORT_JSON).read_text())
    assert run_cli("replay", "--log", out / TXLOG_FILE) == EXIT_OK
    assert capsys.readouterr().out.strip() == report["digest"]


def test_replay_tampered_log(config_file, tmp_path):
    out = tmp_path / "out"
    run_cli("run", "--config", config_file, "--out", out)
    log = out / TXLOG_FILE
    lines = log.read_text().splitlines()
    for i, line in enumerate(lines[1:], start=1):
        entry = json.loads(line)
        if entry["op"] == "deposit":
            entry["amount"] -= 1
            lines[i] = json.dumps(entry, sort_keys=True)
            break
    log.write_text("\n".join(lines) + "\n")
    assert run_cli("replay", "--log", log) == EXIT_ABORT


def test_replay_garbage_log(tmp_path):
    log = tmp_path / "junk.jsonl"
    log.write_text("junk\n")
    assert run_cli("replay", "--log", log) == EXIT_INVALID


def test_verify_passes(capsys):
    assert run_cli("verify", "--bound", 6) == EXIT_OK
    err = capsys.readouterr().err
    assert "strike rule" in err
    assert "conservation" in err


def test_verify_bound_zero_is_vacuous():
    assert run_cli("verify", "--bound", 0) == EXIT_OK


def test_verify_bound_over_max_rejected():
    assert run_cli("verify", "--bound", 11) == EXIT_INVALID


def test_csv_and_json_agree(config_file, tmp_path):
    out = tmp_path / "out"
    run_cli("run", "--config", config_file, "--out", out)
    report = json.loads((out / REPORT_JSON).read_text())
    with open(out / REPORT_CSV, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == len(report["scps"])
    for csv_row, json_row in zip(rows, report["scps"]):
        assert csv_row["scp"] == json_row["scp"]
        for column in ("earned", "penalized", "withdrawn", "final_credit"):
            assert int(csv_row[column]) == json_row[column]
        timeline = [int(s) for s in csv_row["strikes_timeline"].split(";") if s]
        assert timeline == json_row["strikes_timeline"]
        removal = csv_row["removal_period"]
        assert (None if removal == "" else int(removal)) == json_row["removal_period"]
