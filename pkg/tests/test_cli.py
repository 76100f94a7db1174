import json
import subprocess
import sys

import pytest

from amalgam_lab import cli
from amalgam_lab.cli import (EXIT_FAILED, EXIT_INCONCLUSIVE, EXIT_INVALID, EXIT_OK, REPORT_SCHEMA, RunConfig, main,
                             run)
from amalgam_lab.homotopy import TRIVIAL


def _main(tmp_path, *args):
    out = tmp_path / "report.json"
    code = main(list(args) + ["--out", str(out)])
    return code, json.loads(out.read_text())


def test_geometry_verified(tmp_path):
    code, rep = _main(tmp_path, "geometry", "--q", "2", "--n", "4")
    assert code == EXIT_OK
    assert rep["schema"] == REPORT_SCHEMA and rep["status"] == "verified"
    assert rep["result"]["type_counts"] == [15, 20, 15] and rep["result"]["chambers"] == 180
    assert rep["result"]["phi_certified"]


def test_exceptional_pi1_matches_expectation(tmp_path):
    code, rep = _main(tmp_path, "pi1", "--pi", "--q", "2", "--n", "6")
    assert code == EXIT_OK
    assert rep["result"]["verdict"]["order"] == 2 and rep["result"]["expected"] == ["nontrivial", 2]


@pytest.mark.parametrize("args", [
    ["geometry", "--q", "7"],
    ["geometry", "--n", "9"],
    ["geometry", "--n", "4", "--d", "1"],
    ["pi1", "--max-cosets", "0"],
    ["cover", "--q", "2", "--n", "4"],
    ["action", "--n", "5"],
    ["amalgam", "--q", "5", "--n", "4", "--slim"],
    ["geometry", "--pi", "--n", "3"],
])
def test_invalid_configurations(tmp_path, args):
    code, rep = _main(tmp_path, *args)
    assert code == EXIT_INVALID
    assert rep["status"] == "invalid" and rep["error"]


def test_inconclusive_budget_and_time_limit(tmp_path):
    code, rep = _main(tmp_path, "amalgam", "--q", "3", "--n", "4", "--slim", "--max-cosets", "20")
    assert code == EXIT_INCONCLUSIVE and rep["result"]["verdict"]["iso"] == "inconclusive"
    code, rep = _main(tmp_path, "action", "--q", "2", "--n", "6", "--time-limit", "0.01")
    assert code == EXIT_INCONCLUSIVE and rep["status"] == "inconclusive"


def test_failed_expectation_exits_one(monkeypatch):
    # pretend the exceptional geometry were claimed simply connected
    monkeypatch.setattr(cli, "_pi1_expectation", lambda cfg: (TRIVIAL, 1))
    code, rep = run(RunConfig("pi1", q=2, n=6, pi=True))
    assert code == EXIT_FAILED and rep["status"] == "failed"


def test_amalgam_reports(tmp_path):
    code, rep = _main(tmp_path, "amalgam", "--q", "2", "--n", "4")
    assert code == EXIT_OK and rep["result"]["verdict"]["completion_order"] == 720
    assert rep["result"]["manifest"]["schema"] == "amalgam/1"
    code, rep = _main(tmp_path, "amalgam", "--q", "2", "--n", "4", "--slim")
    assert code == EXIT_OK and not rep["result"]["verdict"]["asserted"]


def test_cover_command_reports_distance_conflict(tmp_path):
    code, rep = _main(tmp_path, "cover", "--q", "2", "--n", "6")
    assert code == EXIT_OK
    r = rep["result"]
    assert r["type_counts"] == [32, 240, 160, 60]
    assert r["distances"]["d(Q+,Q-)"] == 3 and r["all_other_pairs_within_two"] is False
    assert len(r["geometry"]["signs"]) == 492


def test_no_timing_is_byte_identical(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["all", "--q", "2", "--n", "4", "--no-timing", "--out", str(p)]) == EXIT_OK
    a, b = (p.read_bytes() for p in paths)
    assert a == b
    assert b"seconds" not in a


def test_console_entry_points():
    out = subprocess.run([sys.executable, "-m", "amalgam_lab", "geometry", "--q", "2", "--n", "3"],
                         capture_output=True, text=True, timeout=120)
    assert out.returncode == EXIT_OK
    assert json.loads(out.stdout)["config"]["n"] == 3
    assert "status: verified" in out.stderr
    ver = subprocess.run([sys.executable, "-m", "amalgam_lab", "--version"], capture_output=True, text=True)
    assert ver.returncode == 0 and ver.stdout.strip()
