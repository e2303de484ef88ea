import json
import subprocess
import sys

import pytest

from bielliptic import cli

# (argv, expected exit code, expected verdict)
GOLDEN = [
    (["curve", "info", "33.a2"], 0, "verified"),
    (["curve", "reduction", "33.a2", "-p", "11"], 0, "verified"),
    (["curve", "reduction", "198.a2", "-p", "2"], 0, "verified"),
    (["curve", "torsion", "33.a2"], 0, "verified"),
    (["curve", "torsion", "198.a2", "-p", "11", "--padic"], 0, "verified"),
    (["curve", "torsion", "0,1", "-p", "7"], 0, "verified"),
    (["curve", "count", "1,1", "-p", "101"], 0, "verified"),
    (["surface", "table"], 0, "verified"),
    (["surface", "covers"], 0, "verified"),
    (["surface", "bound", "--type", "7"], 0, "verified"),
    (["cycles", "verify", "--type", "1", "--universal"], 0, "verified"),
    (["cycles", "verify", "--type", "5", "--universal"], 0, "verified"),
    (["cycles", "verify", "--type", "1", "--fp", "47", "--curve1", "-4,0", "--curve2", "0,5"], 0, "verified"),
    (["cycles", "verify", "--type", "5", "--fp", "19", "--curve1", "0,1", "--curve2", "0,5"], 0, "verified"),
    (["cycles", "replay", "--script", "type1_main"], 0, "verified"),
    (["cycles", "replay", "--script", "composite_reduction", "--degree", "3"], 0, "verified"),
    (["brauer", "witness", "--e1", "33.a2", "--e2", "198.a2", "-p", "11"], 0, "verified"),
    (["brauer", "witness", "--e1", "33.a2", "--e2", "33.a2", "-p", "11"], 1, "conditional"),
    (["brauer", "witness", "--e1", "33.a2", "--e2", "1,1", "-p", "11"], 2, "error"),
    (["curve", "info", "-3,2"], 2, "error"),
    (["curve", "reduction", "33.a2", "-p", "12"], 2, "error"),
    (["cycles", "verify", "--type", "1"], 2, "error"),
    (["cycles", "verify", "--type", "5", "--fp", "11", "--curve1", "0,1", "--curve2", "0,1"], 2, "error"),
    (["cycles", "replay", "--script", "nope"], 2, "error"),
    (["surface", "bound", "--bogus"], 2, "error"),
    (["frobnicate"], 2, "error"),
]


@pytest.mark.parametrize("argv, code, verdict", GOLDEN)
def test_golden_exit_codes(argv, code, verdict):
    got, report = cli.run_command(argv)
    assert (got, report.verdict) == (code, verdict)
    assert report.verdict in cli.VERDICTS


@pytest.mark.parametrize("argv, code, verdict", GOLDEN)
def test_json_round_trip(argv, code, verdict):
    _, report = cli.run_command(argv + ["--json"] if argv[0] != "frobnicate" else argv)
    text = report.to_json()
    assert cli.dumps(json.loads(text)) == text
    assert set(json.loads(text)) == {"command", "result", "verdict", "provenance"}


def test_replay_of_refuted_script(tmp_path):
    path = tmp_path / "bad.drv"
    path.write_text("@e1 P P0:2\n@e2 Q\n@claim z(P0,Q) => 0\n(a) bilinearity : z(P0,Q) => 0\n")
    code, report = cli.run_command(["cycles", "replay", "--script", str(path)])
    assert code == 1 and report.verdict == "refuted"
    assert report.result["failing_step"] == "a"


def test_key_payloads():
    _, r = cli.run_command(["surface", "bound", "--type", "7"])
    assert r.result["bound"] == 24
    _, r = cli.run_command(["cycles", "verify", "--type", "1", "--universal"])
    assert r.result["z_order"] == 2 and r.result["bound"] == 4
    _, r = cli.run_command(["brauer", "witness", "--e1", "33.a2", "--e2", "198.a2", "-p", "11"])
    assert r.result["conclusion"] is True and r.result["working_field"] == "Q_11"
    _, r = cli.run_command(["brauer", "witness", "--e1", "33.a2", "--e2", "1,1", "-p", "11"])
    assert r.result["citation"] == "T(X) is 2-divisible"
    _, r = cli.run_command(["surface", "bound", "--bogus"])
    assert "usage" in r.result


def test_catalog_check(tmp_path):
    good = tmp_path / "g.jsonl"
    good.write_text('{"label": "e", "a": [0, 1]}\n')
    code, r = cli.run_command(["catalog", "check", str(good)])
    assert code == 0 and r.result["count"] == 1
    bad = tmp_path / "b.jsonl"
    bad.write_text('{"label": "e", "a": [0, 0]}\n')
    code, r = cli.run_command(["catalog", "check", str(bad)])
    assert code == 2 and "line 1" in r.result["error"]


def test_custom_catalog_option(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text('{"label": "mine", "a": [0, 1]}\n')
    code, r = cli.run_command(["curve", "info", "mine", "--catalog", str(path)])
    assert code == 0 and r.result["j"] == 0


def test_enumeration_bound_env(monkeypatch):
    monkeypatch.setenv("BIELLIPTIC_ENUM_BOUND", "50")
    code, r = cli.run_command(["curve", "count", "1,1", "-p", "101"])
    assert code == 2 and r.result["kind"] == "ResourceError"


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "bielliptic", "--json", "surface", "bound", "--type", "1"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout)["result"]["bound"] == 8
    out = subprocess.run([sys.executable, "-m", "bielliptic", "surface", "bound", "--bogus"],
                         capture_output=True, text=True)
    assert out.returncode == 2 and "usage" in out.stderr
    out = subprocess.run([sys.executable, "-m", "bielliptic", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "bielliptic" in out.stdout
