import json
import os

import pytest

from qct.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_ct_qdyson_example(capsys):
    code, out = run(capsys, "ct", "--family", "qdyson", "--a", "1,1")
    assert code == 0
    assert out.strip() == "1 + q"


def test_ct_bf_trivial(capsys):
    code, out = run(capsys, "ct", "--family", "bf", "--shape", "2",
                    "--a", "0", "--b", "0", "--c", "0")
    assert code == 0
    assert out.strip() == "1"


def test_ct_matches_rhs_subcommand(capsys):
    _, ct_out = run(capsys, "ct", "--family", "bf", "--shape", "1,2",
                    "--a", "1", "--b", "1", "--c", "1")
    _, rhs_out = run(capsys, "rhs", "--family", "bf", "--shape", "1,2",
                     "--a", "1", "--b", "1", "--c", "1")
    assert ct_out == rhs_out


def test_gx_method_agrees_with_brute(capsys):
    _, brute = run(capsys, "ct", "--family", "bf", "--shape", "1,1",
                   "--a", "2", "--b", "1", "--c", "1")
    _, gx = run(capsys, "ct", "--family", "bf", "--shape", "1,1",
                "--a", "2", "--b", "1", "--c", "1", "--method", "gx")
    assert brute == gx


def test_ct_kadell(capsys):
    code, out = run(capsys, "ct", "--family", "kadell", "--v", "1,0",
                    "--r", "1", "--a", "1,1")
    assert code == 0
    _, rhs_out = run(capsys, "rhs", "--family", "kadell", "--v", "1,0",
                     "--r", "1", "--a", "1,1")
    assert out == rhs_out


def test_verify_writes_report(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, out = run(capsys, "verify", "--suite", "poch-identities")
    assert code == 0
    assert "poch-identities: 1 pass, 0 fail, 0 trimmed" in out
    rep = json.loads((tmp_path / "qct-report-poch-identities.json").read_text())
    assert rep["suite"] == "poch-identities"
    assert set(rep) == {"suite", "grid", "cases", "elapsed_ms", "mode"}
    assert rep["cases"][0]["status"] == "pass"


def test_verify_suite_with_flags(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, out = run(capsys, "verify", "--suite", "roots",
                    "--shape", "1,2", "--b", "1", "--c", "1")
    assert code == 0
    assert "1 pass" in out


def test_verify_splitting_single_case(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, out = run(capsys, "verify", "--suite", "splitting", "--shape", "1,1", "--c", "0")
    assert code == 0


def test_stdout_deterministic(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    _, out1 = run(capsys, "verify", "--suite", "qsum", "--seed", "7")
    _, out2 = run(capsys, "verify", "--suite", "qsum", "--seed", "7")
    assert out1 == out2


def test_report_aggregation(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    run(capsys, "verify", "--suite", "qsum")
    run(capsys, "verify", "--suite", "poch-identities")
    code, out = run(capsys, "report", "--dir", str(tmp_path), "--out",
                    str(tmp_path / "summary.json"))
    assert code == 0
    assert "overall: pass" in out
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["status"] == "pass"
    assert len(summary["suites"]) == 2


def test_report_empty_dir(tmp_path, capsys):
    code, out = run(capsys, "report", "--dir", str(tmp_path))
    assert code == 0
    assert "no suite reports" in out


def test_report_flags_red_suite(tmp_path, capsys):
    bad = {
        "suite": "qdyson",
        "grid": {"cases": 1},
        "cases": [{"params": {"a": [1]}, "status": "fail", "witness": {"got": "0"}}],
        "elapsed_ms": 1,
        "mode": "exact",
    }
    (tmp_path / "qct-report-qdyson.json").write_text(json.dumps(bad))
    code, out = run(capsys, "report", "--dir", str(tmp_path))
    assert code == 1
    assert "overall: fail" in out and "FAIL" in out


def test_invalid_flags_exit_nonzero():
    with pytest.raises(SystemExit):
        main(["ct", "--family", "nosuch"])
    with pytest.raises(SystemExit):
        main(["ct", "--family", "qdyson"])  # missing --a


def test_max_seconds_trims(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, out = run(capsys, "verify", "--suite", "bf-recursion", "--max-seconds", "0")
    # with a zero budget every case is trimmed deterministically; exit stays 0
    assert code == 0
    assert "162 trimmed" in out
