import json
import subprocess
import sys

import pytest

from holotransit.cli import main, read_members


def run(*argv) -> int:
    return main([str(a) for a in argv])


def test_analyze_writes_report_and_svg(tmp_path, capsys):
    out, svg = tmp_path / "r.json", tmp_path / "r.svg"
    assert run("analyze", "--config", "configs/rotation.json", "--out", out, "--svg", svg) == 0
    doc = json.loads(out.read_text())
    assert doc["transitivity"]["status"] == "RefutedAtHorizon"
    assert svg.read_text().startswith("<?xml")
    assert "RefutedAtHorizon" in capsys.readouterr().out


def test_usage_errors_exit_1(tmp_path):
    with pytest.raises(SystemExit) as exc:
        run("analyze")
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        run("frobnicate")
    assert exc.value.code == 1
    assert run("analyze", "--config", tmp_path / "missing.json", "--out", tmp_path / "r.json") == 1
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema_version": 1, "fooo": 2}')
    assert run("analyze", "--config", bad, "--out", tmp_path / "r.json") == 1
    assert not (tmp_path / "r.json").exists()


def test_execution_failure_exits_2(tmp_path):
    cfg = json.loads(open("configs/rotation.json").read())
    cfg["maps"] = cfg["maps"][:1]              # a single operator is outside the hypothesis
    path = tmp_path / "one.json"
    path.write_text(json.dumps(cfg))
    assert run("analyze", "--config", path, "--out", tmp_path / "r.json") == 2


def test_incomplete_report_is_written_with_exit_2(tmp_path):
    cfg = json.loads(open("configs/witness.json").read())
    cfg["witness"]["basis"]["poles"] = [[0.5, 0]]
    path = tmp_path / "w.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "r.json"
    assert run("witness", "--config", path, "--n", 3, "--out", out) == 2
    assert json.loads(out.read_text())["status"] == "incomplete"


def test_classify_verb(tmp_path, capsys):
    members = tmp_path / "m.txt"
    members.write_text(" ".join(str(n) for n in range(2, 101, 2)))
    out = tmp_path / "v.json"
    assert run("classify", "--members", members, "--horizon", 100, "--family", "syndetic",
               "--param", 2, "--out", out) == 0
    v = json.loads(out.read_text())
    assert v["status"] == "ConsistentUpToHorizon" and v["family"] == {"kind": "syndetic", "param": 2}
    assert json.loads(capsys.readouterr().out) == v
    assert run("classify", "--members", members, "--horizon", 50, "--family", "infinite") == 1
    assert run("classify", "--members", members, "--horizon", 100, "--family", "thick") == 1


def test_read_members_formats(tmp_path):
    p = tmp_path / "m"
    p.write_text("[3, 1, 2]")
    assert read_members(p) == [3, 1, 2]
    p.write_text("1, 2\n5")
    assert read_members(p) == [1, 2, 5]
    p.write_text("[1.5]")
    with pytest.raises(ValueError):
        read_members(p)


def test_witness_verb(tmp_path):
    out = tmp_path / "w.json"
    assert run("witness", "--config", "configs/witness.json", "--n", 3, "--out", out) == 0
    w = json.loads(out.read_text())["witness"]
    assert w["check"]["ok"] and w["degree"] <= 60 and max(w["check"]["errors"]) < 1e-6
    with pytest.raises(SystemExit):
        run("witness", "--config", "configs/witness.json", "--out", out)


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "holotransit.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "analyze" in res.stdout
