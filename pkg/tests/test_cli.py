from __future__ import annotations

import subprocess
import sys

import pytest

from ctlsearch.cli import build_parser, main


def test_robot_campaign(tmp_path, capsys):
    out = tmp_path / "D"
    assert main(["robot", "--kind", "wide", "--precision", "coarse", "--trials", "2",
                 "--seed", "7", "--out", str(out), "--jobs", "1"]) == 0
    assert {p.name for p in out.iterdir()} >= {"aggregates.csv", "curves.csv", "chart.svg"}
    assert "robot wide/coarse" in capsys.readouterr().out


def test_rerun_is_byte_identical(tmp_path):
    dirs = [tmp_path / "a", tmp_path / "b"]
    for d in dirs:
        assert main(["synthetic", "--sweep", "precision", "--values", "2,3", "--trials", "2",
                     "--seed", "3", "--out", str(d), "--jobs", "1"]) == 0
    names = sorted(p.name for p in dirs[0].iterdir())
    assert names == sorted(p.name for p in dirs[1].iterdir())
    assert any(n.endswith(".svg") for n in names)
    for n in names:
        assert (dirs[0] / n).read_bytes() == (dirs[1] / n).read_bytes()


def test_bad_sweep_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["synthetic", "--sweep", "nonsense"])
    assert exc.value.code == 2
    err = capsys.readouterr().err
    assert "invalid choice" in err and "usage:" in err


def test_unknown_flag_rejected():
    with pytest.raises(SystemExit) as exc:
        main(["robot", "--warp", "9"])
    assert exc.value.code == 2


def test_bad_algorithm_is_usage_error(tmp_path):
    assert main(["synthetic", "--algorithms", "rrhc,anneal", "--out", str(tmp_path)]) == 2


def test_world_generate_and_validate(tmp_path, capsys):
    assert main(["world", "--kind", "thin", "--seed", "4", "--out", str(tmp_path)]) == 0
    path = tmp_path / "world_thin_4.txt"
    assert path.exists()
    assert main(["world", "--validate", str(path)]) == 0
    path.write_text(path.read_text().replace("version 1", "version 9"))
    assert main(["world", "--validate", str(path)]) == 1
    assert main(["world", "--validate", str(tmp_path / "nope.txt")]) == 1


def test_eval(capsys):
    assert main(["eval", "1", "2", "3"]) == 0
    assert "cost" in capsys.readouterr().out
    assert main(["eval", "--scenario", "robot", "4", "4", "4", "4"]) == 0
    assert main(["eval", "--scenario", "robot", "4", "4", "4"]) == 2
    assert main(["eval", "--scenario", "robot", "4", "4", "4", "99"]) == 2


def test_out_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("CTLSEARCH_OUT", str(tmp_path / "env"))
    assert main(["world"]) == 0
    assert (tmp_path / "env" / "world_wide_0.txt").exists()


def test_help_lists_units():
    parser = build_parser()
    sub = parser._subparsers._group_actions[0].choices
    text = sub["robot"].format_help()
    for flag in ("--seed", "--trials", "--algorithms", "--benchmarks", "--max-cycles", "--out",
                 "--jobs", "--kind", "--precision", "--cycles"):
        assert flag in text
    assert "search cycles" in text and " m)" in text
    assert "--sweep" in sub["synthetic"].format_help()
    assert "(default:" in sub["synthetic"].format_help()


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "ctlsearch", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "synthetic" in r.stdout
