import subprocess
import sys

import pytest

from tseng_vi.cli import cli


def test_validate_exit_codes(capsys):
    assert cli(["validate", "--alpha", "0.1", "--beta", "-0.05", "--mu", "0.5"]) == 0
    assert "feasible" in capsys.readouterr().out
    assert cli(["validate", "--alpha", "0.2", "--beta", "0", "--mu", "0.5"]) == 1
    assert "A2a" in capsys.readouterr().err


def test_validate_bad_mu(capsys):
    assert cli(["validate", "--alpha", "0.1", "--beta", "0", "--mu", "1.5"]) == 2


def test_list_prints_methods(capsys):
    assert cli(["list"]) == 0
    out = capsys.readouterr().out
    methods = out.split("methods:")[1].split()
    assert len(methods) == 8 and "alg3" in methods


def test_beta_range(capsys):
    assert cli(["beta-range", "--alpha", "0.1", "--mu", "0.5"]) == 0
    assert capsys.readouterr().out.strip().endswith("0]")
    assert cli(["beta-range", "--alpha", "0.3", "--mu", "0.5"]) == 2


def test_oracle_csv(capsys):
    assert cli(["oracle", "--problem", "quasi-square-1d"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "set,index,x0"
    assert [ln.split(",")[0] for ln in lines[1:]] == ["S", "S", "S_D"]


def test_usage_errors(capsys):
    assert cli([]) == 2
    assert cli(["frobnicate"]) == 2
    assert cli(["oracle", "--problem", "nope"]) == 2


def test_run_paths(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("problems: [identity-box]\nmethods: [alg3]\nstarts: [0.5]\n")
    assert cli(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    assert (tmp_path / "o" / "summary.csv").is_file()
    bad = tmp_path / "bad.yaml"
    bad.write_text("problems: [identity-box]\nmethods: [alg3]\nparams: {alpha: 0.2}\n")
    assert cli(["run", "--config", str(bad)]) == 1
    assert "A2a" in capsys.readouterr().err
    assert cli(["run", "--config", str(tmp_path / "missing.yaml")]) == 2
    assert cli(["run", "--config", str(cfg), "--jobs", "0"]) == 2


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "tseng_vi", "list"], capture_output=True,
                         text=True, check=True)
    assert "alg3" in out.stdout
