import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from maxhyp.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def test_speeds_canonical(capsys):
    assert main(["speeds", "--state", "0,0,1,1,0,0,1", "--nu", "1,0"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert abs(out["speeds"][-1] - 3 ** 0.5) < 1e-8
    assert abs(out["max_speed_closed_form"] - 3 ** 0.5) < 1e-12


def test_speeds_normalizes_direction(capsys):
    assert main(["speeds", "--state", "0,0,1,1,0,0,1,1,0,1", "--nu", "0,3"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["nu"] == [0.0, 1.0]
    assert abs(out["speeds"][-1] - 2.0) < 1e-8


def test_speeds_bad_state(capsys):
    assert main(["speeds", "--state", "0,0,1", "--nu", "1,0"]) == 1
    assert "7 or 10" in capsys.readouterr().err
    assert main(["speeds", "--state", "0,0,-1,1,0,0,1", "--nu", "1,0"]) == 1


def test_run_writes_manifest(tmp_path, capsys):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[run]\nsystem = ucm10\nscenario = shear1d_mode\nt_end = 0.1\n"
                   "[params]\nlambda = 1\n[scenario]\nn = 32\ntol = 1e-2\n")
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "PASS l2_error" in text and "content_hash" in text
    assert (out / "manifest.json").exists()


def test_run_parse_error(tmp_path, capsys):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[run]\nsytem = ucm10\n")
    assert main(["run", "--config", str(cfg)]) == 1
    assert "did you mean 'system'" in capsys.readouterr().err


def test_missing_file(capsys):
    assert main(["run", "--config", "/nonexistent.ini"]) == 1


def test_audit_small(capsys):
    assert main(["audit-symmetry", "--system", "elasto7", "--samples", "5", "--seed", "2"]) == 0
    assert "PASS symmetry_defect" in capsys.readouterr().out


def test_converge_shear(tmp_path, capsys):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[run]\nsystem = ucm10\nscenario = shear1d_mode\nt_end = 0.5\n"
                   "[params]\nlambda = 1\n[scenario]\nn = 32\n")
    assert main(["converge", "--config", str(cfg), "--levels", "3",
                 "--out", str(tmp_path / "o")]) == 0
    assert capsys.readouterr().out.count("n=") == 3


def test_sweep_lambdas(tmp_path, capsys):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[run]\nsystem = ucm10\nscenario = shear1d_mode\ncfl = 0.5\nt_end = 0.1\n"
                   "[scenario]\nn = 64\nlength = 6.283185307179586\nmu_dot = 1\n"
                   "t_newtonian = 0.1\nt_elastic = 1\n")
    code = main(["sweep", "--config", str(cfg), "--lambdas", "1e-2,1e-1,10",
                 "--out", str(tmp_path / "o")])
    assert code == 1
    assert "4 decades" in capsys.readouterr().err
    assert main(["sweep", "--config", str(cfg), "--lambdas", "1e-3,1,1e3",
                 "--out", str(tmp_path / "o")]) == 0


def test_console_script_help():
    out = subprocess.run([sys.executable, "-m", "maxhyp.cli", "--help"], capture_output=True,
                         text=True, check=True)
    for cmd in ("run", "audit-symmetry", "speeds", "converge", "sweep"):
        assert cmd in out.stdout
