import csv
import json
import subprocess
import sys

import pytest

from rapsk.cli import main
from rapsk.constellation import RapskParams, build_rapsk, papr


def test_constellation_report(capsys, tmp_path):
    path = tmp_path / "geo.json"
    assert main(["constellation", "--n", "8", "--k", "32", "--r0", "0.6", "--json", str(path)]) == 0
    out = capsys.readouterr().out
    assert "papr=1.79661774" in out
    doc = json.loads(path.read_text())
    assert doc["papr"] == papr(build_rapsk(RapskParams(8, 32, 0.6)))
    assert len(doc["points"]) == 256


def test_rate_design_report(capsys, tmp_path):
    assert main(["rate-design", "--n", "8", "--k", "32", "--r0", "0.6", "--snr-db", "27",
                 "--kappa-phi", "1600"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["rule"] == "one-minus-p" and len(doc["levels"]) == 8
    path = tmp_path / "rd.json"
    assert main(["rate-design", "--snr-db", "27", "--kappa-phi", "inf", "--rule", "bsc-capacity",
                 "--json", str(path)]) == 0
    doc = json.loads(path.read_text())
    assert doc["kappa_phi"] == "inf" and doc["rule"] == "bsc-capacity"


def test_simulate_writes_csv(tmp_path):
    out = tmp_path / "ser.csv"
    args = ["simulate", "--mode", "uncoded", "--family", "qam", "--m", "16", "--snr-start", "8",
            "--snr-stop", "10", "--snr-step", "1", "--kappa-phi", "inf", "--trials", "20000",
            "--target-errors", "100", "--seed", "4", "--angular-model", "smooth", "--out", str(out)]
    assert main(args) == 0
    rows = list(csv.DictReader(out.open()))
    assert [r["snr_db"] for r in rows] == ["8.0", "9.0", "10.0"]
    assert all(r["seed"] == "4" for r in rows)


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[DEFAULT]\nfamily = qam\nm = 16\n\n[simulate]\nsnr-start = 8\nsnr_stop = 12\n"
                   "trials = 5000\nkappa-phi = inf\nformat = json\n")
    assert main(["simulate", "--config", str(cfg), "--snr-stop", "9"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert [r["snr_db"] for r in doc] == [8.0, 9.0]


@pytest.mark.parametrize("content", ["[simulate]\nunknown_key = 1\n", "[simulate]\ntrials = many\n",
                                     "[simulate]\nmode = turbo\n", "not an ini file"])
def test_bad_config_is_exit_2(tmp_path, content, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text(content)
    assert main(["simulate", "--config", str(cfg)]) == 2
    assert main(["simulate", "--config", str(tmp_path / "missing.ini")]) == 2


@pytest.mark.parametrize("args", [
    ["simulate", "--bogus"],
    ["simulate", "--mode", "coded", "--family", "qam"],
    ["simulate", "--n", "3"],
    ["simulate", "--snr-step", "0"],
    ["simulate", "--mode", "coded", "--rates", "1/2"],
    ["simulate", "--family", "qam", "--m", "32"],
    ["constellation", "--r0", "1.5"],
    ["rate-design", "--kappa-phi", "-3"],
    [],
])
def test_invalid_options_are_exit_2(args, capsys):
    assert main(args) == 2


def test_runtime_failure_is_exit_3(tmp_path, capsys):
    out = tmp_path / "no" / "such" / "dir" / "x.csv"
    assert main(["simulate", "--snr-start", "20", "--snr-stop", "20", "--trials", "100", "--out", str(out)]) == 3
    assert "error" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rapsk", "constellation", "--n", "2", "--k", "8", "--r0", "0.5"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "N=2 K=8" in proc.stdout


def test_simulate_repeatable_with_two_workers(tmp_path):
    args = ["simulate", "--snr-start", "16", "--snr-stop", "18", "--trials", "40000", "--batch-size", "8192",
            "--kappa-phi", "2500", "--workers", "2", "--seed", "11"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
