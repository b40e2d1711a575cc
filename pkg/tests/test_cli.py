import csv
import io
import subprocess
import sys

import pytest

from pfreq import cli
from pfreq.report import CSV_COLUMNS
from pfreq.solvers import radial as radial_mod

MINIMAL = """\
[experiment]
kind = "solve"
p = 2
q = 1
nodes = 1024

[domain]
kind = "interval"
a = 0.0
b = 1.0
"""


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_minimal_run(tmp_path, capsys):
    cfg = tmp_path / "min.toml"
    cfg.write_text(MINIMAL)
    code = cli.main(["run", str(cfg), "--out-dir", str(tmp_path / "out")])
    assert code == 0
    rows = _rows(capsys.readouterr().out)
    assert len(rows) == 1
    assert float(rows[0]["value"]) == pytest.approx(12.0, rel=1e-5)
    assert (tmp_path / "out" / "min.csv").read_text().splitlines()[0] == ",".join(CSV_COLUMNS)
    assert (tmp_path / "out" / "min.json").exists()


def test_bad_config_exits_2_without_solving(tmp_path, capsys, monkeypatch):
    def boom(*a, **k):
        raise AssertionError("solver must not run")

    monkeypatch.setattr(cli, "execute", boom)
    cfg = tmp_path / "bad.toml"
    cfg.write_text(MINIMAL.replace("q = 1", "q = 1\nfoo = 2"))
    assert cli.main(["run", str(cfg), "--out-dir", str(tmp_path / "out")]) == 2
    err = capsys.readouterr().err
    assert f"{cfg}:5:" in err and "foo" in err
    assert not (tmp_path / "out").exists()


def test_negative_tolerance_scale_rejected(tmp_path):
    cfg = tmp_path / "min.toml"
    cfg.write_text(MINIMAL)
    assert cli.main(["run", str(cfg), "--tolerance-scale", "-1"]) == 2


def test_list_domains(capsys):
    assert cli.main(["list-domains"]) == 0
    out = capsys.readouterr().out
    for kind in ("interval", "box", "ball", "annulus", "tower", "punctured_box", "strip"):
        assert kind in out


def test_injected_a4_fault_fails_reproduce(tmp_path, capsys, monkeypatch):
    monkeypatch.setattr(radial_mod, "a4_lower_bound",
                        lambda p, q: 2 ** (1 + 1 / p) * (q * (1 - 1 / p) + 1) ** (1 / q))
    code = cli.main(["reproduce-all", "--only", "C4", "--out-dir", str(tmp_path)])
    assert code == 1
    assert "failing tags: A4" in capsys.readouterr().err


def test_reproduce_only_c4_passes(tmp_path, capsys):
    assert cli.main(["reproduce-all", "--only", "C4", "--out-dir", str(tmp_path)]) == 0
    rows = _rows((tmp_path / "reproduce.csv").read_text())
    assert rows and all(r["tag"] == "A4" and r["pass"] == "pass" for r in rows)


def test_console_script_entry_point(tmp_path):
    cfg = tmp_path / "min.toml"
    cfg.write_text(MINIMAL)
    out = subprocess.run([sys.executable, "-m", "pfreq.cli", "run", str(cfg), "--out-dir", str(tmp_path / "o")],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert _rows(out.stdout)[0]["route"] == "one_d"
