import json
import subprocess
import sys

import numpy as np
import pytest

from bgsas.cli import UsageError, build_parser, main, parse_grid
from bgsas.conversion import convert_cell
from bgsas.trace import read_trace


def run(*args):
    return main([str(a) for a in args])


def test_parse_grid():
    assert np.allclose(parse_grid("10:30:5"), [10, 15, 20, 25, 30])
    assert np.allclose(parse_grid("1e-4:1e-2:3log"), [1e-4, 1e-3, 1e-2])
    assert np.allclose(parse_grid("1,2.5,4"), [1, 2.5, 4])
    with pytest.raises(UsageError):
        parse_grid("0:1:3log")
    with pytest.raises(UsageError):
        parse_grid("a,b")


def test_generate_and_estimate(tmp_path, capsys):
    trace = tmp_path / "trace.bin"
    assert run("generate", "--model", "bg", "--p", 0.01, "--sigma-b", 1, "--sigma-i", 30,
               "--n", 100_000, "--seed", 7, "-o", trace) == 0
    tr = read_trace(trace)
    assert len(tr) == 100_000 and tr.source == "bg" and tr.seed == 7
    out = tmp_path / "est.json"
    assert run("estimate", "-i", trace, "--method", "mcculloch", "-o", out) == 0
    rec = json.loads(out.read_text())
    assert rec["method"] == "mcculloch" and rec["n_used"] == 100_000
    assert capsys.readouterr().out.count("\n") == 2  # one summary line per command


def test_convert_matches_library(tmp_path):
    out = tmp_path / "cell.json"
    assert run("convert", "--p", 0.001, "--ratio-db", 20, "--n", 200_000, "--seed", 7, "-o", out) == 0
    rec = json.loads(out.read_text())
    assert rec == convert_cell(0.001, 20.0, 200_000, 7).row()


def test_fit_surface_builtin(tmp_path):
    out = tmp_path / "s.json"
    assert run("fit-surface", "--builtin", "-o", out) == 0
    a, g = json.loads(out.read_text())
    assert a["c00"] == 2.005 and g["c00"] == 0.5779


def test_metrics_against_bg_model(tmp_path):
    trace = tmp_path / "t.bin"
    run("generate", "--model", "bg", "--p", 0.01, "--sigma-i", 30, "--n", 500_000, "--seed", 3, "-o", trace)
    out = tmp_path / "m.json"
    assert run("metrics", "--meas", trace, "--bg", 0.01, 1, 30, "-o", out) == 0
    assert 1e-4 < json.loads(out.read_text())["weighted_rmse"] < 1e-2


def test_validation_errors_exit_2(tmp_path, capsys):
    assert run("generate", "--model", "bg", "--p", 1.5, "--sigma-i", 3, "--n", 10, "--seed", 1,
               "-o", tmp_path / "x.bin") == 2
    assert run("generate", "--model", "sas", "--n", 10, "--seed", 1, "-o", tmp_path / "x.bin") == 2
    assert run("convert", "--p", 0.001, "--ratio-db", 20, "--n", 10, "--seed", 1, "-o", tmp_path / "c.json") == 2
    assert "error" in capsys.readouterr().err
    with pytest.raises(SystemExit) as exc:
        run("convert", "--p", 0.001, "--ratio-db", 20, "-o", tmp_path / "c.json")  # no --seed
    assert exc.value.code == 2


def test_runtime_errors_exit_1(tmp_path):
    assert run("estimate", "-i", tmp_path / "missing.bin") == 1
    small = tmp_path / "s.csv"
    run("generate", "--model", "sas", "--alpha", 1.5, "--n", 100, "--seed", 1, "-o", small)
    # too short for the quantile tables
    assert run("estimate", "-i", small) == 2
    flat = tmp_path / "flat.csv"
    flat.write_text("amplitude\n" + "0.0\n" * 999 + "1.0\n")
    assert run("estimate", "-i", flat) == 1


def _commands(d):
    trace = d / "t.bin"
    sweep = d / "sweep.csv"
    return [
        ("generate", "--model", "sas", "--alpha", 1.5, "--n", 50_000, "--seed", 5, "-o", trace),
        ("generate", "--model", "bg", "--p", 0.01, "--sigma-i", 10, "--n", 20_000, "--seed", 5, "-o", d / "t.csv"),
        ("estimate", "-i", trace, "--method", "koutrouvelis", "-o", d / "est.json"),
        ("convert", "--p", 0.002, "--ratio-db", 25, "--n", 100_000, "--seed", 5, "-o", d / "cell.json"),
        ("sweep", "--p-grid", "1e-4:1e-2:3log", "--ratio-grid", "10:30:3", "--n", 100_000, "--seed", 5,
         "-o", sweep),
        ("fit-surface", "-i", sweep, "-o", d / "surf.json"),
        ("stability", "--p", 0.01, "--ratio-db", 20, "--n", 100_000, "--seed", 5, "-o", d / "stab.json",
         "--pdf-csv", d / "stab_pdf.csv"),
        ("stability", "--p-grid", "0.001,0.003", "--sigma-i-grid", "5,50", "--n", 100_000, "--seed", 5,
         "-o", d / "stab.csv"),
        ("metrics", "--meas", trace, "--model", d / "t.csv", "--range", -20, 20, "-o", d / "m.json",
         "--pdf-csv", d / "m_pdf.csv"),
    ]


def test_every_command_is_byte_reproducible(tmp_path):
    snaps = []
    for rep in range(2):
        for cmd in _commands(tmp_path):
            assert run(*cmd) == 0, cmd
        snaps.append({p.name: p.read_bytes() for p in sorted(tmp_path.iterdir())})
    assert len(snaps[0]) == 11
    assert snaps[0] == snaps[1]


def test_help_documents_units():
    ap = build_parser()
    sub = next(a for a in ap._actions if a.dest == "command")
    for name in ("generate", "convert", "sweep", "stability", "metrics", "fit-surface"):
        text = sub.choices[name].format_help()
        assert "dB" in text or "linear" in text, name


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "bgsas", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "convert" in res.stdout
