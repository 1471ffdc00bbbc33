import json
import subprocess
import sys
import time

import pytest

from qhadwiger.cli import main
from qhadwiger.io import fixture_path, load_family

THREADED = str(fixture_path("threaded3.json"))
QUANT = str(fixture_path("counterexample_q.json"))
COLORFUL = str(fixture_path("counterexample_colorful.json"))


def run(*args):
    return main([str(a) for a in args])


def test_transversal_found(capsys, tmp_path):
    assert run("transversal", "--input", THREADED, "--out", tmp_path / "t.svg") == 0
    assert capsys.readouterr().out.startswith("transversal: theta=")
    assert (tmp_path / "t.svg").read_text().startswith("<svg")


def test_transversal_ordered(capsys):
    assert run("transversal", "--input", THREADED, "--ordered") == 0
    assert "ordered transversal" in capsys.readouterr().out


def test_transversal_none(capsys):
    assert run("transversal", "--input", QUANT) == 1
    assert "none found at resolution M=720" in capsys.readouterr().out


def test_svg_deterministic(tmp_path):
    for name in ("a.svg", "b.svg"):
        assert run("transversal", "--input", THREADED, "--out", tmp_path / name) == 0
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()


def test_verify_upheld(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert run("verify", "--input", THREADED, "--theorem", "T1.1", "--out", out) == 0
    assert json.loads(out.read_text())["status"] == "upheld"
    assert "witness:" in capsys.readouterr().out


def test_verify_needs_disjointness(capsys):
    assert run("verify", "--input", QUANT, "--theorem", "T1.1") == 2
    assert "invalid" in capsys.readouterr().out


def test_verify_violated_with_waiver():
    assert run("verify", "--input", QUANT, "--theorem", "T1.1", "--allow-overlap") == 1


def test_verify_colorful_violated():
    assert run("verify", "--input", COLORFUL, "--theorem", "T1.2", "--allow-overlap") == 1


def test_verify_vacuous_exits_zero(tmp_path):
    from qhadwiger.io import save_family
    from qhadwiger.scenarios import random_family
    path = tmp_path / "v.json"
    save_family(random_family(3, 4, "disjoint"), path)
    assert run("verify", "--input", path, "--theorem", "T1.1") == 0


def test_invalid_inputs(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"version": 1, "sets": [')
    assert run("transversal", "--input", bad) == 2
    assert "line 1" in capsys.readouterr().err
    assert run("transversal", "--input", tmp_path / "missing.json") == 2
    assert run("plot", "--input", THREADED, "--line", "nope") == 2


def test_bad_arguments_exit_two():
    with pytest.raises(SystemExit) as info:
        run("verify", "--input", THREADED, "--theorem", "T9.9")
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        run("transversal", "--input", THREADED, "--directions", "2")
    assert info.value.code == 2


def test_counterexample_quantitative(tmp_path):
    out = tmp_path / "q.json"
    assert run("counterexample", "quantitative", "--out", out) == 0
    fam = load_family(out)
    assert len(fam) == 4 and all(e.alpha == 0.3 for e in fam)
    assert out.read_text() == fixture_path("counterexample_q.json").read_text()
    svg = (tmp_path / "q.svg").read_text()
    assert ">v<" in svg and ">h<" in svg


def test_counterexample_colorful(tmp_path):
    out = tmp_path / "c.json"
    assert run("counterexample", "colorful", "--out", out, "--svg", tmp_path / "fig.svg") == 0
    assert len(load_family(out)) == 12
    assert (tmp_path / "fig.svg").exists()


def test_counterexample_stdout(capsys):
    assert run("counterexample", "colorful") == 0
    assert len(json.loads(capsys.readouterr().out)["sets"]) == 12


def test_counterexample_certification_failure(capsys):
    assert run("counterexample", "colorful", "--epsilon", "10") == 3
    assert "shrink below feature scale" in capsys.readouterr().err


def test_fuzz_quick(capsys):
    t0 = time.perf_counter()
    assert run("fuzz", "--theorem", "T1.1", "--trials", "1") == 0
    assert time.perf_counter() - t0 < 5
    assert "violated=0" in capsys.readouterr().out


def test_fuzz_writes_offenders(tmp_path, capsys):
    assert run("fuzz", "--theorem", "T1.1", "--trials", "4", "--mode", "overlapping", "--allow-overlap",
               "--out", tmp_path) in (0, 1)
    text = capsys.readouterr().out
    written = list(tmp_path.glob("fuzz_T1.1_seed*.json"))
    assert ("offending family written" in text) == bool(written)


def test_plot(tmp_path):
    out = tmp_path / "p.svg"
    assert run("plot", "--input", QUANT, "--line", "1.5707963267948966,0", "--line", "0.7,0.1", "--out", out) == 0
    text = out.read_text()
    assert text.count("<line") >= 2


def test_console_entry():
    proc = subprocess.run([sys.executable, "-m", "qhadwiger.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "counterexample" in proc.stdout
