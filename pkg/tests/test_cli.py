import json
import subprocess
import sys
from importlib.resources import files
from pathlib import Path

import jsonschema
import pytest

from presloci import cli

FIX = Path(__file__).parent / "fixtures"

RUNS = [
    ("qe", ["--input", "good.pf"]),
    ("rectilinearize", ["--input", "good.pf", "--lattice", "x"]),
    ("sum", ["--input", "geo.pcf", "--mode", "q=2"]),
    ("sum", ["--input", "sy.pcf", "--mode", "q=2", "--box", "-3..3"]),
    ("loci", ["--input", "sy.pcf", "--box", "-5..5"]),
    ("loci", ["--input", "sy.pcf", "--kind", "bdd", "--mode", "q=3", "--box", "-2..2"]),
    ("interpolate", ["--input", "sy.pcf"]),
    ("verify", ["--input", "sy.pcf", "--box", "-5..5"]),
    ("padic-integrate", ["--input", "norm_s.pint"]),
    ("padic-integrate", ["--input", "psi.pint", "--backend", "qp", "--p", "3"]),
    ("padic-locus", ["--input", "norm_s.pint", "--box", "-3..3"]),
    ("padic-locus", ["--input", "norm_s.pint", "--kind", "local-int", "--punctured", "--box", "-3..3"]),
    ("transfer", ["--input", "norm_s.pint", "--primes", "2,3"]),
]


def run(capsys, command, args):
    args = [str(FIX / a) if a.endswith((".pf", ".pcf", ".pint")) else a for a in args]
    rc = cli.main([command, *args])
    out, err = capsys.readouterr()
    return rc, out, err


def schema(command):
    return json.loads(files("presloci").joinpath(f"schemas/{command}.schema.json").read_text())


@pytest.mark.parametrize("command, args", RUNS, ids=[f"{c}-{i}" for i, (c, _) in enumerate(RUNS)])
def test_json_output_matches_schema(capsys, command, args):
    rc, out, _ = run(capsys, command, [*args, "--json"])
    assert rc == 0
    jsonschema.validate(json.loads(out), schema(command))


@pytest.mark.parametrize("command, args", RUNS[:9], ids=[c for c, _ in RUNS[:9]])
def test_json_is_byte_deterministic(capsys, command, args):
    a = run(capsys, command, [*args, "--json"])[1]
    b = run(capsys, command, [*args, "--json"])[1]
    assert a == b


def test_human_output(capsys):
    rc, out, _ = run(capsys, "qe", ["--input", "good.pf"])
    assert rc == 0 and "output: x mod 2 = 0 and x >= 2" in out


def test_loci_values(capsys):
    _, out, _ = run(capsys, "loci", ["--input", "sy.pcf", "--kind", "int", "--box", "-3..3", "--json"])
    (loc,) = json.loads(out)["loci"]
    assert [p[0] for p in loc["zero_set"]] == [-3, -2, -1]


def test_sum_value(capsys):
    _, out, _ = run(capsys, "sum", ["--input", "geo.pcf", "--json"])
    rep = json.loads(out)
    assert rep["value"] == "L/(L - 1)" and rep["validity"] == "all"


def test_syntax_error_location(capsys):
    rc, _, err = run(capsys, "qe", ["--input", "bad.pf"])
    assert rc == 1
    assert f"{FIX / 'bad.pf'}:2:1:" in err


def test_usage_errors(capsys):
    assert cli.main(["loci", "--input", str(FIX / "sy.pcf"), "--kind", "nope"]) == 1
    assert cli.main(["sum", "--input", str(FIX / "missing.pcf")]) == 1
    assert cli.main(["sum", "--input", str(FIX / "geo.pcf"), "--mode", "q=0"]) == 1
    assert cli.main(["nonsense"]) == 1
    capsys.readouterr()


def test_budget_flag_and_env(capsys, monkeypatch):
    rc, _, err = run(capsys, "padic-integrate", ["--input", "norm_s.pint", "--budget", "5",
                                                  "--backend", "qp", "--p", "3", "--s", "1"])
    assert rc == 1 and "residue classes" in err
    monkeypatch.setenv("PRESLOCI_BUDGET", "1")
    rc, _, err = run(capsys, "qe", ["--input", "good.pf"])
    assert rc == 1 and "nodes" in err


def test_verify_reports_counterexample(capsys, monkeypatch):
    from presloci import engine
    real = engine.compute_locus

    def wrong(f, kind, mode=None):
        r = real(f, kind, mode)
        return real(f, "boundedness", mode) if r.kind == "integrability" else r

    monkeypatch.setattr(cli, "compute_locus", wrong)
    rc, out, _ = run(capsys, "verify", ["--input", "sy.pcf", "--kind", "int", "--box", "-3..3", "--json"])
    rep = json.loads(out)
    assert rc == 2 and not rep["ok"] and rep["counterexamples"]


def test_negative_box_values(capsys):
    rc, out, _ = run(capsys, "padic-integrate", ["--input", "norm_s.pint", "--s", "-1", "--json"])
    assert rc == 0 and json.loads(out)


def test_console_script_entry_point():
    r = subprocess.run([sys.executable, "-m", "presloci.cli", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and "0.1.0" in r.stdout
