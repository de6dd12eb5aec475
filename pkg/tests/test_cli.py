import io
import json
import math
import subprocess
import sys

import pytest

from corsol.cli import parse_range, run

KEYS = ["schema_version", "command", "coefficient_label", "config_echo", "results", "evidence"]


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_parse_range():
    assert parse_range("-2:2:0.5") == [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0]
    assert parse_range("1.5,2,3") == [1.5, 2.0, 3.0]


def test_dfun_csv():
    code, out, _ = call("dfun", "--coef", "constant_one", "--xs", "-2:2:0.5", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert all(l.startswith("#") for l in lines[:3])
    rows = [l for l in lines if not l.startswith("#")]
    assert rows[0] == "x,d,residual"
    ds = [float(r.split(",")[1]) for r in rows[1:]]
    assert len(ds) == 9 and all(abs(d - 1) <= 1e-10 for d in ds)


def test_diagnose_one_plus_cos():
    code, out, _ = call("diagnose", "--coef", "one_plus_cos", "--p", "2")
    assert code == 0
    rec = json.loads(out)
    assert list(rec) == KEYS
    assert rec["results"]["solvable"] is True
    assert rec["results"]["tends_in_whole"] is False
    assert rec["results"]["compact"] is False


def test_majorant_gaussian_ratio_trend():
    code, out, _ = call("majorant", "--coef", "gaussian_osc", "--p", "2", "--probes", "1.5,2,2.5,3")
    assert code == 0
    dev = [r["abs_ratio_minus_1"] for r in json.loads(out)["results"]]
    assert all(b < a for a, b in zip(dev, dev[1:])), dev


@pytest.mark.parametrize("argv", [
    ("dfun", "--coef", "exp_osc", "--xs", "0,1,2"),
    ("cover", "--coef", "gaussian_osc", "--count", "4"),
    ("q0", "--coef", "one_plus_cos", "--a", "1,2"),
    ("gnorm", "--coef", "constant_one", "--p", "inf", "--xs", "-1:1:1"),
])
def test_deterministic_json(argv):
    first, second = call(*argv)[1], call(*argv)[1]
    assert first == second
    rec = json.loads(first)
    assert list(rec) == KEYS and rec["schema_version"] == "corsol/1"


def test_threads_do_not_change_output():
    argv = ("dfun", "--coef", "one_plus_cos", "--xs", "-3:3:0.5")
    assert call(*argv)[1] == call(*argv, "--threads", "4")[1]


def test_seventeen_digits():
    out = call("dfun", "--coef", "one_plus_cos", "--xs", "0")[1]
    assert "0.51097342938" in out
    d = json.loads(out)["results"][0]["d"]
    assert repr(d) in out or format(d, ".17g") in out


def test_output_file(tmp_path):
    target = tmp_path / "cover.csv"
    code, out, _ = call("cover", "--coef", "constant_one", "--count", "3", "--format", "csv",
                        "--output", str(target))
    assert code == 0 and out == ""
    rows = [l for l in target.read_text().splitlines() if not l.startswith("#")]
    assert rows[0] == "n,left,center,right,radius,mass"
    assert [float(r.split(",")[2]) for r in rows[1:]] == pytest.approx([1, 3, 5], abs=1e-10)


def test_solve_reports_residual():
    rec = json.loads(call("solve", "--coef", "constant_one", "--rhs", "expr:1", "--xs", "-1:1:0.01")[1])
    assert rec["evidence"]["max_residual"] <= 1e-6
    assert all(abs(y - 1) < 1e-10 for y in rec["results"]["y"])


@pytest.mark.parametrize("argv", [
    ("dfun", "--coef", "no_such_name"),
    ("dfun", "--coef", "expr:1 + cos(x"),
    ("dfun",),
    ("bogus", "--coef", "constant_one"),
    ("dfun", "--coef", "constant_one", "--tol", "-1"),
    ("gnorm", "--coef", "constant_one", "--p", "0.5"),
    ("solve", "--coef", "constant_one", "--rhs", "wave:1"),
    ("majorant", "--coef", "constant_one", "--probes", "4,2,1"),
    ("diagnose", "--coef", "constant_one", "--format", "csv"),
])
def test_usage_errors(argv):
    code, out, err = call(*argv)
    assert code == 1 and out == "" and err.startswith("corsol:")


def test_syntax_error_message():
    err = call("dfun", "--coef", "expr:1 + cos(x")[2]
    assert "position 9" in err


def test_numeric_failure():
    code, _, err = call("dfun", "--coef", "expr:exp(-x^2)", "--xs", "0")
    assert code == 2
    assert json.loads(err)["error"] == "MassDeficit"


def test_strict_inconclusive():
    argv = ("diagnose", "--coef", "expr:exp(-abs(x))", "--a", "1,2,4,8", "--window", "30")
    code, out, _ = call(*argv)
    assert code == 0
    assert json.loads(out)["results"]["solvability_verdict"] == "Inconclusive"
    assert call(*argv, "--strict")[0] == 3


def test_not_solvable_diagnosis():
    rec = json.loads(call("diagnose", "--coef", "expr:0*x", "--a", "1,2,4")[1])
    assert rec["results"]["solvable"] is False
    assert rec["results"]["compact"] is None


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "corsol", "dfun", "--coef", "constant_one", "--xs", "0"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert math.isclose(json.loads(proc.stdout)["results"][0]["d"], 1.0, abs_tol=1e-10)
