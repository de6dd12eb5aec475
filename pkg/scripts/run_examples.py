"""Reproduce the worked examples through the CLI and collect the artifacts.

    python scripts/run_examples.py [--out runs/] [--threads 4]

Writes one JSON (and, where a CSV form exists, one CSV) file per experiment
and prints a compact summary table.  Every run is deterministic, so the
files can be diffed across versions.
"""
import argparse
import io
import json
import math
import time
from pathlib import Path

from corsol.cli import run

ODD_PI = ",".join(repr((2 * k + 1) * math.pi) for k in range(1, 6))

EXPERIMENTS = [
    ("constant_one_dfun", ["dfun", "--coef", "constant_one", "--xs", "-2:2:0.5"]),
    ("constant_one_gnorm", ["gnorm", "--coef", "constant_one", "--p", "2", "--xs", "-2:2:1"]),
    ("constant_one_cover", ["cover", "--coef", "constant_one", "--count", "10"]),
    ("one_plus_cos_dfun", ["dfun", "--coef", "one_plus_cos", "--xs", ODD_PI]),
    ("one_plus_cos_q0", ["q0", "--coef", "one_plus_cos", "--a", repr(math.pi / 2) + "," + repr(math.pi),
                         "--window", repr(4 * math.pi), "--grid", repr(math.pi / 64)]),
    ("one_plus_cos_diagnose", ["diagnose", "--coef", "one_plus_cos", "--p", "2"]),
    ("gaussian_osc_majorant", ["majorant", "--coef", "gaussian_osc", "--p", "2",
                               "--probes", "1.5,2,2.5,3"]),
    ("gaussian_osc_sigma", ["sigma", "--coef", "gaussian_osc", "--probes", "1.5,2,2.5"]),
    ("gaussian_osc_diagnose", ["diagnose", "--coef", "gaussian_osc", "--p", "2", "--a", "1,2,4",
                               "--grid", "0.01"]),
    ("exp_osc_dfun", ["dfun", "--coef", "exp_osc", "--xs", "3:7:1"]),
    ("exp_osc_sigma", ["sigma", "--coef", "exp_osc", "--probes", "4,5,6,7"]),
    ("exp_osc_cover", ["cover", "--coef", "exp_osc", "--count", "8"]),
    ("exp_osc_diagnose", ["diagnose", "--coef", "exp_osc", "--p", "2", "--probes", "4,5,6,7"]),
    ("solve_bump", ["solve", "--coef", "one_plus_cos", "--rhs", "bump:0,1", "--xs", "-2:2:0.001"]),
]


def summarize(name, rec):
    res = rec["results"]
    if rec["command"] == "diagnose":
        return (f"solvable={res['solvable']} tends={res['tends_in_whole']} "
                f"compact={res['compact']} equivalence={res['equivalence_agrees']}")
    if rec["command"] == "solve":
        return f"max residual {rec['evidence'].get('max_residual', float('nan')):.3g}"
    if rec["command"] == "dfun":
        return "d: " + ", ".join(f"{r['d']:.6g}" for r in res)
    if rec["command"] == "majorant":
        return "ratio: " + ", ".join(f"{r['ratio']:.4f}" for r in res)
    if rec["command"] == "sigma":
        return "q1*d: " + ", ".join(f"{r['q1_times_d']:.5f}" for r in res)
    if rec["command"] == "cover":
        return "radii: " + ", ".join(f"{r['radius']:.4g}" for r in res[:5]) + ", ..."
    if rec["command"] == "q0":
        return "q0: " + ", ".join(f"{r['q0']:.8f}" for r in res)
    if rec["command"] == "gnorm":
        return "G_p: " + ", ".join(f"{r['green_norm']:.8f}" for r in res)
    return ""


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--out", default="runs")
    ap.add_argument("--threads", default="1")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, argv in EXPERIMENTS:
        argv = argv + ["--threads", args.threads]
        t0 = time.perf_counter()
        buf, err = io.StringIO(), io.StringIO()
        code = run(argv, buf, err)
        dt = time.perf_counter() - t0
        if code not in (0, 3):
            print(f"{name:24s} exit {code}: {err.getvalue().strip()}")
            continue
        (out / f"{name}.json").write_text(buf.getvalue())
        if argv[0] != "diagnose":
            run(argv + ["--format", "csv", "--output", str(out / f"{name}.csv")], io.StringIO(), err)
        print(f"{name:24s} {dt:6.2f}s  {summarize(name, json.loads(buf.getvalue()))}")


if __name__ == "__main__":
    main()
