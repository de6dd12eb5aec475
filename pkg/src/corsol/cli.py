"""Command-line front end: ``corsol <command> --coef NAME [options]``.

Commands and their CSV columns:

    dfun      x, d, residual
    q0        a, q0, argmin_x, window, grid_step
    cover     n, left, center, right, radius, mass
    solve     x, y
    gnorm     x, green_norm, d, lower_bound
    majorant  x, green_norm, majorant, ratio, abs_ratio_minus_1, epsilon
    sigma     x, sigma1, sigma2, q1_times_d
    diagnose  (JSON only) verdict records

Exit status: 0 success, 1 usage error, 2 numeric failure, 3 Inconclusive
verdict from ``diagnose --strict``.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence

import numpy as np

from . import asymptotics as asy
from . import coefficient as coef
from . import diagnostics as diag
from . import green
from .errors import CorsolError, ExpressionSyntaxError, UnknownName

SCHEMA = "corsol/1"

DEFAULT_PROBES = {
    "constant_one": [1.0, 2.0, 3.0, 4.0, 5.0],
    "gaussian_osc": [1.5, 2.0, 2.5, 3.0],
    "exp_osc": [3.0, 4.0, 5.0, 6.0, 7.0],
    "one_plus_cos": [(2 * k + 1) * math.pi for k in range(1, 6)],
}
FALLBACK_PROBES = [1.0, 2.0, 4.0, 8.0]
# oscillation cost caps the scan window of the fast-phase catalog entries
DEFAULT_WINDOW = {"gaussian_osc": 2.0, "exp_osc": 2.0}

VALUE_OPTS = ("--xs", "--probes", "--a", "--origin")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# formatting


def fmt(v: float) -> str:
    return format(float(v), ".17g")


def _to_json(obj) -> str:
    """Deterministic JSON: insertion-ordered keys, floats with 17 significant
    digits, non-finite floats as strings."""
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return fmt(v) if math.isfinite(v) else json.dumps(fmt(v))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_to_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def record(command: str, label: str, config: dict, results, evidence=None) -> dict:
    return {"schema_version": SCHEMA, "command": command, "coefficient_label": label,
            "config_echo": config, "results": results, "evidence": evidence if evidence is not None else {}}


def to_csv(columns: Sequence[str], rows: List[Sequence], config: dict) -> str:
    out = io.StringIO()
    for k, v in config.items():
        out.write(f"# {k}: {v}\n")
    out.write(",".join(columns) + "\n")
    for r in rows:
        out.write(",".join(fmt(v) if isinstance(v, (float, int, np.floating, np.integer))
                           and not isinstance(v, bool) else str(v) for v in r) + "\n")
    return out.getvalue()


# ---------------------------------------------------------------------------
# argument helpers


def parse_range(text: str) -> List[float]:
    """``a:b:step`` (inclusive of ``b`` up to rounding) or a comma list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"range {text!r} must look like a:b:step")
        a, b, h = (float(p) for p in parts)
        if not (h > 0 and b >= a):
            raise UsageError(f"range {text!r} needs step > 0 and b >= a")
        n = int(math.floor((b - a) / h + 1e-9))
        return [a + i * h for i in range(n + 1)]
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"cannot parse number list {text!r}") from None


def parse_rhs(text: str) -> green.RightHandSide:
    """``expr:<expression>``, ``indicator:a,b[,height]`` or ``bump:center,width``."""
    kind, _, rest = text.partition(":")
    try:
        if kind == "expr":
            return green.expression_rhs(rest)
        if kind == "indicator":
            vals = [float(v) for v in rest.split(",")]
            return green.indicator(*vals)
        if kind == "bump":
            vals = [float(v) for v in rest.split(",")] if rest else []
            return green.gaussian_bump(*vals)
    except (TypeError, ValueError) as e:
        if isinstance(e, ExpressionSyntaxError):
            raise
        raise UsageError(f"bad right-hand side {text!r}: {e}") from None
    raise UsageError(f"unknown right-hand side {text!r}; use expr:, indicator: or bump:")


def _preprocess(argv: Sequence[str]) -> List[str]:
    """Glue ``--xs -2:2:0.5`` into ``--xs=-2:2:0.5`` so argparse does not read
    the negative range as an option."""
    out, it = [], iter(argv)
    for tok in it:
        if tok in VALUE_OPTS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def _pmap(fn: Callable, items: Sequence, threads: int) -> list:
    """Ordered map; independent sweep points may run concurrently."""
    if threads <= 1 or len(items) <= 1:
        return [fn(v) for v in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="corsol", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("dfun", "q0", "cover", "solve", "gnorm", "majorant", "sigma", "diagnose"):
        s = sub.add_parser(name)
        s.add_argument("--coef", required=True, help="catalog name or expr:<expression>")
        s.add_argument("--p", default="2", help='"1", a finite decimal > 1, or "inf"')
        s.add_argument("--xs", help="sweep points: a:b:step or comma list")
        s.add_argument("--probes", help="probe ladder: comma list or a:b:step")
        s.add_argument("--window", type=float, help="scan half-width")
        s.add_argument("--grid", type=float, help="scan / solution grid step")
        s.add_argument("--a", help="window half-length(s), comma list")
        s.add_argument("--tol", type=float, default=1e-12)
        s.add_argument("--count", type=int, default=10)
        s.add_argument("--origin", type=float, default=0.0)
        s.add_argument("--rhs", default="bump:0,1")
        s.add_argument("--output", help="output file (default stdout)")
        s.add_argument("--format", choices=("json", "csv"), default="json")
        s.add_argument("--strict", action="store_true")
        s.add_argument("--threads", type=int, default=1)
    return p


# ---------------------------------------------------------------------------
# commands: each returns (json_record, csv_columns, csv_rows)


def _probes(args, c) -> List[float]:
    if args.probes:
        xs = parse_range(args.probes)
    else:
        xs = DEFAULT_PROBES.get(c.label, FALLBACK_PROBES)
    if any(abs(b) < abs(a) for a, b in zip(xs, xs[1:])):
        raise UsageError("probes must be sorted increasing in |x|")
    return xs


def _window(args, c, fallback=8.0) -> float:
    return args.window if args.window is not None else DEFAULT_WINDOW.get(c.label, fallback)


def cmd_dfun(args, c, cfg):
    xs = parse_range(args.xs or "-2:2:0.5")
    cfg["xs"] = xs
    res = _pmap(lambda x: coef.d_function(c, x), xs, args.threads)
    rows = [(r.x, r.d, r.residual) for r in res]
    results = [{"x": r.x, "d": r.d, "residual": r.residual,
                "bracket": list(r.bracket)} for r in res]
    return record("dfun", c.label, cfg, results), ("x", "d", "residual"), rows


def cmd_q0(args, c, cfg):
    ladder = parse_range(args.a or "0.5,1,2,4")
    window, step = _window(args, c), args.grid or 0.05
    cfg.update(a=ladder, window=window, grid=step)
    est = [coef.q0_estimate(c, a, window, step) for a in ladder]
    rows = [(e.a, e.inf_value, e.argmin_x, window, step) for e in est]
    results = [{"a": e.a, "q0": e.inf_value, "argmin_x": e.argmin_x,
                "window": list(e.window), "grid_step": e.grid_step} for e in est]
    return record("q0", c.label, cfg, results), ("a", "q0", "argmin_x", "window", "grid_step"), rows


def cmd_cover(args, c, cfg):
    cfg.update(origin=args.origin, count=args.count)
    cov = coef.r_covering(c, args.origin, args.count)
    masses = cov.masses(c)
    rows = [(i + 1, s.left, s.center, s.right, s.radius, m)
            for i, (s, m) in enumerate(zip(cov.segments, masses))]
    results = [{"n": r[0], "left": r[1], "center": r[2], "right": r[3], "radius": r[4], "mass": r[5]}
               for r in rows]
    return (record("cover", c.label, cfg, results),
            ("n", "left", "center", "right", "radius", "mass"), rows)


def cmd_solve(args, c, cfg):
    f = parse_rhs(args.rhs)
    xs = np.array(parse_range(args.xs or "-2:2:0.01"))
    cfg.update(rhs=args.rhs, xs=f"{fmt(xs[0])}..{fmt(xs[-1])} ({len(xs)} points)")
    y = green.apply_grid(c, f, xs, args.tol)
    evidence = {}
    if xs.size >= 3 and np.allclose(np.diff(xs), xs[1] - xs[0], rtol=1e-9, atol=0.0):
        evidence["max_residual"] = green.residual_check(c, f, xs, args.tol)
    rows = list(zip(xs.tolist(), y.tolist()))
    results = {"x": xs.tolist(), "y": y.tolist()}
    return record("solve", c.label, cfg, results, evidence), ("x", "y"), rows


def cmd_gnorm(args, c, cfg):
    p = green.LebesgueExponent.parse(args.p)
    xs = parse_range(args.xs or "-2:2:0.5")
    cfg["xs"] = xs

    def one(x):
        d = coef.d_function(c, x).d
        return (x, green.green_norm(c, x, p, args.tol), d, green.lower_bound(d, p))

    rows = _pmap(one, xs, args.threads)
    results = [{"x": r[0], "green_norm": r[1], "d": r[2], "lower_bound": r[3]} for r in rows]
    return record("gnorm", c.label, cfg, results), ("x", "green_norm", "d", "lower_bound"), rows


def cmd_majorant(args, c, cfg):
    p = green.LebesgueExponent.parse(args.p)
    xs = _probes(args, c)
    cfg["probes"] = xs
    report = asy.check_conditions(c, xs, args.tol) if c.s is not None and len(xs) >= 1 else None
    eps = dict(asy.asymptotic_j_check(c, xs, args.tol))

    def one(x):
        g = green.green_norm(c, x, p, args.tol)
        m = asy.majorant(c, p, x, report).value
        return (x, g, m, g / m, abs(g / m - 1.0), eps[x])

    rows = _pmap(one, xs, args.threads)
    results = [dict(zip(("x", "green_norm", "majorant", "ratio", "abs_ratio_minus_1", "epsilon"), r))
               for r in rows]
    evidence = {}
    if report is not None:
        evidence["conditions"] = [{"name": r.name, "statement": r.statement, "probes": r.probes,
                                   "values": r.values, "verdict": r.verdict, "note": r.note}
                                  for r in report.records]
        evidence["nu"] = report.nu
    return (record("majorant", c.label, cfg, results, evidence),
            ("x", "green_norm", "majorant", "ratio", "abs_ratio_minus_1", "epsilon"), rows)


def cmd_sigma(args, c, cfg):
    xs = _probes(args, c)
    cfg["probes"] = xs
    sig = _pmap(lambda x: asy.sigma_pair(c, x, args.tol), xs, args.threads)
    qd = _pmap(lambda x: float(c.q1(np.array(x))) * coef.d_function(c, x).d, xs, args.threads)
    rows = [(x, s1, s2, v) for x, (s1, s2), v in zip(xs, sig, qd)]
    results = [dict(zip(("x", "sigma1", "sigma2", "q1_times_d"), r)) for r in rows]
    return record("sigma", c.label, cfg, results), ("x", "sigma1", "sigma2", "q1_times_d"), rows


def _tri(verdict: str, yes: str) -> Optional[bool]:
    return None if verdict == diag.INCONCLUSIVE else verdict == yes


def cmd_diagnose(args, c, cfg):
    xs = _probes(args, c)
    ladder = parse_range(args.a or "0.5,1,2,4,8")
    window = _window(args, c, fallback=4.0 * max(ladder))
    step = args.grid or 0.05
    cfg.update(probes=xs, a=ladder, window=window, grid=step)
    sv = diag.solvability_verdict(c, ladder, window, step)
    evidence = {
        "solvability": {"witness_a": sv.witness_a, "q0_at_witness": sv.q0_at_witness, "note": sv.note,
                        "q0_estimates": [{"a": e.a, "q0": e.inf_value, "argmin_x": e.argmin_x}
                                         for e in sv.evidence]},
    }
    results = {"solvable": _tri(sv.verdict, diag.SOLVABLE), "solvability_verdict": sv.verdict}
    if sv.verdict != diag.SOLVABLE:
        # d(x) and G_p are undefined without solvability; the limit tests do not apply
        results.update(tends_in_whole=None, compact=None, equivalence_agrees=None,
                       strip_verdict=diag.INCONCLUSIVE, compactness_verdict=diag.INCONCLUSIVE)
        evidence["limit_note"] = "limit tests skipped: coefficient not shown solvable"
        return record("diagnose", c.label, cfg, results, evidence), None, True
    st = diag.strip_verdict(c, args.p, xs)
    cv = diag.compactness_verdict(c, args.p, xs)
    eq = diag.equivalence_crosscheck(c, xs)
    results.update(tends_in_whole=_tri(st.verdict, diag.TENDS), compact=_tri(cv.verdict, diag.COMPACT),
                   equivalence_agrees=eq.agreement, strip_verdict=st.verdict,
                   compactness_verdict=cv.verdict)
    evidence.update({
        "d_trend": [list(t) for t in st.d_trend],
        "int_trend": [list(t) for t in st.int_trend],
        "strip_note": st.note,
        "compactness_note": cv.note,
        "equivalence": {"d_tends": eq.d_tends,
                        "int_tends": {fmt(a): v for a, v in eq.int_tends.items()}},
    })
    inconclusive = diag.INCONCLUSIVE in (sv.verdict, st.verdict, cv.verdict)
    return record("diagnose", c.label, cfg, results, evidence), None, inconclusive


COMMANDS = {"dfun": cmd_dfun, "q0": cmd_q0, "cover": cmd_cover, "solve": cmd_solve,
            "gnorm": cmd_gnorm, "majorant": cmd_majorant, "sigma": cmd_sigma,
            "diagnose": cmd_diagnose}


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    command = "?"
    try:
        args = build_parser().parse_args(_preprocess(argv))
        command = args.command
        if not args.tol > 0:
            raise UsageError("--tol must be positive")
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
        green.LebesgueExponent.parse(args.p)
        c = coef.resolve(args.coef)
        cfg = {"coef": args.coef, "p": args.p, "tol": args.tol}
        rec, columns, rows = COMMANDS[command](args, c, cfg)
        if args.format == "csv":
            if columns is None:
                raise UsageError(f"{command} has no CSV form; use --format json")
            text = to_csv(columns, rows, {"schema_version": SCHEMA, "command": command,
                                          "coefficient_label": c.label, **cfg})
        else:
            text = _to_json(rec) + "\n"
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(text)
        else:
            stdout.write(text)
        # diagnose returns its Inconclusive flag in place of CSV rows
        if command == "diagnose" and args.strict and rows:
            return 3
        return 0
    except (UsageError, UnknownName, ExpressionSyntaxError, ValueError) as e:
        stderr.write(f"corsol: usage error: {e}\n")
        return 1
    except CorsolError as e:
        stderr.write(_to_json({"schema_version": SCHEMA, "command": command,
                               "error": type(e).__name__, "message": str(e)}) + "\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
