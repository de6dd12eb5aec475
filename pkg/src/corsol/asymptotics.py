"""Asymptotics of J(x) and d(x) for a split coefficient q = q1 + q2.

With a smooth positive ``q1``, an oscillating ``q2`` and an auxiliary weight
``s``:

    Delta(x)    = [x - s(x)/q1(x), x + s(x)/q1(x)]
    kappa(t)    = q1(t) int_x^t q2/q1            (t in Delta(x))
    kappa~(x)   = sup_{t in Delta(x)} |kappa(t)|
    mu(t)       = -(q1'(t)/q1(t)^2) kappa(t)

Under conditions a)-e) (see :func:`check_conditions`) ``q1(x) J(x) -> 1`` and
the norm function has the majorant ``kappa_p``.  Limits at infinity are
checked as monotone trends over finite probe ladders.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from . import quadrature as quad
from .coefficient import DEFAULT_TOL_DENSITY, Coefficient, d_function
from .errors import NoSplit, NoWeight
from .green import LebesgueExponent, green_norm, j_integral

HOLDS, FAILS, INCONCLUSIVE = "holds", "fails", "inconclusive"
NU_GRID = 16
NU_SLACK = 0.05  # allowed relative growth of the per-probe comparability constant


def _need_split(c: Coefficient):
    if c.split is None:
        raise NoSplit(f"{c.label}: operation needs a split q = q1 + q2")


def _need_weight(c: Coefficient):
    if c.s is None:
        raise NoWeight(f"{c.label}: operation needs the auxiliary weight s")


def _f(fn, x) -> float:
    return float(np.asarray(fn(np.asarray(x, dtype=float))))


@dataclass
class DeltaInterval:
    x: float
    lo: float
    hi: float
    half_width: float


def delta_interval(c: Coefficient, x: float) -> DeltaInterval:
    _need_split(c)
    _need_weight(c)
    h = _f(c.s, x) / _f(c.q1, x)
    if not (h > 0 and math.isfinite(h)):
        raise ValueError(f"Delta({x}) is undefined: s/q1 = {h}")
    return DeltaInterval(x=float(x), lo=x - h, hi=x + h, half_width=h)


def _ratio_primitive(c: Coefficient, x: float, tol_density: float = DEFAULT_TOL_DENSITY,
                     max_evals: int = quad.DEFAULT_MAX_EVALS):
    """Running integral of q2/q1 from x (phase hint forwarded)."""
    q1, q2 = c.split
    spec = quad.IntegrandSpec(lambda t: q2(t) / q1(t), phase_hint=c.phase_hint,
                              breakpoints=tuple(c.kinks))
    return quad.Primitive(spec, x, tol_density=tol_density, max_evals=max_evals)


def kappa(c: Coefficient, x: float, t, tol: float = 1e-12):
    """``q1(t) int_x^t q2/q1``; vectorised in ``t``."""
    _need_split(c)
    t = np.asarray(t, dtype=float)
    span = max(float(np.max(np.abs(t - x))), 1e-300) if t.size else 1.0
    P = _ratio_primitive(c, x, tol_density=max(tol / span, 1e-15))
    out = np.asarray(c.q1(t), dtype=float) * P(t)
    return float(out) if out.ndim == 0 else out


def kappa_tilde(c: Coefficient, x: float, probes: int = 33, tol: float = 1e-12, *,
                max_evals: int = quad.DEFAULT_MAX_EVALS) -> float:
    """Grid lower estimate of ``sup_{t in Delta(x)} |kappa(t)|`` with one
    refinement pass around the grid argmax.

    For rapidly oscillating ``q2`` the wavelength cap may need a larger
    ``max_evals`` (gaussian_osc at x = 4 needs ~6e7).
    """
    if probes < 8:
        raise ValueError("kappa_tilde needs probes >= 8")
    dlt = delta_interval(c, x)
    P = _ratio_primitive(c, x, tol_density=max(tol / dlt.half_width, 1e-15), max_evals=max_evals)
    q1 = c.q1

    def k(ts):
        return np.abs(np.asarray(q1(ts), dtype=float) * P(ts))

    ts = np.linspace(dlt.lo, dlt.hi, probes)
    v = k(ts)
    i = int(np.argmax(v))
    fine = np.linspace(ts[max(i - 1, 0)], ts[min(i + 1, probes - 1)], probes)
    return float(max(v.max(), k(fine).max()))


def mu(c: Coefficient, x: float, t, tol: float = 1e-12):
    """``-(q1'(t)/q1(t)^2) kappa(t)``."""
    _need_split(c)
    t = np.asarray(t, dtype=float)
    q1 = np.asarray(c.q1(t), dtype=float)
    out = -(c.dq1(t) / q1 ** 2) * kappa(c, x, t, tol)
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# conditions a) - e)


@dataclass
class ConditionRecord:
    name: str
    statement: str
    probes: List[float]
    values: List[float]
    verdict: str
    note: str = ""


@dataclass
class ConditionReport:
    records: List[ConditionRecord]
    nu: Optional[float] = None
    q1_min: Optional[Tuple[float, float]] = None  # (argmin, min) of the positivity scan

    def __getitem__(self, name: str) -> ConditionRecord:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)

    @property
    def all_hold(self) -> bool:
        return all(r.verdict == HOLDS for r in self.records)


def _strictly_decreasing(v) -> bool:
    v = np.asarray(v, dtype=float)
    return bool(np.all(np.isfinite(v)) and np.all(np.diff(v) < 0))


def _strictly_increasing(v) -> bool:
    v = np.asarray(v, dtype=float)
    return bool(np.all(np.isfinite(v)) and np.all(np.diff(v) > 0))


def q1_positivity_scan(c: Coefficient, lo: float, hi: float, n: int = 4097) -> Tuple[float, float]:
    """``(argmin, min)`` of ``q1`` on ``[lo, hi]``: grid scan, then a bounded
    local minimisation around every sampled local minimum."""
    _need_split(c)
    q1 = c.q1
    xs = np.linspace(lo, hi, n)
    v = np.asarray(q1(xs), dtype=float)
    cand = [0, n - 1] + [i for i in range(1, n - 1) if v[i] <= v[i - 1] and v[i] <= v[i + 1]]
    best = (float(xs[int(np.argmin(v))]), float(v.min()))
    for i in cand:
        a, b = xs[max(i - 1, 0)], xs[min(i + 1, n - 1)]
        r = minimize_scalar(lambda t: _f(q1, t), bounds=(a, b), method="bounded",
                            options={"xatol": 1e-12 * max(1.0, abs(a))})
        if r.fun < best[1]:
            best = (float(r.x), float(r.fun))
    return best


def check_conditions(c: Coefficient, probe_xs: Sequence[float], tol: float = 1e-12,
                     kappa_probes: int = 33) -> ConditionReport:
    """Evaluate conditions a) - e) at the probes (sorted increasing in ``|x|``).

    a) s(x) -> inf              : s strictly increasing along probes
    b) 1/s >= |q1'|/q1^2        : s |q1'|/q1^2 <= 1 at every probe, and q1 > 0
                                  on the scanned range
    c) s/(x q1) -> 0            : strictly decreasing at probes with |x| >= 1
    d) 1/nu <= s(t)/s(x) <= nu  : empirical nu on a 16-point grid over Delta(x);
                                  per-probe values must not grow (5% slack)
    e) kappa~(x) -> 0           : strictly decreasing along probes

    Every verdict is ``inconclusive`` with fewer than 3 usable probes.
    """
    _need_split(c)
    _need_weight(c)
    xs = [float(x) for x in probe_xs]
    if any(abs(b) < abs(a) for a, b in zip(xs, xs[1:])):
        raise ValueError("probe_xs must be sorted increasing in |x|")
    enough = len(xs) >= 3
    s, q1 = c.s, c.q1
    sv = [_f(s, x) for x in xs]
    q1v = [_f(q1, x) for x in xs]
    dq1v = [float(c.dq1(np.array(x))) for x in xs]

    lo, hi = min(xs) - 1.0, max(xs) + 1.0
    arg, qmin = q1_positivity_scan(c, lo, hi)
    qscale = max(1.0, max(abs(v) for v in q1v))
    positive = qmin > 1e-12 * qscale
    recs = []

    def verdict(ok, usable=enough):
        return INCONCLUSIVE if not usable else (HOLDS if ok else FAILS)

    recs.append(ConditionRecord("a", "s(x) -> infinity", xs, sv, verdict(_strictly_increasing(sv))))

    with np.errstate(divide="ignore", invalid="ignore"):
        bv = [si * abs(d) / (qi * qi) if qi > 0 else math.inf for si, d, qi in zip(sv, dq1v, q1v)]
    note_b = "" if positive else f"q1 vanishes: min q1 = {qmin:.3g} at x = {arg:.12g}"
    recs.append(ConditionRecord("b", "s |q1'| / q1^2 <= 1", xs, bv,
                                verdict(positive and all(v <= 1.0 for v in bv)), note_b))

    cx = [x for x in xs if abs(x) >= 1.0]
    cv = [_f(s, x) / (abs(x) * _f(q1, x)) for x in cx]
    recs.append(ConditionRecord("c", "s / (|x| q1) -> 0", cx, cv,
                                verdict(_strictly_decreasing(cv), len(cx) >= 3),
                                "" if len(cx) == len(xs) else "probes with |x| < 1 skipped"))

    nus: List[float] = []
    nu = None
    if positive:
        for x, sx in zip(xs, sv):
            dl = delta_interval(c, x)
            st = np.asarray(s(np.linspace(dl.lo, dl.hi, NU_GRID)), dtype=float)
            r = st / sx
            nus.append(float(np.max(np.maximum(r, 1.0 / r))))
        nu = max(nus)
        ok_d = all(b <= a * (1.0 + NU_SLACK) for a, b in zip(nus, nus[1:]))
        recs.append(ConditionRecord("d", "1/nu <= s(t)/s(x) <= nu on Delta(x)", xs, nus,
                                    verdict(ok_d), f"empirical nu = {nu:.6g}"))
    else:
        recs.append(ConditionRecord("d", "1/nu <= s(t)/s(x) <= nu on Delta(x)", xs, [], FAILS,
                                    "Delta(x) undefined where q1 vanishes"))

    if positive:
        kv = [kappa_tilde(c, x, kappa_probes, tol) for x in xs]
        zero = all(v <= tol for v in kv)
        recs.append(ConditionRecord("e", "kappa~(x) -> 0", xs, kv,
                                    verdict(zero or _strictly_decreasing(kv)),
                                    "kappa~ vanishes identically" if zero else ""))
    else:
        recs.append(ConditionRecord("e", "kappa~(x) -> 0", xs, [], FAILS,
                                    "Delta(x) undefined where q1 vanishes"))
    return ConditionReport(records=recs, nu=nu, q1_min=(arg, qmin))


# ---------------------------------------------------------------------------
# majorant and J asymptotics


@dataclass
class MajorantValue:
    p: LebesgueExponent
    x: float
    value: float
    verified: Optional[bool] = None  # result of check_conditions when supplied


def majorant(c: Coefficient, p, x: float, report: Optional[ConditionReport] = None) -> MajorantValue:
    """``kappa_p(x)``: 1 for p = 1, ``(p' q1(x))^{-1/p'}`` for 1 < p < inf,
    ``1/q1(x)`` for p = inf."""
    _need_split(c)
    p = LebesgueExponent.parse(p)
    q1x = _f(c.q1, x)
    if p.p == 1.0:
        v = 1.0
    elif math.isinf(p.p):
        v = 1.0 / q1x
    else:
        pc = p.p_conj
        v = (pc * q1x) ** (-1.0 / pc)
    return MajorantValue(p=p, x=float(x), value=v,
                         verified=None if report is None else report.all_hold)


def asymptotic_j_check(c: Coefficient, probe_xs: Sequence[float], tol: float = 1e-12
                       ) -> List[Tuple[float, float]]:
    """``eps(x) = q1(x) J(x) - 1`` at every probe."""
    _need_split(c)
    return [(float(x), _f(c.q1, x) * j_integral(c, x, 1.0, tol).value - 1.0) for x in probe_xs]


def majorant_ratios(c: Coefficient, p, probe_xs: Sequence[float], tol: float = 1e-12
                    ) -> List[Tuple[float, float]]:
    """``green_norm / majorant`` at every probe."""
    return [(float(x), green_norm(c, x, p, tol) / majorant(c, p, x).value) for x in probe_xs]


# ---------------------------------------------------------------------------
# d(x) asymptotics


SIGMA_GRID = 33


def sigma_pair(c: Coefficient, x: float, tol: float = 1e-12) -> Tuple[float, float]:
    """``(sigma1, sigma2)`` over ``|z| <= 2/q1(x)``:

        sigma1 = sup |int_0^z [q1(x+t) - 2 q1(x) + q1(x-t)] dt|
        sigma2 = sup |int_{x-z}^{x+z} q2|

    Both are grid sups (33 points) with one refinement around the argmax.
    """
    _need_split(c)
    q1, q2 = c.split
    q1x = _f(q1, x)
    r = 2.0 / q1x
    dens = max(tol / r, 1e-15)
    P1 = quad.Primitive(quad.IntegrandSpec(q1, breakpoints=tuple(c.kinks)), x, tol_density=dens)
    P2 = quad.Primitive(quad.IntegrandSpec(q2, phase_hint=c.phase_hint, breakpoints=tuple(c.kinks)),
                        x, tol_density=dens)

    def s1(z):
        return np.abs(P1(x + z) - P1(x - z) - 2.0 * q1x * z)

    def s2(z):
        return np.abs(P2(x + z) - P2(x - z))

    zs = np.linspace(-r, r, SIGMA_GRID)
    out = []
    for fn in (s1, s2):
        v = fn(zs)
        i = int(np.argmax(v))
        fine = np.linspace(zs[max(i - 1, 0)], zs[min(i + 1, SIGMA_GRID - 1)], SIGMA_GRID)
        out.append(float(max(v.max(), fn(fine).max())))
    return out[0], out[1]


def d_asymptotic_check(c: Coefficient, probe_xs: Sequence[float], tol: float = 1e-12
                       ) -> List[Tuple[float, float]]:
    """``q1(x) d(x)`` at every probe; warns when sigma1 + sigma2 does not
    decrease along the probes (the hypothesis under which q1 d -> 1)."""
    _need_split(c)
    xs = [float(x) for x in probe_xs]
    sig = [sum(sigma_pair(c, x, tol)) for x in xs]
    if len(xs) >= 2 and not _strictly_decreasing(sig) and max(sig) > tol:
        warnings.warn(f"{c.label}: sigma1 + sigma2 is not decreasing along the probes",
                      RuntimeWarning, stacklevel=2)
    return [(x, _f(c.q1, x) * d_function(c, x).d) for x in xs]


@dataclass
class TwoSidedBand:
    """Ratios ``G_p(x)^{p'} / d(x)`` and their spread ``max/min``."""

    p: LebesgueExponent
    xs: List[float]
    ratios: List[float] = field(default_factory=list)

    @property
    def width(self) -> float:
        return max(self.ratios) / min(self.ratios)


def two_sided_band(c: Coefficient, p, probe_xs: Sequence[float], tol: float = 1e-12) -> TwoSidedBand:
    p = LebesgueExponent.parse(p)
    if p.p == 1.0:
        raise ValueError("the two-sided estimate is trivial for p = 1 (G_1 = 1)")
    xs = [float(x) for x in probe_xs]
    pc = p.p_conj
    ratios = [green_norm(c, x, p, tol) ** pc / d_function(c, x).d for x in xs]
    return TwoSidedBand(p=p, xs=xs, ratios=ratios)
