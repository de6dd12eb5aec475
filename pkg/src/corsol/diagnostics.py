"""Verdicts: correct solvability, tending in whole to zero, resolvent compactness.

* Solvability in L_p (every p at once) holds iff ``q0(a) > 0`` for some ``a``.
* For p in (1, inf] solutions with unit-norm right-hand sides tend in whole
  to zero iff ``d(x) -> 0``, equivalently ``int_{x-a}^{x+a} q -> inf`` for
  every ``a``; for p = 1 they never do (G_1 = 1).
* The inverse operator is compact iff ``d(x) -> 0``.

Global quantifiers are replaced by windowed scans and probe ladders, so
every verdict is three-valued and carries its evidence.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .coefficient import (SOLVABILITY_THRESHOLD, Coefficient, Q0Estimate, d_sweep, mass,
                          q0_estimate)
from .green import LebesgueExponent

SOLVABLE, NOT_SOLVABLE, INCONCLUSIVE = "Solvable", "NotSolvable", "Inconclusive"
TENDS, NOT_TENDING = "TendsInWhole", "NotTending"
COMPACT, NOT_COMPACT = "Compact", "NotCompact"

D_THRESHOLD = 0.1
D_RATIO = 0.2
STRIP_A = 0.01  # window half-length of the mass trend; small keeps oscillatory q affordable


@dataclass
class SolvabilityVerdict:
    verdict: str
    witness_a: Optional[float] = None
    q0_at_witness: Optional[float] = None
    evidence: List[Q0Estimate] = field(default_factory=list)
    note: str = ""


def _finite_mass_probe(c: Coefficient, window: float) -> Tuple[bool, List[float]]:
    """Masses over [-W, W] for W = window/4, window/2, window; "finite" when the
    last increment is at most half of the previous one or negligible."""
    ws = [window / 4.0, window / 2.0, window]
    m = [mass(c, -w, w, 1e-10) for w in ws]
    inc1, inc2 = m[1] - m[0], m[2] - m[1]
    return bool(inc2 <= 0.5 * inc1 or inc2 <= 1e-9 * max(1.0, m[2])), m


def solvability_verdict(c: Coefficient, a_ladder: Sequence[float], window: float,
                        grid_step: float) -> SolvabilityVerdict:
    """Solvable at the first ``a`` whose windowed ``q0(a)`` estimate exceeds
    1e-6.  NotSolvable needs every estimate below the threshold, a scanned
    width ``2 window >= 8 max(a)``, and either a finite-mass signature or a
    zero-mass gap; anything else is Inconclusive.  There is no ``p``: the answer is the
    same for every ``p``."""
    ladder = [float(a) for a in a_ladder]
    if not ladder or any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ValueError("a_ladder must be nonempty and increasing")
    evidence = []
    for a in ladder:
        est = q0_estimate(c, a, window, grid_step)
        evidence.append(est)
        if est.inf_value > SOLVABILITY_THRESHOLD:
            return SolvabilityVerdict(SOLVABLE, a, est.inf_value, evidence,
                                      f"windowed q0({a:g}) = {est.inf_value:.6g} > 0")
    # the scan covers [-window, window]; its full width must reach 8 max(a)
    if 2.0 * window < 8.0 * max(ladder):
        return SolvabilityVerdict(INCONCLUSIVE, evidence=evidence,
                                  note=f"scanned width {2 * window:g} < 8 max(a) = {8 * max(ladder):g}")
    finite, masses = _finite_mass_probe(c, window)
    gap = evidence[-1].inf_value <= 1e-12
    if finite or gap:
        why = []
        if finite:
            why.append("mass over [-W, W] saturates: " + ", ".join(f"{m:.6g}" for m in masses))
        if gap:
            why.append(f"zero-mass gap: q0({ladder[-1]:g}) = {evidence[-1].inf_value:.3g}")
        return SolvabilityVerdict(NOT_SOLVABLE, evidence=evidence, note="; ".join(why))
    return SolvabilityVerdict(INCONCLUSIVE, evidence=evidence,
                              note="q0 estimates small but mass keeps growing")


# ---------------------------------------------------------------------------
# limit tests shared by the strip and compactness verdicts


@dataclass
class LimitEvidence:
    d_trend: List[Tuple[float, float]]
    int_trend: List[Tuple[float, float]]
    d_tends: bool
    int_tends: bool


def _strict(v, sign) -> bool:
    v = np.asarray(v, dtype=float)
    return bool(v.size >= 2 and np.all(np.isfinite(v)) and np.all(sign * np.diff(v) > 0))


def d_tends_to_zero(ds: Sequence[float], threshold: float = D_THRESHOLD, ratio: float = D_RATIO) -> bool:
    return _strict(ds, -1) and ds[-1] < threshold and ds[-1] / ds[0] < ratio


def mass_tends_to_infinity(ms: Sequence[float], ratio: float = D_RATIO) -> bool:
    return _strict(ms, +1) and ms[0] > 0 and ms[-1] / ms[0] > 1.0 / ratio


def window_mass(c: Coefficient, x: float, a: float) -> float:
    """``int_{x-a}^{x+a} q`` to ~1e-9 relative; trend tests need no more, and an
    absolute target would sit below the evaluation noise of fast phases."""
    rough = float(np.mean(c(np.linspace(x - a, x + a, 33)))) * 2.0 * a
    return mass(c, x - a, x + a, max(1e-9 * abs(rough), 1e-13))


def limit_evidence(c: Coefficient, probe_xs: Sequence[float], a: float = STRIP_A,
                   threshold: float = D_THRESHOLD) -> LimitEvidence:
    xs = [float(x) for x in probe_xs]
    if any(abs(b) < abs(x) for x, b in zip(xs, xs[1:])):
        raise ValueError("probe_xs must be sorted increasing in |x|")
    ds = [r.d for r in d_sweep(c, xs)]
    ms = [window_mass(c, x, a) for x in xs]
    return LimitEvidence(d_trend=list(zip(xs, ds)), int_trend=list(zip(xs, ms)),
                         d_tends=d_tends_to_zero(ds, threshold), int_tends=mass_tends_to_infinity(ms))


def _classify(ev: LimitEvidence, yes: str, no: str) -> str:
    if ev.d_tends and ev.int_tends:
        return yes
    if not ev.d_tends and not ev.int_tends:
        return no
    return INCONCLUSIVE


@dataclass
class StripVerdict:
    p: LebesgueExponent
    verdict: str
    d_trend: List[Tuple[float, float]]
    int_trend: List[Tuple[float, float]]
    note: str = ""


def strip_verdict(c: Coefficient, p, probe_xs: Sequence[float], a: float = STRIP_A,
                  threshold: float = D_THRESHOLD) -> StripVerdict:
    """TendsInWhole needs d strictly decreasing with ``d_last < threshold`` and
    ``d_last/d_first < 0.2`` *and* a growing window mass; p = 1 is NotTending."""
    p = LebesgueExponent.parse(p)
    ev = limit_evidence(c, probe_xs, a, threshold)
    if p.p == 1.0:
        return StripVerdict(p, NOT_TENDING, ev.d_trend, ev.int_trend,
                            "p = 1: G_1(x) = 1, so unit-norm solutions never enter a thin strip")
    v = _classify(ev, TENDS, NOT_TENDING)
    note = "" if v != INCONCLUSIVE else "d trend and window-mass trend disagree"
    return StripVerdict(p, v, ev.d_trend, ev.int_trend, note)


@dataclass
class CompactnessVerdict:
    p: LebesgueExponent
    verdict: str
    d_trend: List[Tuple[float, float]]
    int_trend: List[Tuple[float, float]]
    note: str = ""


def compactness_verdict(c: Coefficient, p, probe_xs: Sequence[float], a: float = STRIP_A,
                        threshold: float = D_THRESHOLD) -> CompactnessVerdict:
    """Same limit test as :func:`strip_verdict`, relabelled.  The d-criterion is
    applied for every ``p``, including p = 1 where the strip verdict differs."""
    p = LebesgueExponent.parse(p)
    ev = limit_evidence(c, probe_xs, a, threshold)
    v = _classify(ev, COMPACT, NOT_COMPACT)
    note = ("compact iff d(x) -> 0, the same condition as tending in whole to zero "
            "for p in (1, inf]")
    if p.p == 1.0:
        note += "; for p = 1 the strip verdict is NotTending regardless"
    return CompactnessVerdict(p, v, ev.d_trend, ev.int_trend, note)


@dataclass
class EquivalenceResult:
    agreement: bool
    d_tends: bool
    int_tends: Dict[float, bool]
    d_trend: List[Tuple[float, float]]
    int_trends: Dict[float, List[Tuple[float, float]]]


def equivalence_crosscheck(c: Coefficient, probe_xs: Sequence[float],
                           a_ladder: Sequence[float] = (0.005, STRIP_A)) -> EquivalenceResult:
    """``d -> 0`` at the probes versus ``int_{x-a}^{x+a} q -> inf`` for every
    ``a`` of the ladder; agreement means both hold or both fail."""
    xs = [float(x) for x in probe_xs]
    ds = [r.d for r in d_sweep(c, xs)]
    d_ok = d_tends_to_zero(ds)
    trends, oks = {}, {}
    for a in a_ladder:
        ms = [window_mass(c, x, a) for x in xs]
        trends[float(a)] = list(zip(xs, ms))
        oks[float(a)] = mass_tends_to_infinity(ms)
    return EquivalenceResult(agreement=d_ok == all(oks.values()), d_tends=d_ok, int_tends=oks,
                             d_trend=list(zip(xs, ds)), int_trends=trends)
