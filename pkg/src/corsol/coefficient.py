"""Coefficients q >= 0, their mass windows, d(x), q0(a) and R(x)-coverings.

Global quantifiers over the real line (inf over x, sup over x) are replaced by
grid scans over a stated window; the window and step travel with the result.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Tuple

import numpy as np

from . import quadrature as quad
from .errors import BracketFailure, MassDeficit, NotSolvable, QuadratureFailure, UnknownName
from .expression import Expression

DEFAULT_ROOT_TOL = 1e-11
DEFAULT_D_MAX = 100.0
DEFAULT_TOL_DENSITY = 1e-14

Fn = Callable[[np.ndarray], np.ndarray]


def _const(v):
    return lambda x: np.full(np.shape(x), float(v))


@dataclass(frozen=True)
class Coefficient:
    """The coefficient ``q`` with an optional split ``q = q1 + q2``.

    ``s`` is the auxiliary weight used by the asymptotic-majorant conditions;
    ``decay_floor`` is a pair ``(a, q0)`` with every window of half-length
    ``a`` known to carry mass at least ``q0`` (used to certify tails).
    """

    q: Fn
    label: str
    split: Optional[Tuple[Fn, Fn]] = None
    s: Optional[Fn] = None
    phase_hint: Optional[Fn] = None
    parity: str = "none"
    q1_prime: Optional[Fn] = None
    decay_floor: Optional[Tuple[float, float]] = None
    text: Optional[str] = None
    kinks: Tuple[float, ...] = ()  # points where q is not smooth; panel edges are placed there

    def __call__(self, x):
        return np.asarray(self.q(np.asarray(x, dtype=float)), dtype=float)

    @property
    def q1(self) -> Fn:
        return self.split[0]

    @property
    def q2(self) -> Fn:
        return self.split[1]

    def integrand(self, scale: float = 1.0) -> quad.IntegrandSpec:
        q = self.q
        fn = q if scale == 1.0 else (lambda t: scale * q(t))
        return quad.IntegrandSpec(fn, phase_hint=self.phase_hint, breakpoints=tuple(self.kinks),
                                  smoothness_class=quad.Smoothness.OSCILLATORY
                                  if self.phase_hint else quad.Smoothness.SMOOTH)

    def dq1(self, x):
        """q1'(x): analytic when supplied, otherwise a central difference."""
        x = np.asarray(x, dtype=float)
        if self.q1_prime is not None:
            return np.asarray(self.q1_prime(x), dtype=float)
        h = np.maximum(1e-6, 1e-6 * np.abs(x))
        return (self.q1(x + h) - self.q1(x - h)) / (2.0 * h)

    def with_split(self, q1, q2, *, s=None, q1_prime=None) -> "Coefficient":
        q1 = _as_fn(q1)
        q2 = _as_fn(q2)
        return replace(self, split=(q1, q2), s=_as_fn(s) if s is not None else self.s,
                       q1_prime=_as_fn(q1_prime) if q1_prime is not None else None)

    def check_invariants(self, xs) -> None:
        """Raise ``ValueError`` if sampled values break the model invariants."""
        xs = np.asarray(xs, dtype=float)
        qv = self(xs)
        if np.any(qv < -1e-12):
            raise ValueError(f"{self.label}: q < 0 at x={xs[qv < -1e-12][0]}")
        if self.split is not None:
            q1v, q2v = self.q1(xs), self.q2(xs)
            if np.any(np.abs(qv - (q1v + q2v)) > 1e-10 * (1.0 + np.abs(q1v))):
                raise ValueError(f"{self.label}: q != q1 + q2 on samples")


def _as_fn(f):
    if f is None:
        return None
    if isinstance(f, str):
        return Expression(f)
    if isinstance(f, (int, float)):
        return _const(f)
    return quad.as_vectorized(f)


# ---------------------------------------------------------------------------
# construction


def parse_coefficient(expr: str, label: Optional[str] = None) -> Coefficient:
    """Coefficient from an expression in ``x``; sign is not checked here."""
    e = Expression(expr)
    return Coefficient(q=e, label=label or f"expr:{expr}", text=expr)


def shifted(c: Coefficient, lam: float) -> Coefficient:
    """``q + lam``; the split (when present) shifts its smooth part."""
    q = c.q
    split = None
    if c.split is not None:
        q1, q2 = c.split
        split = (lambda x: q1(x) + lam, q2)
    floor = None
    if c.decay_floor is not None and lam >= 0:
        a, q0 = c.decay_floor
        floor = (a, q0 + 2.0 * a * lam)
    return replace(c, q=lambda x: q(x) + lam, split=split, label=f"{c.label}+{lam!r}",
                   decay_floor=floor)


def reflected(c: Coefficient) -> Coefficient:
    """``x -> q(-x)``, which turns left-sided integrals into right-sided ones."""
    if c.parity == "even":
        return c
    q = c.q

    def refl(f):
        return None if f is None else (lambda x: f(-np.asarray(x, dtype=float)))

    split = None if c.split is None else (refl(c.split[0]), refl(c.split[1]))
    q1p = None if c.q1_prime is None else (lambda x: -c.q1_prime(-np.asarray(x, dtype=float)))
    return replace(c, q=refl(q), split=split, s=refl(c.s), phase_hint=refl(c.phase_hint),
                   q1_prime=q1p, kinks=tuple(-k for k in c.kinks), label=f"reflect({c.label})")


def _gauss_osc():
    def q(x):
        e = np.exp(x * x)
        return e + e * np.cos(e)

    q1 = lambda x: np.exp(x * x)
    q2 = lambda x: np.exp(x * x) * np.cos(np.exp(x * x))
    return Coefficient(
        q=q, label="gaussian_osc", split=(q1, q2),
        s=lambda x: np.exp(x * x) / (8.0 * np.sqrt(1.0 + x * x)),
        phase_hint=lambda x: np.exp(x * x), parity="even",
        q1_prime=lambda x: 2.0 * x * np.exp(x * x),
        # grid scan over [-2, 2]: min_x int_{x-1}^{x+1} q = 2.7629; half of it
        decay_floor=(1.0, 1.38),
    )


def _exp_osc():
    def q(x):
        e = np.exp(np.abs(x))
        return e + e * np.cos(e * e)

    return Coefficient(
        q=q, label="exp_osc",
        split=(lambda x: np.exp(np.abs(x)), lambda x: np.exp(np.abs(x)) * np.cos(np.exp(2 * np.abs(x)))),
        phase_hint=lambda x: np.exp(2.0 * np.abs(x)), parity="even",
        q1_prime=lambda x: np.sign(x) * np.exp(np.abs(x)),
        # grid scan over [-2, 2]: min_x int_{x-1}^{x+1} q = 2.6223; half of it
        decay_floor=(1.0, 1.31), kinks=(0.0,),
    )


CATALOG = {
    "constant_one": lambda: Coefficient(
        q=_const(1.0), label="constant_one", split=(_const(1.0), _const(0.0)),
        s=lambda x: np.sqrt(1.0 + np.abs(x)), parity="even", q1_prime=_const(0.0),
        decay_floor=(1.0, 2.0)),
    "gaussian_osc": _gauss_osc,
    "exp_osc": _exp_osc,
    "one_plus_cos": lambda: Coefficient(
        q=lambda x: 1.0 + np.cos(x), label="one_plus_cos",
        split=(lambda x: 1.0 + np.cos(x), _const(0.0)),
        s=lambda x: np.sqrt(1.0 + np.abs(x)), parity="even",
        q1_prime=lambda x: -np.sin(x),
        # every window of length 2*pi carries exactly 2*pi
        decay_floor=(math.pi, 2.0 * math.pi)),
}


def catalog(name: str) -> Coefficient:
    try:
        return CATALOG[name]()
    except KeyError:
        raise UnknownName(f"unknown catalog coefficient {name!r}; "
                          f"known: {', '.join(sorted(CATALOG))}") from None


def resolve(name_or_expr: str) -> Coefficient:
    """Catalog name, or ``expr:<expression>``."""
    if name_or_expr.startswith("expr:"):
        return parse_coefficient(name_or_expr[5:])
    return catalog(name_or_expr)


# ---------------------------------------------------------------------------
# mass and d(x)


def primitive(c: Coefficient, anchor: float, tol_density: float = DEFAULT_TOL_DENSITY,
              max_evals: int = quad.DEFAULT_MAX_EVALS) -> quad.Primitive:
    return quad.Primitive(c.integrand(), anchor, tol_density=tol_density, max_evals=max_evals)


def mass(c: Coefficient, lo: float, hi: float, tol: float = 1e-12) -> float:
    """``int_lo^hi q``."""
    return quad.integrate(c.integrand(), lo, hi, tol).value


@dataclass
class DFunctionResult:
    x: float
    d: float
    bracket: Tuple[float, float]
    residual: float


def _d_core(P: quad.Primitive, xs: np.ndarray, root_tol: float, d_max: float):
    """Lockstep bracket growth and bisection for every x in ``xs``."""
    xs = np.asarray(xs, dtype=float)

    def F(x, d):
        v = P(np.concatenate([x - d, x + d]))
        n = x.size
        return v[n:] - v[:n]

    n = xs.size
    lo = np.zeros(n)
    hi = np.full(n, root_tol)
    f_hi = F(xs, hi)
    grow = f_hi < 2.0
    while grow.any():
        stuck = grow & (hi >= d_max)
        if stuck.any():
            i = int(np.flatnonzero(stuck)[0])
            raise MassDeficit(f"int over [{xs[i]} - {d_max}, {xs[i]} + {d_max}] of q is "
                              f"{f_hi[i]:.6g} < 2")
        lo[grow] = hi[grow]
        hi[grow] = np.minimum(2.0 * hi[grow], d_max)
        f_hi[grow] = F(xs[grow], hi[grow])
        grow = f_hi < 2.0
    active = ~((hi - lo <= root_tol) & (f_hi - 2.0 <= root_tol))
    while active.any():
        idx = np.flatnonzero(active)
        mid = 0.5 * (lo[idx] + hi[idx])
        floor = (mid <= lo[idx]) | (mid >= hi[idx])
        if floor.any():
            bad = idx[floor][f_hi[idx[floor]] - 2.0 > root_tol]
            if bad.size:
                raise QuadratureFailure(
                    f"d({xs[bad[0]]}): bracket at machine resolution with residual "
                    f"{f_hi[bad[0]] - 2.0:.3g}")
            active[idx[floor]] = False
            idx, mid = idx[~floor], mid[~floor]
            if not idx.size:
                break
        fm = F(xs[idx], mid)
        up = fm >= 2.0
        hi[idx[up]] = mid[up]
        f_hi[idx[up]] = fm[up]
        lo[idx[~up]] = mid[~up]
        active[idx] = ~((hi[idx] - lo[idx] <= root_tol) & (f_hi[idx] - 2.0 <= root_tol))
    return lo, hi, np.abs(f_hi - 2.0)


def d_function(c: Coefficient, x: float, root_tol: float = DEFAULT_ROOT_TOL,
               d_max: float = DEFAULT_D_MAX, *, prim: Optional[quad.Primitive] = None) -> DFunctionResult:
    """Smallest ``d`` with ``int_{x-d}^{x+d} q = 2``.

    Brackets by doubling from ``d = root_tol`` and bisects on the predicate
    ``F(d) >= 2``, so plateaus of ``F`` (q vanishing near x) resolve to the
    leftmost root.
    """
    if not (root_tol > 0 and d_max > 0):
        raise ValueError("root_tol and d_max must be positive")
    x = float(x)
    P = prim if prim is not None else primitive(c, x)
    lo, hi, res = _d_core(P, np.array([x]), root_tol, d_max)
    return DFunctionResult(x=x, d=float(hi[0]), bracket=(float(lo[0]), float(hi[0])),
                           residual=float(res[0]))


def q_star(c: Coefficient, x: float, **kw) -> float:
    return 1.0 / d_function(c, x, **kw).d


def scan_grid(window: float, grid_step: float) -> np.ndarray:
    n = int(math.floor(2.0 * window / grid_step + 1e-9))
    return -window + grid_step * np.arange(n + 1)


@dataclass
class Q0Estimate:
    """Windowed grid estimate of ``inf_x int_{x-a}^{x+a} q``.

    This is a lower-confidence estimate of the global infimum, not a proof:
    only grid points in ``[-window, window]`` are inspected.
    """

    a: float
    inf_value: float
    argmin_x: float
    window: Tuple[float, float]
    grid_step: float
    samples: Optional[np.ndarray] = field(default=None, repr=False)


def window_masses(c: Coefficient, xs, a: float, *, prim: Optional[quad.Primitive] = None) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    P = prim if prim is not None else primitive(c, 0.0)
    return P(xs + a) - P(xs - a)


def q0_estimate(c: Coefficient, a: float, window: float, grid_step: float) -> Q0Estimate:
    if not (a > 0 and window > 0 and grid_step > 0):
        raise ValueError("a, window and grid_step must be positive")
    xs = scan_grid(window, grid_step)
    m = window_masses(c, xs, a)
    i = int(np.argmin(m))
    return Q0Estimate(a=a, inf_value=max(float(m[i]), 0.0), argmin_x=float(xs[i]),
                      window=(-window, window), grid_step=grid_step, samples=m)


SOLVABILITY_THRESHOLD = 1e-6
DEFAULT_A_LADDER = (0.5, 1.0, 2.0, 4.0, 8.0)


@functools.lru_cache(maxsize=64)
def decay_floor(c: Coefficient, a_ladder=DEFAULT_A_LADDER, window: Optional[float] = None) -> Tuple[float, float]:
    """A pair ``(a, q0)`` used to bound exponential tails.

    Catalog entries carry a floor; otherwise the first ``a`` of the ladder
    whose windowed estimate of ``q0(a)`` exceeds the solvability threshold is
    used, with half of the estimate as a safety margin against the scan
    missing the true infimum.
    """
    if c.decay_floor is not None:
        return c.decay_floor
    for a in a_ladder:
        w = window if window is not None else max(8.0 * a, 16.0)
        est = q0_estimate(c, a, w, a / 8.0)
        if est.inf_value > SOLVABILITY_THRESHOLD:
            return (a, 0.5 * est.inf_value)
    raise NotSolvable(f"{c.label}: no window length in {tuple(a_ladder)} carries positive mass "
                      f"everywhere on the scanned range")


def d_sweep(c: Coefficient, xs, root_tol: float = DEFAULT_ROOT_TOL,
            d_max: float = DEFAULT_D_MAX) -> List[DFunctionResult]:
    """d at each point of ``xs``.

    Non-oscillatory coefficients share one running integral and bisect in
    lockstep; oscillatory ones get a local running integral per point so that
    no panelling is spent between far-apart sample points.
    """
    xs = np.asarray(xs, dtype=float)
    if c.phase_hint is not None:
        return [d_function(c, x, root_tol, d_max) for x in xs]
    P = primitive(c, 0.0)
    lo, hi, res = _d_core(P, xs, root_tol, d_max)
    return [DFunctionResult(x=float(x), d=float(h), bracket=(float(l), float(h)), residual=float(r))
            for x, l, h, r in zip(xs, lo, hi, res)]


def d_sup_estimate(c: Coefficient, window: float, grid_step: float,
                   root_tol: float = DEFAULT_ROOT_TOL, d_max: float = DEFAULT_D_MAX) -> float:
    """Grid maximum of d over ``[-window, window]`` (windowed estimate of d0)."""
    return max(r.d for r in d_sweep(c, scan_grid(window, grid_step), root_tol, d_max))


# ---------------------------------------------------------------------------
# R(x)-coverings


@dataclass
class Segment:
    center: float
    radius: float
    left: float
    right: float


@dataclass
class Covering:
    origin: float
    segments: List[Segment]

    def masses(self, c: Coefficient, tol: float = 1e-13) -> np.ndarray:
        return np.array([mass(c, s.left, s.right, tol) for s in self.segments])


def _mass_reach(P: quad.Primitive, left: float, root_tol: float, d_max: float) -> float:
    """Leftmost ``R`` with ``int_left^R q = 2`` (bracket doubling, then bisection)."""
    p0 = float(P(left))
    lo, hi = left, left + root_tol
    while float(P(hi)) - p0 < 2.0:
        if hi - left >= 2.0 * d_max:
            raise BracketFailure(f"no segment centre within {d_max} of {left}")
        lo, hi = hi, left + min(2.0 * (hi - left), 2.0 * d_max)
    while hi - lo > root_tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if float(P(mid)) - p0 >= 2.0:
            hi = mid
        else:
            lo = mid
    return hi


def r_covering(c: Coefficient, origin: float, count: int, root_tol: float = DEFAULT_ROOT_TOL,
               d_max: float = DEFAULT_D_MAX) -> Covering:
    """Abutting segments ``[x_n - d(x_n), x_n + d(x_n)]`` tiling ``[origin, ...)``.

    With left end ``L`` and ``R`` the leftmost point where ``int_L^R q = 2``,
    the centre ``(L + R)/2`` has ``d = (R - L)/2`` exactly: a shorter symmetric
    window would drop mass near ``R``, which is positive by leftmost-ness.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    P = primitive(c, float(origin))
    segs: List[Segment] = []
    left = float(origin)
    for _ in range(count):
        right = _mass_reach(P, left, root_tol, d_max)
        centre = 0.5 * (left + right)
        segs.append(Segment(center=centre, radius=0.5 * (right - left), left=left, right=right))
        left = right
    return Covering(origin=float(origin), segments=segs)
