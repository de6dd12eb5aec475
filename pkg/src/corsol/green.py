"""The Green kernel, the solution operator and the norm function G_p.

    y(x) = (Gf)(x) = int_x^inf exp(-int_x^t q) f(t) dt

solves -y' + q y = f whenever some window length 2a carries mass at least
q0 > 0 everywhere; every semi-infinite integral here is truncated with the
tail bound that this mass floor certifies.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import quadrature as quad
from .coefficient import Coefficient, decay_floor, primitive, reflected
from .errors import NotSolvable, ZeroRHS
from .expression import Expression

ZERO_RHS = 1e-13
DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class LebesgueExponent:
    """``p`` in ``[1, inf]`` with its conjugate ``p' = p / (p - 1)``."""

    p: float

    def __post_init__(self):
        p = float(self.p)
        if not p >= 1.0:
            raise ValueError(f"p must lie in [1, inf], got {self.p}")
        object.__setattr__(self, "p", p)

    @classmethod
    def parse(cls, value) -> "LebesgueExponent":
        if isinstance(value, LebesgueExponent):
            return value
        if isinstance(value, str) and value.strip().lower() in ("inf", "infinity", "oo"):
            return cls(math.inf)
        return cls(float(value))

    @property
    def p_conj(self) -> float:
        if self.p == 1.0:
            return math.inf
        if math.isinf(self.p):
            return 1.0
        return self.p / (self.p - 1.0)

    def __str__(self):
        return "inf" if math.isinf(self.p) else f"{self.p:g}"


@dataclass
class RightHandSide:
    """A right-hand side ``f``: an expression in ``x``, an indicator, or a bump.

    ``tail_sup(T)`` bounds ``sup_{t >= T} |f(t)|``; it is exact for indicators
    and bumps and a sampled heuristic for expressions.
    """

    vectorized = True

    kind: str  # expression | indicator | gaussian_bump
    text: str = ""
    a: float = 0.0
    b: float = 0.0
    height: float = 1.0
    center: float = 0.0
    width: float = 1.0
    p_norm_cache: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if self.kind == "indicator":
            if not (self.a < self.b and self.height > 0):
                raise ValueError("indicator needs a < b and height > 0")
        elif self.kind == "gaussian_bump":
            if not self.width > 0:
                raise ValueError("gaussian_bump needs width > 0")
        elif self.kind == "expression":
            self._expr = Expression(self.text)
        else:
            raise ValueError(f"unknown right-hand side kind {self.kind!r}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "indicator":
            return np.where((t >= self.a) & (t <= self.b), self.height, 0.0)
        if self.kind == "gaussian_bump":
            return np.exp(-(((t - self.center) / self.width) ** 2))
        return np.broadcast_to(np.asarray(self._expr(t), dtype=float), t.shape)

    def breakpoints(self) -> Tuple[float, ...]:
        return (self.a, self.b) if self.kind == "indicator" else ()

    def tail_sup(self, T: float) -> float:
        if self.kind == "indicator":
            return 0.0 if T > self.b else self.height
        if self.kind == "gaussian_bump":
            return 1.0 if T <= self.center else math.exp(-(((T - self.center) / self.width) ** 2))
        offs = np.concatenate([[0.0], 2.0 ** np.arange(-20, 13)])
        return float(np.max(np.abs(self(T + offs))))

    def p_norm(self, p, domain: Optional[Tuple[float, float]] = None, tol: float = 1e-12) -> float:
        """``||f||_p``; closed form for indicators and bumps, quadrature over
        ``domain`` (default ``[-50, 50]``) for expressions."""
        p = LebesgueExponent.parse(p)
        if self.p_norm_cache is not None and self.p_norm_cache[0] == p.p:
            return self.p_norm_cache[1]
        if self.kind == "indicator":
            v = self.height if math.isinf(p.p) else self.height * (self.b - self.a) ** (1.0 / p.p)
        elif self.kind == "gaussian_bump":
            v = 1.0 if math.isinf(p.p) else (self.width * math.sqrt(math.pi / p.p)) ** (1.0 / p.p)
        else:
            lo, hi = domain if domain is not None else (-50.0, 50.0)
            if math.isinf(p.p):
                v = float(np.max(np.abs(self(np.linspace(lo, hi, 100_001)))))
            else:
                spec = quad.IntegrandSpec(lambda t: np.abs(self(t)) ** p.p)
                v = quad.integrate(spec, lo, hi, tol).value ** (1.0 / p.p)
        self.p_norm_cache = (p.p, v)
        return v


def expression_rhs(text: str) -> RightHandSide:
    return RightHandSide("expression", text=text)


def indicator(a: float, b: float, height: float = 1.0) -> RightHandSide:
    return RightHandSide("indicator", a=a, b=b, height=height)


def gaussian_bump(center: float = 0.0, width: float = 1.0) -> RightHandSide:
    return RightHandSide("gaussian_bump", center=center, width=width)


@dataclass
class SolutionSample:
    x: float
    y: float
    error_estimate: float
    truncated_at: float


def _floor(c: Coefficient) -> Tuple[float, float]:
    a, q0 = decay_floor(c)
    if not q0 > 0:
        raise NotSolvable(f"{c.label}: mass floor q0={q0} is not positive")
    return a, q0


def kernel(c: Coefficient, x: float, t: float, tol: float = DEFAULT_TOL) -> float:
    """``G(x, t)``: zero for ``t < x``, else ``exp(-int_x^t q)``."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    if t < x:
        return 0.0
    return math.exp(-quad.integrate(c.integrand(), x, t, tol).value)


def j_integral(c: Coefficient, x: float, s: float = 1.0, tol: float = DEFAULT_TOL, *,
               horizon: Optional[float] = None) -> quad.IntegralResult:
    """``J_s(x) = int_x^inf exp(-s int_x^t q) dt`` with a certified tail.

    Shifted integrals ``int_x^inf exp(-int_x^t (q + lam))`` are obtained by
    passing ``shifted(c, lam)``; their left-sided mirrors by ``reflected``.
    """
    if not s > 0:
        raise ValueError("s must be positive")
    a, q0 = _floor(c)
    acc = quad.ExponentAccumulator(primitive(c, x), x, s)
    return quad.integrate_exp_tail(acc, float(x), (a, s * q0), tol, horizon=horizon)


def green_norm(c: Coefficient, x: float, p, tol: float = DEFAULT_TOL) -> float:
    """``G_p(x) = sup_{||f||_p = 1} |(Gf)(x)|``, the ``L_{p'}`` norm of ``G(x, .)``.

    For ``p = 1`` this is the sup of the kernel, attained at ``t = x``: 1.
    """
    p = LebesgueExponent.parse(p)
    _floor(c)
    if p.p == 1.0:
        return 1.0
    pc = p.p_conj
    v = j_integral(c, x, pc, tol).value
    return v if pc == 1.0 else v ** (1.0 / pc)


def apply(c: Coefficient, f: RightHandSide, x: float, tol: float = DEFAULT_TOL) -> SolutionSample:
    """``(Gf)(x)`` with the tail past the truncation point bounded via ``f.tail_sup``."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    a, q0 = _floor(c)
    x = float(x)
    if f.kind == "indicator" and x >= f.b:
        return SolutionSample(x, 0.0, 0.0, x)
    acc = quad.ExponentAccumulator(primitive(c, x), x)
    r = quad.integrate_exp_tail(acc, x, (a, q0), tol, weight=f, weight_tail_sup=f.tail_sup,
                                weight_breakpoints=f.breakpoints())
    return SolutionSample(x, r.value, r.abs_error_estimate, r.truncated_at)


def apply_grid(c: Coefficient, f: RightHandSide, grid, tol: float = DEFAULT_TOL) -> np.ndarray:
    """``Gf`` on a strictly increasing grid by a backward sweep,

        y(x_i) = G(x_i, x_{i+1}) y(x_{i+1}) + int_{x_i}^{x_{i+1}} G(x_i, t) f(t) dt,

    seeded with a certified :func:`apply` at the right end.  The sweep is
    stable: every step multiplies the carried error by a factor <= 1.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing with >= 2 points")
    lo, hi = float(grid[0]), float(grid[-1])
    y_end = apply(c, f, hi, tol).y
    P = primitive(c, lo)
    extra = [b for b in f.breakpoints() if lo < b < hi]
    edges = np.unique(np.concatenate([grid, P.panel_edges(lo, hi), extra]))
    Pg = P(grid)

    @quad.vectorized
    def integrand(t):
        i = np.clip(np.searchsorted(grid, t, side="right") - 1, 0, grid.size - 2)
        return np.exp(-(P(t) - Pg[i])) * f(t)

    left, _, val, _, _ = quad.adaptive_panels(integrand, edges, tol)
    step = np.clip(np.searchsorted(grid, left, side="right") - 1, 0, grid.size - 2)
    local = np.bincount(step, weights=val, minlength=grid.size - 1)
    decay = np.exp(-np.diff(Pg))
    y = np.empty_like(grid)
    y[-1] = y_end
    for i in range(grid.size - 2, -1, -1):
        y[i] = decay[i] * y[i + 1] + local[i]
    return y


def residual_check(c: Coefficient, f: RightHandSide, grid, tol: float = 1e-13) -> float:
    """Max over interior grid points of ``|-y' + q y - f|`` with central-difference ``y'``."""
    grid = np.asarray(grid, dtype=float)
    if grid.size < 3:
        raise ValueError("residual_check needs at least 3 grid points")
    h = np.diff(grid)
    if np.any(h <= 0) or not np.allclose(h, h[0], rtol=1e-9, atol=0.0):
        raise ValueError("residual_check needs a sorted uniform grid")
    y = apply_grid(c, f, grid, tol)
    dy = (y[2:] - y[:-2]) / (grid[2:] - grid[:-2])
    xi = grid[1:-1]
    return float(np.max(np.abs(-dy + c(xi) * y[1:-1] - f(xi))))


@dataclass
class BoundReport:
    """Empirical ratios against ``||f||_p``; ``tail_report`` is the mass of
    ``|y|^p`` attributed to the left of the domain (exact for f vanishing there)."""

    p: LebesgueExponent
    norm_ratio: float
    weighted_ratio: float
    separability_ratio: Optional[float]
    f_norm: float
    tail_report: float
    right_tail_sup: float
    grid_step: float


def bound_checks(c: Coefficient, f: RightHandSide, p, domain: Tuple[float, float],
                 grid_step: float, tol: float = DEFAULT_TOL) -> BoundReport:
    """``||y||_p/||f||_p``, ``||q^{1/p} y||_p/||f||_p`` and, for ``p = 1``,
    ``(||y'||_1 + ||q y||_1)/||f||_1``.

    Norms are trapezoid sums over ``domain = (-X, X)`` plus the left tail
    ``y(x) = y(-X) exp(-int_x^{-X} q)`` (valid where ``f`` vanishes), whose
    contributions are computed in closed form or by a reflected ``J_p``.
    Right of the domain ``|y| <= sup|f| * J0`` is reported, not added.
    """
    p = LebesgueExponent.parse(p)
    lo, hi = map(float, domain)
    if not (hi > lo and grid_step > 0):
        raise ValueError("need a nonempty domain and a positive grid step")
    n = max(2, int(round((hi - lo) / grid_step)))
    t = np.linspace(lo, hi, n + 1)
    f_norm = f.p_norm(p, (lo, hi))
    if f_norm < ZERO_RHS:
        raise ZeroRHS("||f||_p vanishes; bound ratios are undefined")
    a, q0 = _floor(c)
    y = apply_grid(c, f, t, tol)
    qv, fv = c(t), f(t)
    ay = np.abs(y)
    y0 = float(ay[0])
    right_sup = f.tail_sup(hi) * quad.tail_constant(a, q0)
    if math.isinf(p.p):
        y_norm = float(ay.max())
        w_norm = y_norm
        left = 0.0
    else:
        # int_{-inf}^{lo} exp(-p int_x^{lo} q) dx is J_p of the mirrored coefficient at -lo
        left = y0 ** p.p * (j_integral(reflected(c), -lo, p.p, tol).value if y0 > 0 else 0.0)
        y_norm = (float(np.trapezoid(ay ** p.p, t)) + left) ** (1.0 / p.p)
        # int q e^{-p int q} = 1/p exactly
        w_norm = (float(np.trapezoid(qv * ay ** p.p, t)) + y0 ** p.p / p.p) ** (1.0 / p.p)
    sep = None
    if p.p == 1.0:
        dy = float(np.trapezoid(np.abs(qv * y - fv), t)) + y0  # y' = q y - f
        qy = float(np.trapezoid(qv * ay, t)) + y0
        sep = (dy + qy) / f_norm
    return BoundReport(p=p, norm_ratio=y_norm / f_norm, weighted_ratio=w_norm / f_norm,
                       separability_ratio=sep, f_norm=f_norm, tail_report=left,
                       right_tail_sup=right_sup, grid_step=float(t[1] - t[0]))


def lower_bound(d: float, p) -> float:
    """The explicit lower estimate ``e^{-2} d^{1/p'}`` for ``G_p(x)``."""
    p = LebesgueExponent.parse(p)
    return math.exp(-2.0) * d ** (1.0 / p.p_conj)
