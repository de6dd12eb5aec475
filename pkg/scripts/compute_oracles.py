"""Regenerate tests/oracle_values.py from high-precision references.

Nothing here imports corsol.  Oscillatory integrals are moved to the phase
variable u = g(t), where cos(u) has unit wavelength, and evaluated with mpmath
between consecutive multiples of pi.  Run from the repo root:

    python scripts/compute_oracles.py > tests/oracle_values.py

Takes several minutes (the J(x) references integrate a Taylor-series ODE).
"""
import sys

import mpmath as mp

mp.mp.dps = 50


def osc_quad(h, u0, u1):
    """int_{u0}^{u1} h(u) cos(u) du split at the zeros of cos."""
    k0 = int(mp.floor(u0 / mp.pi - mp.mpf(1) / 2)) + 1
    k1 = int(mp.floor(u1 / mp.pi - mp.mpf(1) / 2))
    pts = [u0] + [mp.pi * (k + mp.mpf(1) / 2) for k in range(k0, k1 + 1)] + [u1]
    return mp.fsum(mp.quad(lambda u: h(u) * mp.cos(u), [a, b]) for a, b in zip(pts[:-1], pts[1:]))


# --- e^{t^2} cos(e^{t^2}) on [2, 3]:  u = e^{t^2}, dt = du / (2 u sqrt(ln u))
def gauss_osc_q2(lo, hi):
    return osc_quad(lambda u: 1 / (2 * mp.sqrt(mp.log(u))), mp.exp(lo ** 2), mp.exp(hi ** 2))


def gauss_osc_mass(lo, hi):
    """int_lo^hi e^{t^2}(1 + cos e^{t^2}) dt for 0 <= lo < hi."""
    q1 = mp.sqrt(mp.pi) / 2 * (mp.erfi(hi) - mp.erfi(lo))
    if lo == 0:
        # integrable endpoint singularity of 1/sqrt(ln u) at u = 1: integrate in t
        q2 = mp.quad(lambda t: mp.exp(t * t) * mp.cos(mp.exp(t * t)), [lo, min(hi, mp.mpf(1))])
        if hi > 1:
            q2 += gauss_osc_q2(mp.mpf(1), hi)
        return q1 + q2
    return q1 + gauss_osc_q2(lo, hi)


def gauss_osc_window(x, d):
    lo, hi = x - d, x + d
    if lo >= 0:
        return gauss_osc_mass(lo, hi)
    return gauss_osc_mass(0, -lo) + gauss_osc_mass(0, hi)


# --- e^{t} cos(e^{2t}):  int = sqrt(pi/2) C(sqrt(2/pi) e^t)
def exp_osc_q2(lo, hi):
    k = mp.sqrt(2 / mp.pi)
    return mp.sqrt(mp.pi / 2) * (mp.fresnelc(k * mp.exp(hi)) - mp.fresnelc(k * mp.exp(lo)))


def exp_osc_mass(lo, hi):
    """int_lo^hi e^{t}(1 + cos e^{2t}) dt for 0 <= lo < hi."""
    return mp.exp(hi) - mp.exp(lo) + exp_osc_q2(lo, hi)


def bisect(fn, lo, hi, tol=mp.mpf(10) ** -40):
    flo = fn(lo)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        fm = fn(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return (lo + hi) / 2


def gauss_osc_J(x, s, dps=25):
    """int_x^inf exp(-s int_x^t q) dt as an ODE in u = e^{t^2}."""
    with mp.workdps(dps):
        x = mp.mpf(x)
        u0 = mp.exp(x * x)

        def rhs(u, y):
            r = 2 * mp.sqrt(mp.log(u))
            return [s * (1 + mp.cos(u)) / r, mp.exp(-y[0]) / (u * r)]

        sol = mp.odefun(rhs, u0, [mp.mpf(0), mp.mpf(0)])
        u = u0
        while True:
            u += 10
            a, j = sol(u)
            if a > 60:
                return +j


def main(out=sys.stdout):
    vals = {}
    vals["osc_gauss_2_3"] = gauss_osc_q2(mp.mpf(2), mp.mpf(3))
    vals["osc_exp_3_5"] = exp_osc_q2(mp.mpf(3), mp.mpf(5))
    # cross-route for the Fresnel closed form
    vals["osc_exp_3_5_quad"] = osc_quad(lambda u: 1 / (2 * mp.sqrt(u)), mp.exp(6), mp.exp(10))

    vals["apply_exp_minus_x2"] = mp.quad(lambda t: mp.exp(-t - t * t), [0, mp.inf])
    vals["apply_exp_minus_x2_closed"] = mp.sqrt(mp.pi) / 2 * mp.exp(mp.mpf(1) / 4) * mp.erfc(mp.mpf(1) / 2)

    vals["d_one_plus_cos_0"] = bisect(lambda d: d + mp.sin(d) - 1, mp.mpf(0), mp.mpf(1))
    vals["gauss_osc_mass_0_half"] = gauss_osc_mass(mp.mpf(0), mp.mpf(1) / 2)

    for x in (3, 4, 5, 6, 7):
        xm = mp.mpf(x)
        d = bisect(lambda d: exp_osc_mass(xm - d, xm + d) - 2, mp.mpf(0), mp.mpf(1))
        vals[f"d_exp_osc_{x}"] = d
    vals["d_exp_osc_0"] = bisect(lambda d: 2 * exp_osc_mass(mp.mpf(0), d) - 2, mp.mpf(0), mp.mpf(2))

    with mp.workdps(30):
        for x in ("0", "1.5", "2", "2.5"):
            xm = mp.mpf(x)
            vals[f"d_gauss_osc_{x}"] = bisect(lambda d: gauss_osc_window(xm, d) - 2,
                                              mp.mpf(0), mp.mpf(1), tol=mp.mpf(10) ** -25)

        # kappa(t) = e^{t^2} int_x^t cos(e^{xi^2}) d xi at x = 3, t = x + 1/(8 sqrt(10))
        x = mp.mpf(3)
        t = x + 1 / (8 * mp.sqrt(1 + x * x))
        inner = osc_quad(lambda u: 1 / (2 * u * mp.sqrt(mp.log(u))), mp.exp(x * x), mp.exp(t * t))
        vals["kappa_gauss_3_right"] = mp.exp(t * t) * inner

    for x in ("1.5", "2", "2.5", "3"):
        vals[f"J1_gauss_osc_{x}"] = gauss_osc_J(x, 1)
        vals[f"J2_gauss_osc_{x}"] = gauss_osc_J(x, 2)
        print(f"# J done at x={x}", file=sys.stderr)

    print('"""Frozen reference values (generated by scripts/compute_oracles.py)."""', file=out)
    print("", file=out)
    print("ORACLE = {", file=out)
    for k, v in vals.items():
        print(f"    {k!r}: {float(v)!r},  # {mp.nstr(v, 30)}", file=out)
    print("}", file=out)


if __name__ == "__main__":
    main()
