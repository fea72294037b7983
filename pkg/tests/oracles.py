"""Independent reference computations used to derive and freeze expected values.

These deliberately avoid the package: plain Python arithmetic, scipy
quadrature for entropy fluxes and dense scans with bisection for roots.
"""

import math

from scipy.integrate import quad


def f_cubic(u):
    return u ** 3


def df_cubic(u):
    return 3 * u ** 2


def eta_quad(u):
    return u * u


def deta_quad(u):
    return 2 * u


def eta_exp(u):
    return u * u + math.exp(u)


def deta_exp(u):
    return 2 * u + math.exp(u)


def q_of(deta, df):
    """Entropy flux by quadrature from 0."""
    return lambda u: quad(lambda s: deta(s) * df(s), 0.0, u, epsabs=1e-13, epsrel=1e-13)[0]


def dissipation(eta, deta, f, df, um, up):
    """``q(u+) - q(u-) - sigma (eta(u+) - eta(u-))`` with the chord speed."""
    q = q_of(deta, df)
    sigma = (f(up) - f(um)) / (up - um)
    return q(up) - q(um) - sigma * (eta(up) - eta(um))


def bisect(g, lo, hi, tol=1e-14):
    glo = g(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def roots_by_scan(g, lo, hi, n=4000):
    """All sign changes of ``g`` on a uniform grid, refined by bisection."""
    xs = [lo + (hi - lo) * i / n for i in range(n + 1)]
    vals = [g(x) for x in xs]
    out = []
    for a, b, ga, gb in zip(xs, xs[1:], vals, vals[1:]):
        if ga == 0:
            out.append(a)
        elif ga * gb < 0:
            out.append(bisect(g, a, b))
    return out


def flat0_exp(u=1.0):
    """Zero of ``v -> E(u, v)`` for the exponential entropy, searched left of ``-u/2``."""
    g = lambda v: dissipation(eta_exp, deta_exp, f_cubic, df_cubic, u, v)
    roots = roots_by_scan(g, -2.0, -u / 2 - 1e-6, n=400)
    return roots[-1]


def sharp_from_flat(u, flat):
    """Third chord intersection for the cubic: ``v^2 + v u + u^2 = sigma(u, flat)``."""
    sigma = u * u + u * flat + flat * flat
    disc = u * u - 4 * (u * u - sigma)
    r1 = (-u + math.sqrt(disc)) / 2
    r2 = (-u - math.sqrt(disc)) / 2
    return r1 if abs(r1 - flat) > abs(r2 - flat) else r2


def cubic_godunov_flux(ul, ur, samples=2001):
    """Brute-force min/max of ``u^3`` between the two states."""
    lo, hi = min(ul, ur), max(ul, ur)
    vals = [f_cubic(lo + (hi - lo) * i / (samples - 1)) for i in range(samples)]
    return min(vals) if ul <= ur else max(vals)
