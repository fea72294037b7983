"""Weighted relative entropy around a shock and its dissipation functionals.

A shock ``(u_L, u_R)`` carries weights ``a1`` (left) and ``a2`` (right).
Only the ratio matters: ``LargeWeight(a)`` stores ``a = a2/a1`` and
``SmallWeight(C)`` stores ``C`` with ``a1/a2 = 1 + C s0``. Functions here
broadcast over numpy arrays of states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .curves import phi_tangent
from .errors import DomainError, EmptySetError
from .laws import rel_entropy, rel_flux, shock_speed
from .models import check_states

PI_XTOL = 1e-13
_BISECTION_STEPS = 80


@dataclass(frozen=True)
class ShockPair:
    """A shock joining ``u_L`` (left) to ``u_R`` (right)."""

    u_L: float
    u_R: float

    def __post_init__(self):
        if self.u_L == self.u_R:
            raise ValueError("a shock needs distinct states")

    @property
    def s0(self):
        return abs(self.u_L - self.u_R)

    def speed(self, flux):
        return shock_speed(flux, self.u_L, self.u_R)


@dataclass(frozen=True)
class LargeWeight:
    """Weight ratio ``a = a2/a1`` in ``(0, 1)``."""

    a: float

    def __post_init__(self):
        if not 0 < self.a < 1:
            raise ValueError("large-shock weight ratio must lie in (0, 1)")

    def left_over_right(self, shock):
        return 1.0 / self.a


@dataclass(frozen=True)
class SmallWeight:
    """Weight with ``a1/a2 = 1 + C s0``."""

    C: float

    def __post_init__(self):
        if not self.C > 0:
            raise ValueError("small-shock constant C must be positive")

    def left_over_right(self, shock):
        return 1.0 + self.C * shock.s0


@dataclass(frozen=True)
class PiInterval:
    """Closed interval where the weighted entropy is non-positive.

    ``clipped_lo``/``clipped_hi`` flag an endpoint pinned to the state bound
    instead of a root.
    """

    lo: float
    hi: float
    weight: object
    shock: ShockPair
    clipped_lo: bool = False
    clipped_hi: bool = False

    @property
    def diameter(self):
        return self.hi - self.lo

    def contains(self, u):
        u = np.asarray(u, dtype=float)
        return (u >= self.lo) & (u <= self.hi)

    def grid(self, n, include=()):
        """``n`` equispaced states across the interval plus the extra points in ``include``."""
        pts = np.linspace(self.lo, self.hi, n)
        extra = [p for p in include if self.lo <= p <= self.hi]
        return np.unique(np.concatenate((pts, extra))) if extra else pts


def eta_tilde(models, shock, weight, u):
    """``r eta(u|u_L) - eta(u|u_R)`` with ``r = a1/a2``."""
    r = weight.left_over_right(shock)
    e = models.entropy
    return r * rel_entropy(e, u, shock.u_L) - rel_entropy(e, u, shock.u_R)


def q_tilde(models, shock, weight, u):
    """``r q(u;u_L) - q(u;u_R)`` with ``r = a1/a2``."""
    r = weight.left_over_right(shock)
    e, f = models.entropy, models.flux
    return r * rel_flux(e, f, u, shock.u_L) - rel_flux(e, f, u, shock.u_R)


def d_cont(models, shock, weight, u):
    """Dissipation ``-q~(u) + lambda(u) eta~(u)`` when the shift sits in a continuity region."""
    lam = models.flux.derivative(u, 1)
    return -q_tilde(models, shock, weight, u) + lam * eta_tilde(models, shock, weight, u)


def d_rh(models, shock, weight, u_minus, u_plus, sigma=None):
    """Dissipation across a discontinuity ``(u-, u+)`` moving at ``sigma``.

    ``q(u+;u_R) - sigma eta(u+|u_R) - r (q(u-;u_L) - sigma eta(u-|u_L))``.
    ``sigma`` defaults to the Rankine-Hugoniot speed, so coincident states
    reduce to ``d_cont``.
    """
    e, f = models.entropy, models.flux
    if sigma is None:
        sigma = shock_speed(f, u_minus, u_plus)
    r = weight.left_over_right(shock)
    right = rel_flux(e, f, u_plus, shock.u_R) - sigma * rel_entropy(e, u_plus, shock.u_R)
    left = rel_flux(e, f, u_minus, shock.u_L) - sigma * rel_entropy(e, u_minus, shock.u_L)
    return right - r * left


def compute_pi(models, shock, weight, scan_points=2049):
    """Both roots of the weighted entropy around ``u_L``.

    The weighted entropy is strictly convex, so each side has a single sign
    change; the first positive grid value closes a bracket for Brent's method.
    """
    m = models.bound
    check_states(m, shock.u_L, shock.u_R)
    g = lambda u: eta_tilde(models, shock, weight, u)
    at_left_state = g(shock.u_L)
    if at_left_state >= 0:
        raise EmptySetError(f"weighted entropy is {at_left_state:.3e} >= 0 at u_L; weight out of range")

    def root_toward(limit):
        grid = np.linspace(shock.u_L, limit, scan_points)
        values = g(grid)
        positive = np.flatnonzero(values > 0)
        if positive.size == 0:
            return float(limit), True
        j = positive[0]
        a, b = sorted((float(grid[j - 1]), float(grid[j])))
        return brentq(g, a, b, xtol=PI_XTOL, rtol=4 * np.finfo(float).eps, maxiter=200), False

    lo, clipped_lo = root_toward(-m)
    hi, clipped_hi = root_toward(m)
    return PiInterval(lo, hi, weight, shock, clipped_lo, clipped_hi)


def lowest_right_state(models, shock, b_lo=None):
    """Lower limit ``phi_tangent(b_lo)`` for right states of maximal shocks.

    ``b_lo`` defaults to the smaller shock state.
    """
    b = min(shock.u_L, shock.u_R) if b_lo is None else b_lo
    return phi_tangent(models.flux, b)


def maximal_shock(models, shock, weight, u, lower_state=None):
    """Strength ``s*`` with ``eta(u | u - s*) = -eta~(u)`` and the matching right state.

    Vectorised bisection: ``s -> eta(u|u-s)`` increases on ``s > 0``.

    Returns
    -------
    s_star, u_plus : ndarray
    at_boundary : ndarray of bool
        True where no root exists before ``lower_state``; ``s_star`` is then
        pinned to ``u - lower_state``.
    """
    e = models.entropy
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if lower_state is None:
        lower_state = lowest_right_state(models, shock)
    target = -eta_tilde(models, shock, weight, u)
    if np.any(target < -1e-12 * max(1.0, float(np.max(np.abs(target))))):
        raise DomainError("maximal shock needs states inside Pi (weighted entropy <= 0)")
    target = np.maximum(target, 0.0)
    s_hi = np.maximum(u - lower_state, 0.0)
    at_boundary = rel_entropy(e, u, u - s_hi, check=False) < target
    lo = np.zeros_like(u)
    hi = s_hi.copy()
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        below = rel_entropy(e, u, u - mid, check=False) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    s_star = np.where(at_boundary, s_hi, 0.5 * (lo + hi))
    s_star = np.where(target == 0, 0.0, s_star)
    return s_star, u - s_star, at_boundary


def d_max(models, shock, weight, u, lower_state=None):
    """``d_rh`` at the maximal shock leaving ``u`` (``d_cont`` where ``s* = 0``)."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    s_star, u_plus, _ = maximal_shock(models, shock, weight, u, lower_state)
    return d_rh(models, shock, weight, u, u_plus)


def d_max_grid(models, shock, weight, u, lower_state=None, points=2001):
    """Brute-force ``max_s d_rh(u, u - s)`` over ``s`` in ``[0, u - lower_state]``."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if lower_state is None:
        lower_state = lowest_right_state(models, shock)
    frac = np.linspace(0.0, 1.0, points)[None, :]
    s = frac * np.maximum(u - lower_state, 0.0)[:, None]
    um = np.broadcast_to(u[:, None], s.shape)
    return d_rh(models, shock, weight, um, um - s).max(axis=1)


def fit_q_control(models, shock, weight, pi=None, points=2048):
    """Smallest ``C2`` with ``|q~| <= C2 eta~`` wherever ``u`` is outside Pi and ``q~ <= 0``."""
    if pi is None:
        pi = compute_pi(models, shock, weight)
    m = models.bound
    u = np.linspace(-m, m, points)
    u = u[~pi.contains(u)]
    et = eta_tilde(models, shock, weight, u)
    qt = q_tilde(models, shock, weight, u)
    mask = (qt <= 0) & (et > 1e-14)
    if not np.any(mask):
        return 0.0
    return float(np.max(-qt[mask] / et[mask]))


def shift_velocity(models, pi, c2, u):
    """Artificial shift velocity ``lambda(u) - (C2 + 2L) 1_{u not in Pi}``, ``L = sup |f'|``."""
    lam = models.flux.derivative(u, 1)
    penalty = c2 + 2.0 * models.flux.max_speed
    return lam - penalty * (~pi.contains(u))
