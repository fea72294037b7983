"""Critical curves of a concave-convex flux.

``phi_tangent``   endpoint of the chord from ``u`` that is tangent to the graph of f.
``phi_tangent_inv`` its inverse.
``phi_flat0``     second zero of ``v -> E_eta(u, v)`` (zero entropy dissipation).
``companion``     third intersection of the chord through ``u`` and ``k`` with the graph.
``phi_sharp0``    third intersection of the chord through ``u`` and ``phi_flat0(u)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import CurveOutOfDomainError
from .laws import entropy_dissipation, rel_flux_f
from .models import check_states


@dataclass(frozen=True)
class CurveSolverConfig:
    """Root-finding settings shared by the curve solvers."""

    bracket_expansion: float = 2.0
    root_tol: float = 1e-10
    max_iter: int = 200

    def __post_init__(self):
        if not self.root_tol > 0:
            raise ValueError("root_tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not self.bracket_expansion > 1:
            raise ValueError("bracket_expansion must exceed 1")


DEFAULT_SOLVER = CurveSolverConfig()


def _bracket_outward(g, start, limit, cfg, first_step):
    """Walk from ``start`` toward ``limit`` with geometrically growing steps until g changes sign.

    Returns a bracket ``(a, b)`` or ``None`` when no sign change occurs before ``limit``.
    """
    direction = 1.0 if limit > start else -1.0
    span = abs(limit - start)
    step = min(first_step, span)
    a, ga = start, g(start)
    while True:
        b = start + direction * min(step, span)
        gb = g(b)
        if ga == 0:
            return a, a
        if ga * gb <= 0:
            return (a, b) if a < b else (b, a)
        if step >= span:
            return None
        a, ga = b, gb
        step *= cfg.bracket_expansion


def _solve(g, lo, hi, cfg):
    if lo == hi:
        return lo
    return brentq(g, lo, hi, xtol=cfg.root_tol, rtol=4 * np.finfo(float).eps, maxiter=cfg.max_iter)


def phi_tangent(flux, u, cfg=DEFAULT_SOLVER):
    """State ``v`` on the other side of 0 with ``f'(v) = (f(u) - f(v)) / (u - v)``."""
    check_states(flux.bound, u)
    u = float(u)
    if abs(u) < cfg.root_tol:
        return 0.0
    limit = -np.sign(u) * flux.bound
    g = lambda v: rel_flux_f(flux, u, v, check=False)
    # g vanishes to second order at v = u; the tangent root sits strictly across the origin.
    start = -np.sign(u) * 1e-3 * cfg.root_tol
    bracket = _bracket_outward(g, start, limit, cfg, abs(u) * 0.05)
    if bracket is None:
        raise CurveOutOfDomainError(f"tangent point of u={u} lies outside [-{flux.bound}, {flux.bound}]")
    return _solve(g, *bracket, cfg)


def phi_tangent_inv(flux, w, cfg=DEFAULT_SOLVER):
    """State ``u`` with ``phi_tangent(u) = w``; equivalently ``f(u|w) = 0`` across the origin."""
    check_states(flux.bound, w)
    w = float(w)
    if abs(w) < cfg.root_tol:
        return 0.0
    limit = -np.sign(w) * flux.bound
    g = lambda u: rel_flux_f(flux, u, w, check=False)
    start = -np.sign(w) * 1e-3 * cfg.root_tol
    bracket = _bracket_outward(g, start, limit, cfg, abs(w) * 0.05)
    if bracket is None:
        raise CurveOutOfDomainError(f"w={w} is outside the range of the tangent function on [-{flux.bound}, {flux.bound}]")
    return _solve(g, *bracket, cfg)


def phi_flat0(entropy, flux, u, cfg=DEFAULT_SOLVER):
    """Second zero of ``v -> E_eta(u, v)``, beyond the tangent point."""
    check_states(flux.bound, u)
    u = float(u)
    if abs(u) < cfg.root_tol:
        return 0.0
    tangent = phi_tangent(flux, u, cfg)
    limit = -np.sign(u) * flux.bound
    g = lambda v: entropy_dissipation(entropy, flux, u, v, check=False)
    if g(tangent) >= 0:
        raise CurveOutOfDomainError(f"entropy dissipation is not negative at the tangent point of u={u}")
    if g(limit) < 0:
        raise CurveOutOfDomainError(f"zero-dissipation point of u={u} lies outside [-{flux.bound}, {flux.bound}]")
    lo, hi = sorted((tangent, limit))
    return _solve(g, lo, hi, cfg)


def companion(flux, k, u, cfg=DEFAULT_SOLVER, scan_points=257):
    """Third state ``v`` where the chord through ``(u, f(u))`` and ``(k, f(k))`` meets the graph.

    The chord residual ``f(v) - f(u) - sigma(k, u)(v - u)`` factors as
    ``(v - u)(v - k) f[v, u, k]``, so the third root is a zero of the second
    divided difference. Tangency (``u = phi_tangent_inv(k)``) makes that zero
    coincide with ``k``, which is returned.
    """
    check_states(flux.bound, k, u)
    k, u = float(k), float(u)
    g = lambda v: flux.divided_difference2(v, u, k)
    m = flux.bound
    grid = np.linspace(-m, m, scan_points)
    values = flux.divided_difference2(grid, u, k)
    exact = np.flatnonzero(values == 0)
    if exact.size:
        v = float(grid[exact[0]])
    else:
        changes = np.flatnonzero(np.sign(values[:-1]) != np.sign(values[1:]))
        if changes.size == 0:
            raise CurveOutOfDomainError(f"chord through u={u} and k={k} has no third intersection in [-{m}, {m}]")
        i = changes[0]
        v = _solve(g, float(grid[i]), float(grid[i + 1]), cfg)
    if abs(v - k) <= cfg.root_tol:
        return k
    return v


def phi_sharp0(entropy, flux, u, cfg=DEFAULT_SOLVER):
    """Third intersection of the chord joining ``u`` and ``phi_flat0(u)`` with the graph of f."""
    check_states(flux.bound, u)
    u = float(u)
    if not u > 0:
        raise CurveOutOfDomainError("phi_sharp0 is defined for u > 0")
    flat = phi_flat0(entropy, flux, u, cfg)
    if not -flux.bound < flat < u:
        raise CurveOutOfDomainError(f"phi_flat0({u}) = {flat} leaves the admissible range")
    if abs(flat - phi_tangent(flux, u, cfg)) <= 10 * cfg.root_tol:
        raise CurveOutOfDomainError("degenerate chord: phi_flat0 coincides with the tangent point")
    return companion(flux, flat, u, cfg)


def tabulate(entropy, flux, states, cfg=DEFAULT_SOLVER):
    """Rows ``(u, phi_tangent, phi_flat0, phi_sharp0)``; ``nan`` where a curve is undefined."""
    rows = []
    for u in states:
        row = [float(u)]
        for fn in (lambda x: phi_tangent(flux, x, cfg), lambda x: phi_flat0(entropy, flux, x, cfg),
                   lambda x: phi_sharp0(entropy, flux, x, cfg)):
            try:
                row.append(fn(u))
            except CurveOutOfDomainError:
                row.append(float("nan"))
        rows.append(tuple(row))
    return rows
