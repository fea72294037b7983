"""Shock admissibility predicates."""

from __future__ import annotations

import numpy as np

from .curves import DEFAULT_SOLVER, companion, phi_tangent
from .errors import CurveOutOfDomainError, InvariantViolation, UnsupportedConfigurationError
from .laws import entropy_dissipation, shock_speed
from .models import KruzhkovEntropy, check_states

ADMISSIBILITY_TOL = 1e-12
CHORD_GRID = 512


def is_oleinik(flux, u_minus, u_plus, tol=ADMISSIBILITY_TOL, grid=CHORD_GRID):
    """Chord test: the graph of f lies below the chord for ``u- > u+`` and above it for ``u- < u+``.

    The chord is checked on a uniform grid between the states plus the
    points where ``f'`` equals the chord slope, which are the local extrema
    of the gap between graph and chord.
    """
    check_states(flux.bound, u_minus, u_plus)
    um, up = float(u_minus), float(u_plus)
    if um == up:
        return True
    sigma = shock_speed(flux, um, up, check=False)
    lo, hi = min(um, up), max(um, up)
    pts = np.linspace(lo, hi, grid)
    slope_poly = np.array(flux._derivs[1], dtype=float)
    slope_poly[0] -= sigma
    roots = np.polynomial.polynomial.polyroots(slope_poly) if slope_poly.size > 1 else np.array([])
    roots = np.real(roots[np.abs(np.imag(roots)) < 1e-10])
    pts = np.concatenate((pts, roots[(roots > lo) & (roots < hi)]))
    gap = flux(pts) - (flux(um) + sigma * (pts - um))
    scale = max(1.0, float(np.max(np.abs(flux(pts)))))
    if um > up:
        return bool(np.all(gap <= tol * scale))
    return bool(np.all(gap >= -tol * scale))


def is_eta_entropic(entropy, flux, u_minus, u_plus, tol=ADMISSIBILITY_TOL):
    """True iff the entropy dissipation of the shock is at most ``tol``."""
    return bool(entropy_dissipation(entropy, flux, u_minus, u_plus) <= tol)


def kruzhkov_closed_form(flux, u_minus, u_plus, k, cfg=DEFAULT_SOLVER):
    """Closed-form Kruzhkov admissibility for ``u- > 0``, ``u- > u+`` and ``k <= u-``.

    Below the tangent point the shock is admissible iff ``u+ >= k``; between
    the tangent point and ``u-`` it is admissible iff ``u+`` does not pass
    the companion state of ``k``.
    """
    check_states(flux.bound, u_minus, u_plus, k)
    um, up, k = float(u_minus), float(u_plus), float(k)
    if not (um > 0 and um > up and k <= um):
        raise UnsupportedConfigurationError(
            f"closed form needs u- > 0, u- > u+ and k <= u- (got u-={um}, u+={up}, k={k})")
    tangent = phi_tangent(flux, um, cfg)
    if k <= tangent:
        return up >= k
    if k == um:
        return True
    try:
        return up >= companion(flux, k, um, cfg)
    except CurveOutOfDomainError as exc:
        raise UnsupportedConfigurationError(str(exc)) from exc


def is_kruzhkov_entropic(flux, u_minus, u_plus, k, cfg=DEFAULT_SOLVER, tol=ADMISSIBILITY_TOL,
                         cross_check=True):
    """Kruzhkov admissibility for the entropy ``|u - k|``.

    Uses the closed form inside its hypotheses and the direct dissipation
    sign otherwise. With ``cross_check`` the closed form is compared with
    the dissipation sign and a clear disagreement raises ``InvariantViolation``.
    """
    dissipation = entropy_dissipation(KruzhkovEntropy(flux, k), flux, u_minus, u_plus)
    try:
        verdict = kruzhkov_closed_form(flux, u_minus, u_plus, k, cfg)
    except UnsupportedConfigurationError:
        return bool(dissipation <= tol)
    if cross_check:
        margin = 1e-9 * max(1.0, abs(float(u_minus) - float(u_plus)))
        if (verdict and dissipation > margin) or (not verdict and dissipation < -margin):
            raise InvariantViolation(
                f"Kruzhkov closed form ({verdict}) disagrees with dissipation {dissipation:.3e} "
                f"for u-={u_minus}, u+={u_plus}, k={k}")
    return verdict
