"""Pointwise algebra of the conservation law: shock speeds and relative quantities.

All functions accept scalars or numpy arrays and broadcast.
"""

from __future__ import annotations

import numpy as np

from .models import check_states

COINCIDENT_TOL = 1e-12


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def _scalars(*xs):
    return all(isinstance(x, (float, int)) for x in xs)


def shock_speed(flux, u, v, check=True):
    """Rankine-Hugoniot speed ``(f(u) - f(v)) / (u - v)``; ``f'(u)`` when the states coincide."""
    if check:
        check_states(flux.bound, u, v)
    if _scalars(u, v):
        if abs(u - v) < COINCIDENT_TOL:
            return flux.derivative(float(u), 1)
        return (flux(float(u)) - flux(float(v))) / (u - v)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    diff = u - v
    close = np.abs(diff) < COINCIDENT_TOL
    safe = np.where(close, 1.0, diff)
    speed = np.where(close, flux.derivative(u, 1), (flux(u) - flux(v)) / safe)
    return _scalar_or_array(speed)


def rel_entropy(entropy, u, v, check=True):
    """``eta(u|v) = eta(u) - eta(v) - eta'(v)(u - v)``."""
    if check:
        check_states(entropy.flux_model.bound, u, v)
    if _scalars(u, v):
        u, v = float(u), float(v)
        return entropy(u) - entropy(v) - entropy.derivative(v, 1) * (u - v)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    out = entropy(u) - entropy(v) - entropy.derivative(v, 1) * (u - v)
    return _scalar_or_array(out)


def rel_flux(entropy, flux, u, v, check=True):
    """``q(u;v) = q(u) - q(v) - eta'(v)(f(u) - f(v))``.

    The chain rule ``q'(v) = eta'(v) f'(v)`` turns the textbook
    ``q'(v)/f'(v)`` weighting into ``eta'(v)``, which needs no quadrature.
    """
    if check:
        check_states(flux.bound, u, v)
    if _scalars(u, v):
        u, v = float(u), float(v)
        return entropy.flux(u) - entropy.flux(v) - entropy.derivative(v, 1) * (flux(u) - flux(v))
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    out = entropy.flux(u) - entropy.flux(v) - entropy.derivative(v, 1) * (flux(u) - flux(v))
    return _scalar_or_array(out)


def rel_flux_f(flux, u, v, check=True):
    """``f(u|v) = f(u) - f(v) - f'(v)(u - v)``."""
    if check:
        check_states(flux.bound, u, v)
    if _scalars(u, v):
        u, v = float(u), float(v)
        return flux(u) - flux(v) - flux.derivative(v, 1) * (u - v)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return _scalar_or_array(flux(u) - flux(v) - flux.derivative(v, 1) * (u - v))


def entropy_dissipation(entropy, flux, u_minus, u_plus, check=True):
    """Entropy production ``-sigma (eta(u+) - eta(u-)) + q(u+) - q(u-)`` of a shock.

    Non-positive values mean the shock is entropic for ``entropy``.
    Coincident states give 0.
    """
    if check:
        check_states(flux.bound, u_minus, u_plus)
    if _scalars(u_minus, u_plus):
        um, up = float(u_minus), float(u_plus)
        if abs(um - up) < COINCIDENT_TOL:
            return 0.0
        sigma = (flux(um) - flux(up)) / (um - up)
        return -sigma * (entropy(up) - entropy(um)) + entropy.flux(up) - entropy.flux(um)
    um = np.asarray(u_minus, dtype=float)
    up = np.asarray(u_plus, dtype=float)
    sigma = shock_speed(flux, um, up, check=False)
    out = -sigma * (entropy(up) - entropy(um)) + entropy.flux(up) - entropy.flux(um)
    out = np.where(np.abs(um - up) < COINCIDENT_TOL, 0.0, out)
    return _scalar_or_array(out)
