"""First-order Godunov scheme with the exact scalar interface flux."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvariantViolation
from .profiles import PiecewiseConstant


@dataclass
class GridSolution:
    """Cell averages on a uniform grid at a sequence of times."""

    x_min: float
    dx: float
    times: list
    slices: list
    cfl: float
    dt: float
    max_conservation_error: float = 0.0
    max_entropy_residual: float = field(default=-np.inf)

    @property
    def n(self):
        return self.slices[0].size

    @property
    def edges(self):
        return self.x_min + self.dx * np.arange(self.n + 1)

    @property
    def centers(self):
        return self.x_min + self.dx * (np.arange(self.n) + 0.5)

    @property
    def x_max(self):
        return self.x_min + self.dx * self.n

    def slice_index(self, t):
        """Index of the last stored slice at or before ``t``."""
        idx = int(np.searchsorted(np.asarray(self.times), t + 1e-12, side="right")) - 1
        return max(idx, 0)

    def at(self, t):
        return self.slices[self.slice_index(t)]

    def cell_index(self, x):
        return int(np.floor((x - self.x_min) / self.dx))


def godunov_flux(flux, u_left, u_right):
    """Exact Riemann flux: min of f over ``[u_l, u_r]`` if ``u_l <= u_r``, else max over ``[u_r, u_l]``."""
    ul = np.asarray(u_left, dtype=float)
    ur = np.asarray(u_right, dtype=float)
    fl, fr = flux(ul), flux(ur)
    lo, hi = np.minimum(ul, ur), np.maximum(ul, ur)
    fmin = np.minimum(fl, fr)
    fmax = np.maximum(fl, fr)
    for c in flux.critical_points():
        inside = (lo <= c) & (c <= hi)
        fc = flux(c)
        fmin = np.where(inside, np.minimum(fmin, fc), fmin)
        fmax = np.where(inside, np.maximum(fmax, fc), fmax)
    out = np.where(ul <= ur, fmin, fmax)
    return float(out) if out.ndim == 0 else out


def cell_averages(u0, x_min, dx, n, quad_points=4):
    """Cell averages of a ``PiecewiseConstant`` (exact) or a callable (Gauss-Legendre)."""
    edges = x_min + dx * np.arange(n + 1)
    if isinstance(u0, PiecewiseConstant):
        pts = np.unique(np.concatenate((edges, [b for b in u0.breakpoints if edges[0] < b < edges[-1]])))
        mids = 0.5 * (pts[1:] + pts[:-1])
        lengths = np.diff(pts)
        owner = np.clip(np.searchsorted(edges, mids, side="right") - 1, 0, n - 1)
        return np.bincount(owner, weights=lengths * u0(mids), minlength=n) / dx
    nodes, weights = np.polynomial.legendre.leggauss(quad_points)
    centers = 0.5 * (edges[1:] + edges[:-1])
    samples = np.asarray(u0(centers[:, None] + 0.5 * dx * nodes[None, :]), dtype=float)
    return 0.5 * samples @ weights


def _max_speed_on_range(flux, lo, hi):
    pts = [lo, hi] + [c for c in flux._second_critical_points() if lo <= c <= hi]
    return float(np.max(np.abs(flux.derivative(np.array(pts), 1))))


def godunov_run(flux, u0, x_min, x_max, n_cells, T, cfl=0.9, dt=None, store_every=1,
                entropy_levels=(), check_conservation=True):
    """Evolve cell averages to time ``T`` with transmissive boundaries.

    The time step is fixed from the range of the initial data, which the
    scheme preserves. ``entropy_levels`` lists Kruzhkov levels ``k`` whose
    discrete cell entropy inequality is checked at every step.
    """
    dx = (x_max - x_min) / n_cells
    u = cell_averages(u0, x_min, dx, n_cells)
    if np.max(np.abs(u)) > flux.bound * (1 + 1e-12):
        raise DomainError("initial data leaves the state interval")
    speed = max(_max_speed_on_range(flux, float(u.min()), float(u.max())), 1e-12)
    if dt is None:
        dt = cfl * dx / speed
    elif dt * speed / dx > cfl + 1e-12:
        raise ValueError(f"CFL violated: dt * max|f'| / dx = {dt * speed / dx:.3f} > {cfl}")
    times, slices = [0.0], [u.copy()]
    t = 0.0
    step = 0
    worst_mass = 0.0
    worst_entropy = -np.inf
    ks = np.asarray(entropy_levels, dtype=float)
    while t < T - 1e-14:
        tau = min(dt, T - t)
        padded = np.concatenate(([u[0]], u, [u[-1]]))
        F = godunov_flux(flux, padded[:-1], padded[1:])
        new = u - tau / dx * (F[1:] - F[:-1])
        if check_conservation:
            mass_error = abs((new.sum() - u.sum()) * dx + tau * (F[-1] - F[0]))
            worst_mass = max(worst_mass, mass_error)
            if mass_error > 1e-10:
                raise InvariantViolation(f"mass balance error {mass_error:.3e} at t={t}")
        if ks.size:
            a, b = padded[:-1], padded[1:]
            for k in ks:
                Q = godunov_flux(flux, np.maximum(a, k), np.maximum(b, k)) - \
                    godunov_flux(flux, np.minimum(a, k), np.minimum(b, k))
                residual = np.abs(new - k) - np.abs(u - k) + tau / dx * (Q[1:] - Q[:-1])
                worst_entropy = max(worst_entropy, float(residual.max()))
                if residual.max() > 1e-12:
                    raise InvariantViolation(f"discrete entropy inequality fails for k={k} at t={t}")
        u = new
        t += tau
        step += 1
        if step % store_every == 0 or t >= T - 1e-14:
            times.append(t)
            slices.append(u.copy())
    return GridSolution(x_min, dx, times, slices, cfl, dt, worst_mass, worst_entropy)
