"""Weighted relative-entropy stability experiments and the non-uniqueness demo."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curves import phi_flat0, phi_sharp0, phi_tangent
from .errors import CcstabError, EmptySetError
from .fronttrack import discretize_initial, run
from .godunov import godunov_run
from .laws import entropy_dissipation, rel_entropy, rel_flux, shock_speed
from .profiles import PiecewiseConstant, _segments, lp_distance_to_cells
from .shift import ShiftedSpeeds, traces


def weighted_rel_entropy(models, edges, cell_values, psi, window, weight=None, weight_breaks=()):
    """``int a(x) eta(u(x) | psi(x)) dx`` over ``window`` for cell data ``u`` and a profile ``psi``.

    ``weight`` maps an array of points to weights (default 1); its jumps
    must be listed in ``weight_breaks``. All three factors are piecewise
    constant, so the integral is exact on the merged partition.
    """
    edges = np.asarray(edges, dtype=float)
    cells = np.asarray(cell_values, dtype=float)
    lo, hi = window
    if not (edges[0] <= lo < hi <= edges[-1] + 1e-12):
        raise ValueError(f"window {window} is not inside the grid [{edges[0]}, {edges[-1]}]")
    left, right = _segments(window, edges, psi.breakpoints, weight_breaks)
    mid = 0.5 * (left + right)
    idx = np.clip(np.searchsorted(edges, mid, side="right") - 1, 0, cells.size - 1)
    a = np.ones_like(mid) if weight is None else weight(mid)
    return float(np.sum((right - left) * a * rel_entropy(models.entropy, cells[idx], psi(mid))))


def interface_dissipation(models, wave, u_minus, u_plus, a_left, a_right):
    """``F+ - F-`` across one front: weighted ``sigma eta(u|psi) - q(u; psi)`` on the left minus the right.

    ``u_minus``/``u_plus`` are the wild traces and ``wave.left``/``wave.right``
    the front states; ``sigma`` is the wave's current speed.
    """
    e, f = models.entropy, models.flux
    left = wave.speed * rel_entropy(e, u_minus, wave.left) - rel_flux(e, f, u_minus, wave.left)
    right = wave.speed * rel_entropy(e, u_plus, wave.right) - rel_flux(e, f, u_plus, wave.right)
    return float(a_left * left - a_right * right)


def l2_to_callable(u0, profile_or_fn, window, n=20000):
    """Midpoint-rule ``L^2(window)`` distance between two functions."""
    x = np.linspace(window[0], window[1], n + 1)
    mid = 0.5 * (x[1:] + x[:-1])
    diff = np.asarray(u0(mid), dtype=float) - np.asarray(profile_or_fn(mid), dtype=float)
    return float(np.sqrt(np.sum(diff ** 2) * (x[1] - x[0])))


@dataclass
class ConeReport:
    """Outcome of one cone-of-information stability run."""

    delta: float
    h: float
    dx: float
    T: float
    R: float
    v: float
    times: list
    energy: list
    window_distance: float
    initial_wild_distance: float
    initial_front_distance: float
    inverse_m: float
    weight_min: float
    lambda_hat: float
    max_shift_speed: float
    interface_shock: float
    interface_rarefaction: float
    interactions: int
    quadratic_constants: tuple
    extras: dict = field(default_factory=dict)

    @property
    def increments(self):
        return list(np.diff(self.energy))

    @property
    def max_increase(self):
        inc = self.increments
        return max([0.0] + inc)

    @property
    def ratio(self):
        """``distance / (delta + 1/m)``."""
        return self.window_distance / (self.delta + self.inverse_m)

    @property
    def ratio_bound(self):
        """``sqrt(c_hi / (c_lo a_min))``: the constant a non-increasing weighted entropy guarantees."""
        c_lo, c_hi = self.quadratic_constants
        return math.sqrt(c_hi / (c_lo * self.weight_min))


def cone_stability_experiment(models, u0, wild0, params, R, T, v, dx, snapshots=11, delta=None,
                              trace_offset=2):
    """Compare a shifted front-tracking solution from ``u0`` with the Godunov evolution of ``wild0``.

    Returns a ``ConeReport`` with ``t -> int_{-R+vt}^{R-vt} a eta(u|psi)`` at
    the snapshot times, the accumulated interface terms split by wave
    type, and the final windowed ``L^2`` distance.
    """
    if R <= v * T:
        raise CcstabError(f"empty cone: R={R} <= v T={v * T}")
    window0 = (-R, R)
    psi0, front_l2 = discretize_initial(u0, params.h, window0)
    if delta is None:
        delta = l2_to_callable(u0, wild0, window0)
    n = int(round(2 * R / dx))
    wild = godunov_run(models.flux, wild0, -R, R, n, T)
    speeds = ShiftedSpeeds(models, wild, params, offset=trace_offset)
    times = list(np.linspace(0.0, T, snapshots))
    acc = {"shock": 0.0, "rarefaction": 0.0, "shock_max": -np.inf, "rarefaction_max": -np.inf}

    def hook(state, t):
        speeds.reset(state, t)
        if t >= T:
            return
        k = wild.slice_index(t)
        dt = min(wild.dt, T - t)
        if not state.waves:
            return
        lo, hi = -R + v * t, R - v * t
        slice_ = wild.slices[k]
        for w in state.waves:
            if not lo < w.position < hi:
                continue
            u_m, u_p = traces(slice_, wild, w.position, trace_offset)
            term = interface_dissipation(models, w, u_m, u_p, state.weight_at(w.position, side="left"),
                                         state.weight_at(w.position, side="right"))
            key = "shock" if w.is_shock else "rarefaction"
            acc[key] += max(term, 0.0) * dt
            acc[key + "_max"] = max(acc[key + "_max"], term)

    traj = run(psi0, params, speeds, times, lambda_hat=None, step=wild.dt, step_hook=hook)
    energy = []
    weight_min = 1.0
    for snap, t in zip(traj.snapshots, times):
        window = (-R + v * t, R - v * t)
        psi = snap.profile() if snap.waves else PiecewiseConstant.constant(traj.far_left)
        weight = lambda x, s=snap: s.weight_profile(x)
        breaks = [w.position for w in snap.waves]
        energy.append(weighted_rel_entropy(models, wild.edges, wild.at(t), psi, window, weight, breaks))
        pts = np.linspace(*window, 2001)
        weight_min = min(weight_min, float(np.min(snap.weight_profile(pts))))
    last = traj.snapshots[-1]
    psi_T = last.profile() if last.waves else PiecewiseConstant.constant(traj.far_left)
    distance = lp_distance_to_cells(psi_T, wild.edges, wild.at(T), (-R + v * T, R - v * T), p=2)
    return ConeReport(delta=float(delta), h=params.h, dx=dx, T=T, R=R, v=v, times=times, energy=energy,
                      window_distance=distance, initial_wild_distance=float(delta),
                      initial_front_distance=front_l2, inverse_m=front_l2 + math.sqrt(params.h),
                      weight_min=weight_min, lambda_hat=speeds.lambda_hat,
                      max_shift_speed=speeds.max_speed_used, interface_shock=acc["shock"],
                      interface_rarefaction=acc["rarefaction"], interactions=len(traj.log),
                      quadratic_constants=models.quadratic_constants(),
                      extras={"shock_interface_max": acc["shock_max"],
                              "rarefaction_interface_max": acc["rarefaction_max"]})


@dataclass
class NonclassicalSolution:
    """Two-discontinuity weak solution ``u_L -> m -> u_R`` and its comparison with Godunov."""

    u_L: float
    middle: float
    u_R: float
    speeds: tuple
    rh_residuals: tuple
    dissipations: tuple
    l2_margin: float
    T: float

    def profile(self, t=None):
        t = self.T if t is None else t
        return PiecewiseConstant((self.speeds[0] * t, self.speeds[1] * t), (self.u_L, self.middle, self.u_R))


def nonclassical_candidates(models, u_L, u_R, count=9, scan_points=513):
    """Middle states ``m`` in ``[phi_flat0(u_L), phi_tangent(u_L))`` with ordered speeds and entropic jumps.

    The interval is scanned on ``scan_points`` points and up to ``count``
    admissible values, evenly spread over the admissible ones, are returned.
    """
    flux, entropy = models.flux, models.entropy
    flat = phi_flat0(entropy, flux, u_L)
    tangent = phi_tangent(flux, u_L)
    m = np.linspace(flat, tangent, scan_points, endpoint=False)
    ok = ((shock_speed(flux, u_L, m) <= shock_speed(flux, m, u_R))
          & (entropy_dissipation(entropy, flux, u_L, m) <= 1e-10)
          & (entropy_dissipation(entropy, flux, m, u_R) <= 1e-10))
    good = m[ok]
    if good.size <= count:
        return [float(x) for x in good]
    pick = np.unique(np.round(np.linspace(0, good.size - 1, count)).astype(int))
    return [float(x) for x in good[pick]]


def nonclassical_demo(models, u_L=1.0, u_R=None, T=1.0, dx=0.002, count=9, x_range=(-1.0, 3.0)):
    """Build admissible two-discontinuity solutions and measure their distance to the Godunov solution.

    Returns all admissible members of the sampled family, each with its
    ``L^2`` distance to the Godunov solution of the Riemann datum at ``T``.
    """
    flux, entropy = models.flux, models.entropy
    if u_R is None:
        u_R = 0.5 * phi_sharp0(entropy, flux, u_L)
    sharp = phi_sharp0(entropy, flux, u_L)
    if not 0 < u_R < sharp:
        raise CcstabError(f"u_R must lie in (0, {sharp}) for the construction")
    members = nonclassical_candidates(models, u_L, u_R, count)
    if not members:
        raise EmptySetError("no admissible middle state found")
    n = int(round((x_range[1] - x_range[0]) / dx))
    reference = godunov_run(flux, PiecewiseConstant.step(u_L, u_R), x_range[0], x_range[1], n, T)
    sols = []
    for m in members:
        s1 = shock_speed(flux, u_L, m)
        s2 = shock_speed(flux, m, u_R)
        rh = tuple(abs(s * (a - b) - (flux(a) - flux(b))) for s, a, b in ((s1, u_L, m), (s2, m, u_R)))
        diss = (entropy_dissipation(entropy, flux, u_L, m), entropy_dissipation(entropy, flux, m, u_R))
        sol = NonclassicalSolution(u_L, m, u_R, (s1, s2), rh, diss, 0.0, T)
        margin = lp_distance_to_cells(sol.profile(), reference.edges, reference.at(T), x_range, p=2)
        sol.l2_margin = margin
        sols.append(sol)
    return sols, reference
