"""Filippov shifts driven by artificial velocities against grid solutions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dissipation import LargeWeight, ShockPair, compute_pi, fit_q_control, shift_velocity
from .fronttrack import BIG, RAREFACTION
from .laws import shock_speed

TRACE_OFFSET = 2
TRACE_TOL = 1e-9


@dataclass
class ShiftPath:
    t0: float
    x0: float
    samples: list
    lipschitz_bound: float
    truncated: bool = False

    @property
    def times(self):
        return np.array([t for t, _ in self.samples])

    @property
    def positions(self):
        return np.array([x for _, x in self.samples])


def traces(wild_slice, grid, x, offset=TRACE_OFFSET):
    """One-sided traces: cell values ``offset`` cells left and right of the cell holding ``x``."""
    i = grid.cell_index(x)
    n = wild_slice.size
    return float(wild_slice[min(max(i - offset, 0), n - 1)]), float(wild_slice[min(max(i + offset, 0), n - 1)])


def filippov_velocity(models, pi, c2, u_minus, u_plus, trace_tol=TRACE_TOL):
    """Velocity selected from the Filippov set of the artificial velocity field.

    Equal traces give ``V(u)``. Otherwise the Rankine-Hugoniot speed of the
    traces is clamped between the two one-sided velocities.
    """
    v_minus = float(shift_velocity(models, pi, c2, u_minus))
    if abs(u_plus - u_minus) <= trace_tol:
        return v_minus
    v_plus = float(shift_velocity(models, pi, c2, u_plus))
    sigma = shock_speed(models.flux, u_minus, u_plus)
    return float(np.clip(sigma, min(v_minus, v_plus), max(v_minus, v_plus)))


def filippov_shift(models, wild, pi, c2, t0, x0, t_end=None, offset=TRACE_OFFSET, trace_tol=TRACE_TOL):
    """Explicit Euler integration of the shift on the wild solution's time grid."""
    t_end = wild.times[-1] if t_end is None else t_end
    bound = abs(models.flux.max_speed) * 3.0 + c2
    h = float(x0)
    samples = [(float(t0), h)]
    k = wild.slice_index(t0)
    t = float(t0)
    truncated = False
    while t < t_end - 1e-14 and k + 1 < len(wild.times):
        if not wild.x_min <= h < wild.x_max:
            truncated = True
            break
        u_minus, u_plus = traces(wild.slices[k], wild, h, offset)
        v = filippov_velocity(models, pi, c2, u_minus, u_plus, trace_tol)
        v_lo = min(shift_velocity(models, pi, c2, np.array([u_minus, u_plus])))
        v_hi = max(shift_velocity(models, pi, c2, np.array([u_minus, u_plus])))
        if not v_lo - 1e-12 <= v <= v_hi + 1e-12:
            raise AssertionError("selected velocity left the Filippov interval")
        dt = wild.times[k + 1] - wild.times[k]
        h += v * dt
        t = wild.times[k + 1]
        k += 1
        samples.append((t, h))
    return ShiftPath(float(t0), float(x0), samples, bound, truncated)


class ShiftedSpeeds:
    """Speed callback for front tracking whose shocks follow Filippov shifts.

    Each shock uses its own Pi with weight ratio ``C1`` (big) or
    ``1 - C0 sigma`` (small); rarefaction shocks move at ``f'(right)``.
    """

    def __init__(self, models, wild, params, offset=TRACE_OFFSET, trace_tol=TRACE_TOL):
        self.models = models
        self.wild = wild
        self.params = params
        self.offset = offset
        self.trace_tol = trace_tol
        self._cache = {}
        self.max_c2 = 0.0
        self.max_speed_used = 0.0

    def weight_ratio(self, wave):
        if wave.kind == BIG:
            return self.params.C1
        return 1.0 - self.params.C0 * wave.strength

    def pi_and_c2(self, wave):
        key = (wave.kind, wave.left, wave.right)
        if key not in self._cache:
            shock = ShockPair(wave.left, wave.right)
            weight = LargeWeight(self.weight_ratio(wave))
            pi = compute_pi(self.models, shock, weight)
            c2 = fit_q_control(self.models, shock, weight, pi)
            self.max_c2 = max(self.max_c2, c2)
            self._cache[key] = (pi, c2)
        return self._cache[key]

    @property
    def lambda_hat(self):
        """``C* + 3L`` with ``C*`` the largest fitted q-control constant so far."""
        return self.max_c2 + 3.0 * self.models.flux.max_speed

    def __call__(self, wave, state):
        if wave.kind == RAREFACTION:
            return float(self.models.flux.derivative(wave.right, 1))
        pi, c2 = self.pi_and_c2(wave)
        grid = self.wild
        slice_ = grid.at(state.time)
        x = min(max(wave.position, grid.x_min), grid.x_max - 1e-12)
        u_minus, u_plus = traces(slice_, grid, x, self.offset)
        v = filippov_velocity(self.models, pi, c2, u_minus, u_plus, self.trace_tol)
        self.max_speed_used = max(self.max_speed_used, abs(v))
        return v

    def reset(self, state, t):
        """Recompute every wave speed from the wild solution at time ``t``."""
        for w in state.waves:
            w.speed = self(w, state)
