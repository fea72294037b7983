"""Front tracking with big, small and rarefaction shocks and the weight field.

Waves move along straight lines between interactions. At each
interaction exactly one outgoing wave (or none) replaces the pair, and the
weight bookkeeping ``(L, K)`` is updated so that the weight field never
increases. Shock speeds are chord speeds (``mode="rh"``) or are supplied by
a callback, which the shifted construction uses to impose artificial
shift velocities.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvariantViolation, RefinementError, UnsupportedConfigurationError
from .laws import shock_speed
from .profiles import PiecewiseConstant

BIG = "big"
SMALL = "small"
RAREFACTION = "rarefaction"

SIMULTANEITY_TOL = 1e-12
PERTURBATION = 1e-9


@dataclass
class Wave:
    """One moving discontinuity of the front."""

    kind: str
    left: float
    right: float
    position: float
    speed: float = 0.0
    ell: int = 0

    @property
    def strength(self):
        return abs(self.left - self.right)

    @property
    def is_shock(self):
        return self.kind in (BIG, SMALL)


@dataclass(frozen=True)
class FrontParams:
    """Constants of the construction.

    ``eps`` separates big from small shocks, ``h`` bounds rarefaction
    shocks, ``C0`` scales small-shock weight jumps ``1 - C0 sigma`` and
    ``C1`` is the big-shock weight jump.
    """

    eps: float = 0.1
    C0: float = 2.0
    C1: float = 0.5
    h: float = 0.05

    def __post_init__(self):
        if not (self.eps > 0 and self.h > 0 and self.C0 > 0):
            raise ValueError("eps, h and C0 must be positive")
        if self.C0 * self.eps > 0.5:
            raise ValueError("need C0 * eps <= 1/2 so small-shock factors stay in [1/2, 1]")
        if not 0 < self.C1 <= (1.0 - self.C0 * self.eps) ** 2:
            raise ValueError("need 0 < C1 <= (1 - C0 eps)^2 so merging small shocks cannot raise the weight")

    def weight_floor(self, total_variation):
        """Lower bound ``C1^(2 ceil(2V/eps)) (1/2)^(20 C0 V)`` for the weight field."""
        n = math.ceil(2.0 * total_variation / self.eps)
        return self.C1 ** (2 * n) * 0.5 ** (20.0 * self.C0 * total_variation)


@dataclass
class InteractionRecord:
    time: float
    position: float
    taxonomy: str
    incoming: tuple
    outgoing: tuple
    delta_L: int
    k_added: float | None = None


@dataclass
class FrontState:
    """Waves ordered by position, with the weight bookkeeping."""

    time: float
    waves: list
    params: FrontParams
    K: list = field(default_factory=list)
    log: list = field(default_factory=list)
    perturbations: list = field(default_factory=list)

    def snapshot(self):
        return FrontState(self.time, copy.deepcopy(self.waves), self.params, list(self.K), [], [])

    @property
    def big_shock_potential(self):
        """``L(t)``: sum of ``ell`` over small and rarefaction shocks plus ``ell - 1`` over big shocks."""
        return sum(w.ell - 1 if w.kind == BIG else w.ell for w in self.waves)

    @property
    def total_variation(self):
        return float(sum(w.strength for w in self.waves))

    def states(self):
        if not self.waves:
            return []
        return [self.waves[0].left] + [w.right for w in self.waves]

    def profile(self):
        if not self.waves:
            raise ValueError("an empty front has no state; keep the constant elsewhere")
        return PiecewiseConstant(tuple(w.position for w in self.waves), tuple(self.states()))

    def weight_at(self, x, side="right"):
        """Weight ``C1^L * prod(K) * prod(xi_i(x))``.

        At a wave position ``side`` selects the one-sided value.
        """
        return float(self.weight_profile(np.array([x]), side)[0])

    def weight_profile(self, xs, side="right"):
        xs = np.asarray(xs, dtype=float)
        base = self.params.C1 ** self.big_shock_potential * float(np.prod(self.K)) if self.K else \
            self.params.C1 ** self.big_shock_potential
        positions = np.array([w.position for w in self.waves])
        factors = np.array([self.jump_factor(w) for w in self.waves])
        log_cum = np.concatenate(([0.0], np.cumsum(np.log(factors)))) if factors.size else np.zeros(1)
        count = np.searchsorted(positions, xs, side="right" if side == "right" else "left")
        return base * np.exp(log_cum[count])

    def jump_factor(self, wave):
        if wave.kind == BIG:
            return self.params.C1
        if wave.kind == SMALL:
            return 1.0 - self.params.C0 * wave.strength
        return 1.0

    def check_structure(self):
        """Raise if neighbouring states disagree or waves are out of order or mis-typed."""
        p = self.params
        for a, b in zip(self.waves, self.waves[1:]):
            if a.right != b.left:
                raise InvariantViolation(f"state mismatch between waves at {a.position} and {b.position}", self.log)
            if b.position < a.position - 1e-9:
                raise InvariantViolation(f"waves out of order at t={self.time}", self.log)
        for w in self.waves:
            if w.kind == RAREFACTION and not (w.left < w.right and w.strength <= p.h * (1 + 1e-12)):
                raise InvariantViolation(f"bad rarefaction shock {w}", self.log)
            if w.kind == BIG and not (w.left > w.right and w.strength >= 0.5 * p.eps * (1 - 1e-12)):
                raise InvariantViolation(f"bad big shock {w}", self.log)
            if w.kind == SMALL and not (w.left > w.right and w.strength < p.eps):
                raise InvariantViolation(f"bad small shock {w}", self.log)
        if self.big_shock_potential < 0:
            raise InvariantViolation("negative big-shock potential", self.log)


def rh_speed(flux):
    """Chord speeds for shocks and ``f'(right)`` for rarefaction shocks."""
    def speed(wave, state):
        if wave.kind == RAREFACTION:
            return float(flux.derivative(wave.right, 1))
        return shock_speed(flux, wave.left, wave.right)
    return speed


def solve_riemann(u_left, u_right, params, position=0.0):
    """Initial Riemann solver: one shock, or a fan of rarefaction shocks of strength at most ``h``.

    A shock is big iff its strength is at least ``eps``; big shocks start
    with ``ell = 1`` so that they do not contribute to ``L``. Data must lie
    in the convex region ``u > 0``.
    """
    if min(u_left, u_right) <= 0:
        raise UnsupportedConfigurationError(f"initial states must be positive (got {u_left}, {u_right})")
    if u_left == u_right:
        return []
    if u_left > u_right:
        big = u_left - u_right >= params.eps
        return [Wave(BIG if big else SMALL, u_left, u_right, position, ell=1 if big else 0)]
    n = math.ceil((u_right - u_left) / params.h * (1 - 1e-12))
    n = max(n, 1)
    fan = [u_left + j / n * (u_right - u_left) for j in range(n + 1)]
    fan[-1] = u_right
    return [Wave(RAREFACTION, a, b, position) for a, b in zip(fan, fan[1:])]


def classify_interaction(w1, w2, eps=None):
    """Taxonomy of the collision of ``w1`` (left) with ``w2`` (right)."""
    u_l, u_m, u_r = w1.left, w1.right, w2.right
    monotone = (u_m - u_l) * (u_r - u_m) >= 0
    if monotone:
        if not (w1.is_shock and w2.is_shock):
            raise InvariantViolation("A2: two rarefaction shocks cannot collide")
        kinds = {w1.kind, w2.kind}
        if kinds == {BIG}:
            return "A1"
        if kinds == {BIG, SMALL}:
            return "A3"
        return "A4"
    if w1.is_shock == w2.is_shock:
        raise InvariantViolation("non-monotone interaction needs one shock and one rarefaction shock")
    shock = w1 if w1.is_shock else w2
    return "B1" if shock.kind == BIG else "B2"


def resolve_interaction(w1, w2, params):
    """Outgoing wave (or ``None``), taxonomy, change of ``L`` and new ``K`` entry."""
    taxonomy = classify_interaction(w1, w2, params.eps)
    u_l, u_r = w1.left, w2.right
    c0 = params.C0
    k_added = None
    out = None
    if taxonomy == "A1":
        out = Wave(BIG, u_l, u_r, 0.0, ell=w1.ell + w2.ell)
    elif taxonomy == "A3":
        small = w1 if w1.kind == SMALL else w2
        out = Wave(BIG, u_l, u_r, 0.0, ell=w1.ell + w2.ell)
        k_added = 1.0 - c0 * small.strength
    elif taxonomy == "A4":
        if w1.strength + w2.strength >= params.eps:
            out = Wave(BIG, u_l, u_r, 0.0, ell=w1.ell + w2.ell + 1)
        else:
            out = Wave(SMALL, u_l, u_r, 0.0, ell=w1.ell + w2.ell)
    else:
        shock, rare = (w1, w2) if w1.is_shock else (w2, w1)
        diff = shock.strength - rare.strength
        ell = w1.ell + w2.ell
        if taxonomy == "B1":
            if diff > 0.5 * params.eps:
                out = Wave(BIG, u_l, u_r, 0.0, ell=ell)
            elif diff > 0:
                out = Wave(SMALL, u_l, u_r, 0.0, ell=ell)
            elif diff < 0:
                out = Wave(RAREFACTION, u_l, u_r, 0.0, ell=ell)
        else:
            if diff > 0:
                out = Wave(SMALL, u_l, u_r, 0.0, ell=ell)
                k_added = (1.0 - c0 * shock.strength) / (1.0 - c0 * diff)
            else:
                if diff < 0:
                    out = Wave(RAREFACTION, u_l, u_r, 0.0, ell=ell)
                k_added = 1.0 - c0 * shock.strength
    before = (w1.ell - 1 if w1.kind == BIG else w1.ell) + (w2.ell - 1 if w2.kind == BIG else w2.ell)
    after = 0 if out is None else (out.ell - 1 if out.kind == BIG else out.ell)
    return out, taxonomy, after - before, k_added


def initial_state(profile, params, speed_fn, time=0.0):
    """Front built from the jumps of a piecewise-constant profile."""
    waves = []
    for x, a, b in profile.jumps:
        waves.extend(solve_riemann(a, b, params, x))
    state = FrontState(time, waves, params)
    for w in waves:
        w.speed = speed_fn(w, state)
    return state


def _collision_times(waves):
    times = []
    for i, (a, b) in enumerate(zip(waves, waves[1:])):
        closing = a.speed - b.speed
        if closing > 0:
            times.append((max(b.position - a.position, 0.0) / closing, i))
    return times


def next_collision(state):
    """``(dt, i)`` of the next collision of waves ``i`` and ``i+1``, applying the simultaneity tie-break."""
    for _ in range(10_000):
        times = _collision_times(state.waves)
        if not times:
            return math.inf, None
        dt_min = min(t for t, _ in times)
        tied = sorted(i for t, i in times if t - dt_min <= SIMULTANEITY_TOL)
        if len(tied) < 2:
            return dt_min, tied[0]
        j = tied[-1] + 1
        state.waves[j].speed += PERTURBATION
        state.perturbations.append((state.time, j, PERTURBATION))
    raise InvariantViolation("could not separate simultaneous collisions", state.log)


def _move(state, dt):
    for w in state.waves:
        w.position += w.speed * dt
    state.time += dt


def advance(state, speed_fn, t_limit=math.inf, check_weight=False):
    """Advance to the next interaction (resolving it) or to ``t_limit``, whichever is first.

    Returns the time of the resolved interaction, or ``inf`` when none
    happened before ``t_limit``.
    """
    dt, i = next_collision(state)
    if state.time + dt > t_limit or i is None:
        if math.isfinite(t_limit):
            _move(state, t_limit - state.time)
        return math.inf
    _move(state, dt)
    w1, w2 = state.waves[i], state.waves[i + 1]
    position = 0.5 * (w1.position + w2.position)
    probe = _weight_probe_points(state, i) if check_weight else None
    before = state.weight_profile(probe) if check_weight else None
    out, taxonomy, delta_l, k_added = resolve_interaction(w1, w2, state.params)
    incoming = (copy.copy(w1), copy.copy(w2))
    replacement = []
    if out is not None:
        out.position = position
        out.speed = speed_fn(out, state)
        replacement = [out]
    state.waves[i:i + 2] = replacement
    if k_added is not None:
        state.K.append(k_added)
    state.log.append(InteractionRecord(state.time, position, taxonomy, incoming,
                                       tuple(copy.copy(w) for w in replacement), delta_l, k_added))
    if check_weight:
        after = state.weight_profile(probe)
        excess = float(np.max(after - before))
        if excess > 1e-12:
            raise InvariantViolation(f"weight increased by {excess:.3e} at interaction {taxonomy}", state.log)
    return state.time


def _weight_probe_points(state, i):
    pos = np.array(sorted({w.position for w in state.waves}))
    if pos.size == 0:
        return np.zeros(1)
    mids = 0.5 * (pos[1:] + pos[:-1])
    return np.concatenate(([pos[0] - 1.0], mids[mids != pos[1:]] if mids.size else [], [pos[-1] + 1.0]))


@dataclass
class Trajectory:
    """Snapshots at requested times plus the interaction log."""

    snapshots: list
    log: list
    perturbations: list
    initial_tv: float
    lambda_hat: float
    far_left: float
    far_right: float

    def profile_at(self, k):
        snap = self.snapshots[k]
        if not snap.waves:
            return PiecewiseConstant.constant(self.far_left)
        return snap.profile()


def run(profile, params, speed_fn, times, lambda_hat, check=True, max_events=1_000_000, step_hook=None,
        step=None):
    """Evolve a piecewise-constant profile and record snapshots at ``times``.

    ``step_hook(state, t)`` (with ``step``) is called at every multiple of
    ``step`` before waves move, letting callers reset speeds on a time grid.
    """
    times = sorted(float(t) for t in times)
    profile = profile.simplified()
    state = initial_state(profile, params, speed_fn)
    tv0 = profile.total_variation
    lo, hi = min(profile.values), max(profile.values)
    snaps = []
    events = 0

    def checkpoint():
        if not check:
            return
        state.check_structure()
        if state.total_variation > tv0 * (1 + 1e-12) + 1e-14:
            raise InvariantViolation(f"total variation grew to {state.total_variation}", state.log)
        vals = state.states()
        if vals and (min(vals) < lo or max(vals) > hi):
            raise InvariantViolation("state left the initial range", state.log)

    grid_times = set()
    if step is not None and times:
        n = int(math.ceil(times[-1] / step - 1e-9))
        grid_times = {min(k * step, times[-1]) for k in range(n + 1)}
    for target in sorted(set(times) | grid_times):
        while advance(state, speed_fn, target, check_weight=check) != math.inf:
            events += 1
            checkpoint()
            if events > max_events:
                raise InvariantViolation("too many interactions", state.log)
        state.time = target
        checkpoint()
        if target in times:
            snaps.append(state.snapshot())
        if step_hook is not None and target in grid_times:
            step_hook(state, target)
    return Trajectory(snaps, state.log, state.perturbations, tv0, lambda_hat, profile.values[0],
                      profile.values[-1])


def discretize_initial(u0, h, window=(-1.0, 1.0), mesh=None, l2_budget=None):
    """Piecewise-constant approximation of ``u0`` whose jumps are at least ``h``.

    A ``PiecewiseConstant`` input is returned unchanged. A callable is sampled
    at mesh midpoints in ``window`` and quantised with hysteresis: the value
    only changes once the samples have moved by at least ``h`` since the last
    change. Every value is a sample (so the range cannot grow), each jump is
    bounded by the sample variation it replaces (so TV cannot grow), and there
    are at most ``TV / h`` jumps.

    Returns
    -------
    profile : PiecewiseConstant
    l2_error : float
        Midpoint-rule ``L^2(window)`` distance to ``u0`` (0 for exact input).
    """
    if isinstance(u0, PiecewiseConstant):
        return u0.simplified(), 0.0
    a, b = window
    mesh = h / 4.0 if mesh is None else mesh
    n = max(int(math.ceil((b - a) / mesh)), 1)
    edges = np.linspace(a, b, n + 1)
    mids = 0.5 * (edges[1:] + edges[:-1])
    samples = np.asarray(u0(mids), dtype=float)
    current = samples[0]
    breaks, values = [], [current]
    for x, s in zip(edges[1:-1], samples[1:]):
        if abs(s - current) >= h:
            current = s
            breaks.append(float(x))
            values.append(float(s))
    profile = PiecewiseConstant(tuple(breaks), tuple(values))
    fine = np.linspace(a, b, 8 * n + 1)
    fine_mid = 0.5 * (fine[1:] + fine[:-1])
    l2 = float(np.sqrt(np.sum((np.asarray(u0(fine_mid)) - profile(fine_mid)) ** 2) * (fine[1] - fine[0])))
    if l2_budget is not None and l2 > l2_budget:
        raise RefinementError(f"L2 error {l2:.3e} exceeds budget {l2_budget:.3e}; refine h")
    return profile, l2
