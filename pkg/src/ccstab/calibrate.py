"""Numerical calibration of admissible weights.

Both calibrations certify a constant by scanning the dissipation
functionals on grids; nothing here is a proof, and every result carries
the scan maxima that justified it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curves import phi_flat0, phi_tangent
from .dissipation import (LargeWeight, ShockPair, SmallWeight, compute_pi, d_cont, d_max, d_rh,
                          lowest_right_state)
from .errors import CalibrationError, EmptySetError
from .laws import entropy_dissipation, shock_speed
from .models import KruzhkovEntropy

VERIFY_TOL = 1e-9
ENTROPIC_TOL = 1e-12


@dataclass(frozen=True)
class LargeScanGrid:
    """Sample counts for the three large-shock scans."""

    pi_points: int = 200
    right_points: int = 801
    far_left_points: int = 300


@dataclass
class LargeScan:
    """Maxima of the three large-shock scans at one weight ratio."""

    a: float
    cont_max: float
    entropic_max: float
    far_left_max: float
    witness: dict = field(default_factory=dict)

    def passed(self, tol=VERIFY_TOL):
        return max(self.cont_max, self.entropic_max, self.far_left_max) <= tol


def _argmax_witness(values, *coords):
    i = np.unravel_index(int(np.argmax(values)), values.shape)
    return float(values[i]), [float(np.broadcast_to(c, values.shape)[i]) for c in coords]


def scan_large(models, shock, a, eps=0.05, b_lo=None, grid=LargeScanGrid(), state_floor=None):
    """Evaluate the three large-shock conditions at weight ratio ``a``.

    1. ``d_cont <= tol`` on Pi_a.
    2. ``d_rh <= tol`` for shocks leaving Pi_a that are entropic for ``eta``
       and for the Kruzhkov entropy at ``phi_tangent(b_lo)``.
    3. ``d_rh <= tol`` for discontinuities from ``u- <= phi_flat0(u_L) - eps``
       into Pi_a. ``state_floor`` raises the lower end of the ``u-`` range
       (for data already known to stay above it); by default it is ``-M``.
    """
    m = models.bound
    flux, entropy = models.flux, models.entropy
    weight = LargeWeight(a)
    pi = compute_pi(models, shock, weight)
    u = pi.grid(grid.pi_points, include=(shock.u_L,))
    cont = d_cont(models, shock, weight, u)
    cont_max, (cont_at,) = _argmax_witness(cont, u)

    b = shock.u_L if b_lo is None else b_lo
    kruzhkov = KruzhkovEntropy(flux, phi_tangent(flux, b))
    um = u[:, None]
    up = np.linspace(-m, m, grid.right_points)[None, :]
    um, up = np.broadcast_arrays(um, up)
    entropic = ((np.abs(um - up) > 0)
                & (entropy_dissipation(entropy, flux, um, up) <= ENTROPIC_TOL)
                & (entropy_dissipation(kruzhkov, flux, um, up) <= ENTROPIC_TOL))
    values = np.where(entropic, d_rh(models, shock, weight, um, up), -np.inf)
    entropic_max, entropic_at = _argmax_witness(values, um, up)

    flat = phi_flat0(entropy, flux, shock.u_L)
    floor = -m if state_floor is None else max(-m, state_floor)
    if floor <= flat - eps:
        far = np.linspace(floor, flat - eps, grid.far_left_points)
        fm, fp = np.broadcast_arrays(far[:, None], u[None, :])
        far_values = d_rh(models, shock, weight, fm, fp)
        far_max, far_at = _argmax_witness(far_values, fm, fp)
    else:
        far_max, far_at = -np.inf, [float("nan"), float("nan")]

    witness = {"cont": {"u": cont_at, "value": cont_max},
               "entropic": {"u_minus": entropic_at[0], "u_plus": entropic_at[1], "value": entropic_max},
               "far_left": {"u_minus": far_at[0], "u_plus": far_at[1], "value": far_max},
               "pi": (pi.lo, pi.hi)}
    return LargeScan(a, cont_max, entropic_max, far_max, witness)


@dataclass
class LargeCalibration:
    a_star: float
    scan: LargeScan
    history: list


def calibrate_large(models, shock, eps=0.05, b_lo=None, grid=LargeScanGrid(), tol=VERIFY_TOL,
                    resolution=1e-4, a_min=1e-6, state_floor=None):
    """Largest certified weight ratio ``a*`` for a large shock.

    Halves ``a`` from 1/2 until all scans pass, then bisects in log scale
    between the last failure and the first success until their ratio is
    within ``1 + resolution``. The returned value always passed (ties go to
    the smaller ``a``).
    """
    if not shock.u_L > shock.u_R or shock.s0 == 0:
        raise ValueError("calibrate_large needs a decreasing shock with s0 > 0")
    if not shock.u_L > 0:
        raise ValueError("calibrate_large needs u_L > 0")
    history = []

    def run(a):
        scan = scan_large(models, shock, a, eps, b_lo, grid, state_floor)
        history.append((a, scan.passed(tol)))
        return scan

    failing = 1.0 - 1e-6
    a = 0.5
    scan = run(a)
    worst = scan
    while not scan.passed(tol):
        failing = a
        a *= 0.5
        if a < a_min:
            raise CalibrationError(f"no weight ratio in ({a_min}, 1) passes the large-shock scans",
                                   witness=worst.witness)
        scan = run(a)
    passing, best = a, scan
    while failing / passing > 1.0 + resolution:
        mid = float(np.sqrt(failing * passing))
        trial = run(mid)
        if trial.passed(tol):
            passing, best = mid, trial
        else:
            failing = mid
    return LargeCalibration(passing, best, history)


@dataclass
class SmallCalibration:
    """Certified small-shock constants.

    ``C0`` with ``s0_max`` such that every ``C`` in ``{C0/2, C0, 2 C0}``
    passed for all sampled shocks of strength below ``s0_max``; ``K`` is
    the fitted rate constant in ``max d_cont <= -K s0**3``.
    """

    C0: float
    s0_max: float
    K: float
    d_max_worst: float
    rounds: int


def scan_small(models, u_L, s0, C, pi_points=401, lower_state=None):
    """``(max d_cont, max d_max, argmax of d_max)`` over Pi_{C, s0} for the shock ``(u_L, u_L - s0)``."""
    shock = ShockPair(u_L, u_L - s0)
    weight = SmallWeight(C)
    pi = compute_pi(models, shock, weight)
    u = pi.grid(pi_points, include=(u_L,))
    cont = d_cont(models, shock, weight, u)
    dm = d_max(models, shock, weight, u, lower_state)
    i = int(np.argmax(dm))
    return float(cont.max()), float(dm[i]), float(u[i]), pi


def calibrate_small(models, b_lo, b_hi, trial_C=2.0, tol=VERIFY_TOL, n_states=9, n_strengths=6,
                    s0_start=None, max_rounds=40, pi_points=401):
    """Find ``(C0, s0_max)`` certifying the small-shock dissipation scans on ``[b_lo, b_hi]``.

    Failure of the ``d_cont`` rate doubles ``C0``; failure of ``d_max``
    halves ``s0_max``.
    """
    if not 0 < b_lo < b_hi:
        raise ValueError("need 0 < b_lo < b_hi")
    C0 = float(trial_C)
    s0_max = 0.5 * (b_hi - b_lo) if s0_start is None else float(s0_start)
    lower_state = phi_tangent(models.flux, b_lo)
    states = np.linspace(b_lo, b_hi, n_states)
    worst = {}
    for rounds in range(1, max_rounds + 1):
        strengths = np.geomspace(1e-3 * s0_max, 0.999 * s0_max, n_strengths)
        rate_ok, dmax_ok = True, True
        K = np.inf
        dmax_worst = -np.inf
        for C in (0.5 * C0, C0, 2 * C0):
            for u_L in states:
                for s0 in strengths:
                    if u_L - s0 < b_lo:
                        continue
                    try:
                        cont, dm, at, _ = scan_small(models, u_L, s0, C, pi_points, lower_state)
                    except EmptySetError:
                        rate_ok = False
                        continue
                    K = min(K, -cont / s0 ** 3)
                    if dm > dmax_worst:
                        dmax_worst = dm
                        worst = {"u_L": float(u_L), "s0": float(s0), "C": float(C), "u": at, "d_max": dm}
                    if cont >= 0:
                        rate_ok = False
                    if dm > tol:
                        dmax_ok = False
        if rate_ok and dmax_ok and np.isfinite(K) and K > 0:
            return SmallCalibration(C0, s0_max, float(K), float(dmax_worst), rounds)
        if not rate_ok:
            C0 *= 2.0
        if not dmax_ok:
            s0_max *= 0.5
    raise CalibrationError("small-shock calibration did not converge", witness=worst)


def speed_of(models, u_minus, u_plus):
    return shock_speed(models.flux, u_minus, u_plus)
