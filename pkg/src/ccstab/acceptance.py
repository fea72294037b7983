"""The twelve acceptance criteria as runnable checks.

Each ``criterion_*`` function returns a ``CriterionResult``; ``run_all``
executes a selection and ``main`` prints one pass/fail line per criterion.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .admissibility import ADMISSIBILITY_TOL, kruzhkov_closed_form
from .calibrate import calibrate_large, calibrate_small, scan_large, scan_small
from .curves import companion, phi_flat0, phi_tangent
from .dissipation import LargeWeight, ShockPair, SmallWeight, compute_pi, d_cont
from .errors import UnsupportedConfigurationError
from .fronttrack import BIG, FrontParams, rh_speed, run
from .godunov import godunov_run
from .laws import entropy_dissipation
from .models import KruzhkovEntropy, build_models
from .profiles import PiecewiseConstant, lp_distance, lp_distance_to_cells
from .stability import cone_stability_experiment, l2_to_callable, nonclassical_demo

DEFAULT_SEED = 20240601


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    elapsed: float
    limit: float
    details: dict = field(default_factory=dict)

    @property
    def within_time(self):
        return self.elapsed <= self.limit

    @property
    def ok(self):
        return self.passed and self.within_time

    def line(self):
        verdict = "PASS" if self.ok else "FAIL"
        summary = ", ".join(f"{k}={_short(v)}" for k, v in self.details.items() if not isinstance(v, (list, dict)))
        return (f"[{verdict}] {self.number:2d}. {self.name} ({self.elapsed:.2f}s / {self.limit:g}s)"
                + (f": {summary}" if summary else ""))


def _short(v):
    if isinstance(v, float):
        return f"{v:.4g}"
    return str(v)


def _timed(number, name, limit, body):
    start = time.perf_counter()
    passed, details = body()
    return CriterionResult(number, name, bool(passed), time.perf_counter() - start, limit, details)


def _slope(x, y):
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def criterion_1():
    def body():
        m = build_models("cubic", "exp")
        value = phi_flat0(m.entropy, m.flux, 1.0)
        return abs(value + 1.048) <= 5e-3, {"phi_flat0(1)": value}
    return _timed(1, "zero-dissipation state for the exponential entropy", 1.0, body)


def criterion_2():
    def body():
        m = build_models("cubic", "quadratic")
        f = m.flux
        grid = np.linspace(-2.0, 2.0, 1000)
        tangent_err = max(abs(phi_tangent(f, u) + u / 2) for u in grid)
        rng = np.random.default_rng(DEFAULT_SEED)
        # Pairs (k, u) whose third intersection -u-k stays inside [-M, M].
        us = np.linspace(-1.9, 1.9, 1000)
        ks = np.clip(-us / 2 + rng.uniform(-0.05, 0.05, us.size) + rng.choice([-0.6, 0.6], us.size), -2, 2)
        ks = np.where(np.abs(-us - ks) <= 2, ks, -us / 2)
        comp_err = max(abs(companion(f, k, u) - (-u - k)) for k, u in zip(ks, us))
        flat = phi_flat0(m.entropy, f, 1.0)
        ok = tangent_err < 1e-9 and comp_err < 1e-9 and abs(flat + 1) <= 1e-9
        return ok, {"tangent_err": tangent_err, "companion_err": comp_err, "phi_flat0(1)+1": flat + 1}
    return _timed(2, "closed-form curve oracles", 1.0, body)


def sample_kruzhkov_triples(n, bound=2.0, seed=DEFAULT_SEED):
    """``n`` triples ``(u-, u+, k)`` inside the closed form's hypotheses, with the closed-form verdicts."""
    flux = build_models("cubic", "quadratic", bound).flux
    rng = np.random.default_rng(seed)
    out, skipped = [], 0
    while len(out) < n:
        um = rng.uniform(0.0, bound)
        up = rng.uniform(-bound, um)
        k = rng.uniform(-bound, um)
        if um == 0:
            continue
        try:
            verdict = kruzhkov_closed_form(flux, um, up, k)
        except UnsupportedConfigurationError:
            skipped += 1
            continue
        out.append((um, up, k, verdict))
    return flux, out, skipped


def criterion_3(n=10_000):
    def body():
        flux, triples, skipped = sample_kruzhkov_triples(n)
        bad = []
        for um, up, k, verdict in triples:
            e = entropy_dissipation(KruzhkovEntropy(flux, k), flux, um, up)
            # k outside [u+, u-] gives an exactly zero dissipation up to roundoff.
            if verdict != (e <= ADMISSIBILITY_TOL):
                bad.append((um, up, k, verdict, e))
        return not bad, {"samples": len(triples), "disagreements": len(bad), "skipped": skipped,
                         "witnesses": bad[:5]}
    return _timed(3, "Kruzhkov closed form vs dissipation sign", 5.0, body)


def criterion_4():
    def body():
        m = build_models("cubic", "quadratic")
        shock = ShockPair(1.0, 0.0)
        ratios = [compute_pi(m, shock, LargeWeight(a)).diameter / math.sqrt(a) for a in (1e-1, 1e-2, 1e-3, 1e-4)]
        variation = max(ratios) / min(ratios) - 1
        small = ShockPair(1.0, 1.0 - 1e-6)
        Cs = [1e2, 1e3, 1e4, 1e5]
        diams = [compute_pi(m, small, SmallWeight(C)).diameter for C in Cs]
        slope = _slope(Cs, diams)
        ok = variation < 0.25 and abs(slope + 1) <= 0.05
        return ok, {"ratio_variation": variation, "small_slope": slope, "ratios": ratios}
    return _timed(4, "Pi geometry", 10.0, body)


_SMALL_CACHE = {}


def _small_calibration():
    if "cal" not in _SMALL_CACHE:
        _SMALL_CACHE["cal"] = calibrate_small(build_models("cubic", "quadratic"), 0.5, 1.5)
    return _SMALL_CACHE["cal"]


def criterion_5():
    def body():
        m = build_models("cubic", "quadratic")
        cal = _small_calibration()
        s0s = np.geomspace(1e-1, 1e-3, 5)
        peaks = []
        for s0 in s0s:
            shock = ShockPair(1.0, 1.0 - s0)
            weight = SmallWeight(cal.C0)
            pi = compute_pi(m, shock, weight)
            peaks.append(abs(float(np.max(d_cont(m, shock, weight, pi.grid(801, include=(1.0,)))))))
        slope = _slope(s0s, peaks)
        return abs(slope - 3) <= 0.15, {"C0": cal.C0, "slope": slope}
    return _timed(5, "small-shock cubic rate of max D_cont", 30.0, body)


def criterion_6(n=1000, pi_points=201):
    def body():
        m = build_models("cubic", "quadratic")
        cal = _small_calibration()
        rng = np.random.default_rng(DEFAULT_SEED + 6)
        lower = phi_tangent(m.flux, 0.5)
        worst, far = -np.inf, 0
        witness = None
        for _ in range(n):
            s0 = rng.uniform(1e-3, 1.0) * cal.s0_max
            u_L = rng.uniform(0.5 + s0, 1.5)
            cont, dm, arg, pi = scan_small(m, u_L, s0, cal.C0, pi_points, lower)
            step = pi.diameter / (pi_points - 1)
            if dm > worst:
                worst, witness = dm, {"u_L": u_L, "s0": s0, "argmax": arg}
            if abs(arg - u_L) > step * (1 + 1e-9):
                far += 1
        ok = worst <= 1e-9 and far == 0
        return ok, {"pairs": n, "max_D_max": worst, "argmax_off_u_L": far, "witness": witness}
    return _timed(6, "D_max certification", 60.0, body)


def criterion_7():
    def body():
        m = build_models("cubic", "quadratic")
        details, ok = {}, True
        for pair in ((1.0, 0.0), (1.0, -0.4)):
            shock = ShockPair(*pair)
            cal = calibrate_large(m, shock)
            half = scan_large(m, shock, cal.a_star / 2)
            good = 0 < cal.a_star < 1 and half.passed()
            ok &= good
            details[f"a*{pair}"] = cal.a_star
        return ok, details
    return _timed(7, "large-shock calibration", 60.0, body)


def random_bv_profile(rng, lo=0.5, hi=1.5, max_tv=2.0, window=(-1.0, 1.0)):
    """Random piecewise-constant data in ``[lo, hi]`` with total variation at most ``max_tv``."""
    n = int(rng.integers(3, 12))
    values = rng.uniform(lo, hi, n + 1)
    tv = np.sum(np.abs(np.diff(values)))
    target = rng.uniform(0.3, max_tv)
    if tv > target:
        mid = 0.5 * (lo + hi)
        values = mid + (values - mid) * (target / tv)
    breaks = np.sort(rng.uniform(*window, n))
    return PiecewiseConstant(tuple(breaks), tuple(values))


def check_front_structure(models, profile, params, T=0.5, snapshots=41):
    """Run front tracking in chord-speed mode and measure every structural bound; returns a dict of margins."""
    lo, hi = min(profile.values), max(profile.values)
    lam = float(np.max(np.abs(models.flux.derivative(np.linspace(lo, hi, 257), 1))))
    times = np.linspace(0, T, snapshots)
    traj = run(profile, params, rh_speed(models.flux), times, lambda_hat=lam, check=True)
    tv0 = traj.initial_tv
    floor = params.weight_floor(tv0)
    big_cap = math.ceil(2 * tv0 / params.eps)
    out = {"tv_excess": 0.0, "range_excess": 0.0, "lipschitz_ratio": 0.0, "big_max": 0, "big_cap": big_cap,
           "weight_min": 1.0, "weight_max": 0.0, "floor": floor, "jump_ratio_err": 0.0,
           "interactions": len(traj.log), "initial_tv": tv0}
    prev = None
    for k, snap in enumerate(traj.snapshots):
        prof = traj.profile_at(k)
        out["tv_excess"] = max(out["tv_excess"], snap.total_variation - tv0)
        vals = snap.states()
        if vals:
            out["range_excess"] = max(out["range_excess"], max(vals) - hi, lo - min(vals))
        out["big_max"] = max(out["big_max"], sum(w.kind == BIG for w in snap.waves))
        pos = np.array([w.position for w in snap.waves])
        probes = np.concatenate(([pos.min() - 1] if pos.size else [0.0],
                                 0.5 * (pos[1:] + pos[:-1]), [pos.max() + 1] if pos.size else []))
        weights = snap.weight_profile(probes)
        out["weight_min"] = min(out["weight_min"], float(weights.min()))
        out["weight_max"] = max(out["weight_max"], float(weights.max()))
        for j, w in enumerate(snap.waves):
            isolated = all(abs(w.position - o.position) > 1e-12 for i, o in enumerate(snap.waves) if i != j)
            if isolated:
                ratio = snap.weight_at(w.position, "right") / snap.weight_at(w.position, "left")
                out["jump_ratio_err"] = max(out["jump_ratio_err"], abs(ratio - snap.jump_factor(w)))
        if prev is not None:
            span = max(abs(v) for v in prof.breakpoints + prev.breakpoints) + 1 if prof.breakpoints or \
                prev.breakpoints else 1.0
            dist = lp_distance(prof, prev, (-span, span), p=1)
            out["lipschitz_ratio"] = max(out["lipschitz_ratio"], dist / ((times[k] - times[k - 1]) * tv0 * lam))
        prev = prof
    return out


def criterion_8(runs=20):
    def body():
        m = build_models("cubic", "quadratic")
        params = FrontParams(eps=0.1, C0=2.0, C1=0.5, h=0.05)
        rng = np.random.default_rng(DEFAULT_SEED + 8)
        failures = []
        total_interactions = 0
        for r in range(runs):
            stats = check_front_structure(m, random_bv_profile(rng), params)
            total_interactions += stats["interactions"]
            # TV sums of rounded |differences| can differ by a few ulp.
            ok = (stats["tv_excess"] <= 1e-12 * stats["initial_tv"] and stats["range_excess"] <= 0 and stats["lipschitz_ratio"] <= 1.01
                  and stats["big_max"] <= stats["big_cap"] and stats["floor"] <= stats["weight_min"]
                  and stats["weight_max"] <= 1 and stats["jump_ratio_err"] <= 1e-12)
            if not ok:
                failures.append((r, stats))
        return not failures, {"runs": runs, "failures": len(failures), "interactions": total_interactions,
                              "witnesses": failures[:3]}
    return _timed(8, "front-tracking structure", 120.0, body)


RIEMANN_DATUM = PiecewiseConstant.step(1.5, 0.5)
TWO_WAVE_DATUM = PiecewiseConstant((-0.5, 0.0), (0.5, 1.0, 0.5))


def convergence_errors(models, profile, hs=(0.2, 0.1, 0.05, 0.025), R=2.0, T=0.5):
    """``L^1(-R, R)`` distance at ``T`` between chord-speed front tracking and Godunov with ``dx = h/4``."""
    lo, hi = min(profile.values), max(profile.values)
    lam = float(np.max(np.abs(models.flux.derivative(np.linspace(lo, hi, 257), 1))))
    pad = lam * T + 0.5
    errors = []
    for h in hs:
        params = FrontParams(eps=0.1, C0=2.0, C1=0.5, h=h)
        traj = run(profile, params, rh_speed(models.flux), [T], lambda_hat=lam)
        dx = h / 4
        n = int(round(2 * (R + pad) / dx))
        ref = godunov_run(models.flux, profile, -R - pad, R + pad, n, T)
        errors.append(lp_distance_to_cells(traj.profile_at(0), ref.edges, ref.slices[-1], (-R, R), p=1))
    return errors


def criterion_9():
    def body():
        m = build_models("cubic", "quadratic")
        details, ok = {}, True
        for name, datum in (("riemann", RIEMANN_DATUM), ("two_wave", TWO_WAVE_DATUM)):
            errs = convergence_errors(m, datum)
            monotone = all(b < a for a, b in zip(errs, errs[1:]))
            small = errs[-1] < 0.02 * datum.total_variation
            ok &= monotone and small
            details[f"{name}_finest"] = errs[-1]
            details[f"{name}_errors"] = errs
        return ok, details
    return _timed(9, "convergence to the Kruzhkov solution", 300.0, body)


def cone_initial_data():
    """Ramp-plus-shock datum and a smooth unit-``L^2`` bump used as the perturbation shape."""
    def u0(x):
        x = np.asarray(x, dtype=float)
        return np.where(x < -1, 0.9, np.where(x < -0.5, 0.9 + 0.8 * (x + 1), np.where(x < 0, 1.3, 0.7)))

    def raw_bump(x):
        return np.exp(-((np.asarray(x, dtype=float) - 0.3) / 0.3) ** 2)

    norm = l2_to_callable(raw_bump, lambda x: 0.0 * np.asarray(x), (-3.0, 3.0))
    return u0, (lambda x: raw_bump(x) / norm)


def cone_reports(deltas=(0.1, 0.05), levels=((0.05, 0.01), (0.025, 0.005)), R=3.0, T=0.05, v=40.0):
    m = build_models("cubic", "quadratic")
    u0, bump = cone_initial_data()
    reports = []
    for delta in deltas:
        for h, dx in levels:
            wild0 = lambda x, d=delta: u0(x) + d * bump(x)
            params = FrontParams(eps=0.1, C0=2.0, C1=0.5, h=h)
            reports.append(cone_stability_experiment(m, u0, wild0, params, R=R, T=T, v=v, dx=dx))
    return reports


def criterion_10():
    def body():
        reports = cone_reports()
        C = max(r.ratio for r in reports)
        bound = min(r.ratio_bound for r in reports)
        cone_ok = all(r.v > r.lambda_hat for r in reports)
        return C <= bound and cone_ok, {"C": C, "C_bound": bound, "ratios": [r.ratio for r in reports],
                                        "lambda_hat": max(r.lambda_hat for r in reports)}
    return _timed(10, "cone stability experiment", 600.0, body)


def criterion_11():
    def body():
        m = build_models("cubic", "exp")
        sols, _ = nonclassical_demo(m, u_L=1.0)
        good = [s for s in sols if max(s.rh_residuals) <= 1e-10 and max(s.dissipations) <= 1e-10]
        best = max((s.l2_margin for s in good), default=0.0)
        return best > 0.1, {"members": len(good), "best_margin": best}
    return _timed(11, "non-uniqueness demo", 60.0, body)


def criterion_12(n=10_000):
    def body():
        rng = np.random.default_rng(DEFAULT_SEED + 12)
        violations, worst = 0, np.inf
        for i in range(n):
            K = (1.0, 2.0, 4.0)[i % 3]
            size = int(rng.integers(1, 400))
            a = rng.uniform(0, 0.5, size)
            a = a[a > 0]
            total = float(a.sum())
            target = K * rng.uniform(0.5, 1.0)
            if total > target:
                a *= target / total
            log_prod = float(np.sum(np.log1p(-a)))
            margin = log_prod - 4 * K * math.log(0.5)
            worst = min(worst, margin)
            violations += margin < 0
        return violations == 0, {"sets": n, "violations": int(violations), "min_log_margin": worst}
    return _timed(12, "product lower bound", 5.0, body)


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 13)}


def run_all(selection=None, echo=print):
    results = []
    for i in sorted(selection or CRITERIA):
        result = CRITERIA[i]()
        results.append(result)
        if echo is not None:
            echo(result.line())
    return results


def main():
    results = run_all()
    return 0 if all(r.ok for r in results) else 2


if __name__ == "__main__":
    raise SystemExit(main())
