"""Command-line orchestration: ``ccstab --config run.cfg --command <name> [--seed N] [--out DIR]``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import acceptance
from .admissibility import is_eta_entropic, is_kruzhkov_entropic, is_oleinik
from .artifacts import write_csv, write_grid_dump, write_manifest, write_report
from .calibrate import LargeScanGrid, calibrate_large, calibrate_small
from .config import AUTO, COMMANDS, RunConfig, parse_config, plan
from .curves import phi_tangent, tabulate
from .dissipation import (LargeWeight, ShockPair, SmallWeight, compute_pi, d_cont, d_max, eta_tilde,
                          fit_q_control)
from .errors import CalibrationError, CcstabError, ConfigError, InvariantViolation
from .fronttrack import FrontParams, rh_speed, run
from .godunov import godunov_run
from .profiles import PiecewiseConstant
from .shift import ShiftedSpeeds, filippov_shift
from .stability import cone_stability_experiment, nonclassical_demo

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY = 0, 1, 2


class VerificationFailure(CcstabError):
    def __init__(self, message, witness):
        super().__init__(message)
        self.witness = witness


class Context:
    """Resolved constants, the seeded generator and the list of written artifacts."""

    def __init__(self, cfg, out_dir, seed):
        self.cfg = cfg
        self.out = Path(out_dir)
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.models = cfg.models()
        self.constants = {}
        self.artifacts = []

    def path(self, name):
        return self.out / name

    def csv(self, name, header, rows):
        self.artifacts.append(write_csv(self.path(name), header, rows))

    def report(self, name, items):
        self.artifacts.append(write_report(self.path(name), items))

    @property
    def shock(self):
        return ShockPair(self.cfg.u_L, self.cfg.u_R)

    @property
    def C0(self):
        return self.constants.get("C0", self.cfg.C0)

    @property
    def C1(self):
        return self.constants.get("C1", self.cfg.C1)

    def front_params(self, h=None):
        return FrontParams(eps=self.cfg.eps, C0=self.C0, C1=self.C1, h=self.cfg.h if h is None else h)

    def riemann_datum(self):
        return PiecewiseConstant.step(self.cfg.u_L, self.cfg.u_R)


def _stage_calibrate_small(ctx):
    cfg = ctx.cfg
    cal = calibrate_small(ctx.models, cfg.b_lo, cfg.b_hi, pi_points=cfg.pi_points)
    ctx.constants.update(C0=cal.C0, s0_max=cal.s0_max, K=cal.K)
    ctx.report("calibrate_small.txt", {"C0": cal.C0, "s0_max": cal.s0_max, "K": cal.K,
                                       "d_max_worst": cal.d_max_worst, "rounds": cal.rounds})


def _stage_calibrate_large(ctx):
    cfg = ctx.cfg
    grid = LargeScanGrid(cfg.pi_points, cfg.right_points, cfg.far_left_points)
    # The configured interval only applies to shocks lying inside it.
    b_lo = cfg.b_lo if cfg.b_lo <= min(cfg.u_L, cfg.u_R) else None
    cal = calibrate_large(ctx.models, ctx.shock, eps=cfg.eps, b_lo=b_lo, grid=grid)
    c0 = ctx.C0 if ctx.C0 != AUTO else 2.0
    ctx.constants.update(a_star=cal.a_star, C1=min(cal.a_star, (1 - c0 * cfg.eps) ** 2))
    ctx.csv("calibrate_large_history.csv", ["a", "passed"], cal.history)
    s = cal.scan
    ctx.report("calibrate_large.txt", {"a_star": cal.a_star, "C1": ctx.constants["C1"],
                                       "b_lo": cfg.u_L if b_lo is None else b_lo, "cont_max": s.cont_max,
                                       "entropic_max": s.entropic_max, "far_left_max": s.far_left_max,
                                       "pi_lo": s.witness["pi"][0], "pi_hi": s.witness["pi"][1]})


def _cmd_aux(ctx):
    m = ctx.cfg.bound
    states = np.arange(-40, 41) / 40 * m
    rows = tabulate(ctx.models.entropy, ctx.models.flux, states)
    ctx.csv("aux.csv", ["u", "phi_tangent", "phi_flat0", "phi_sharp0"], rows)


def _cmd_admissible(ctx):
    cfg = ctx.cfg
    f, e = ctx.models.flux, ctx.models.entropy
    k = phi_tangent(f, cfg.b_lo)
    verdict = (is_oleinik(f, cfg.u_L, cfg.u_R), is_eta_entropic(e, f, cfg.u_L, cfg.u_R),
               is_kruzhkov_entropic(f, cfg.u_L, cfg.u_R, k))
    print(f"oleinik={verdict[0]} eta={verdict[1]} kruzhkov:{k:.6g}={verdict[2]}")
    rows = []
    m = cfg.bound
    for _ in range(cfg.samples):
        um, up, kk = ctx.rng.uniform(-m, m, 3)
        ol = is_oleinik(f, um, up)
        et = is_eta_entropic(e, f, um, up)
        kr = is_kruzhkov_entropic(f, um, up, kk)
        if ol and not et:
            raise VerificationFailure("Oleinik shock is not entropic", {"u_minus": um, "u_plus": up})
        rows.append((um, up, kk, ol, et, kr))
    ctx.csv("admissible.csv", ["u_minus", "u_plus", "k", "oleinik", "eta", "kruzhkov"], rows)
    ctx.report("admissible.txt", {"u_minus": cfg.u_L, "u_plus": cfg.u_R, "k": k, "oleinik": verdict[0],
                                  "eta": verdict[1], "kruzhkov": verdict[2]})


def _weight(ctx):
    shock = ctx.shock
    if shock.s0 >= ctx.cfg.eps:
        return LargeWeight(ctx.C1)
    return SmallWeight(ctx.C0)


def _cmd_dissipation_scan(ctx):
    shock, weight = ctx.shock, _weight(ctx)
    pi = compute_pi(ctx.models, shock, weight)
    u = pi.grid(ctx.cfg.pi_points, include=(shock.u_L,))
    lower = phi_tangent(ctx.models.flux, ctx.cfg.b_lo)
    rows = zip(u, eta_tilde(ctx.models, shock, weight, u), d_cont(ctx.models, shock, weight, u),
               d_max(ctx.models, shock, weight, u, lower))
    ctx.csv("dissipation_scan.csv", ["u", "eta_tilde", "d_cont", "d_max"], rows)
    c2 = fit_q_control(ctx.models, shock, weight, pi)
    ctx.constants.update(C2=c2)
    ctx.report("dissipation_scan.txt", {"pi_lo": pi.lo, "pi_hi": pi.hi, "diameter": pi.diameter, "C2": c2})


def _front(ctx):
    cfg = ctx.cfg
    profile = ctx.riemann_datum() if cfg.u_L != cfg.u_R else PiecewiseConstant.constant(cfg.u_L)
    lo, hi = min(profile.values), max(profile.values)
    lam = float(np.max(np.abs(ctx.models.flux.derivative(np.linspace(lo, hi, 257), 1))))
    times = np.linspace(0.0, cfg.T, 21)
    params = ctx.front_params()
    if cfg.mode == "rh":
        return run(profile, params, rh_speed(ctx.models.flux), times, lambda_hat=lam), times
    wild = _reference(ctx)
    speeds = ShiftedSpeeds(ctx.models, wild, params)
    traj = run(profile, params, speeds, times, lambda_hat=None, step=wild.dt,
               step_hook=lambda state, t: speeds.reset(state, t))
    ctx.constants.update(lambda_hat=speeds.lambda_hat)
    return traj, times


def _cmd_fronttrack(ctx):
    traj, times = _front(ctx)
    rows = [(t, j, w.kind, w.position, w.left, w.right, w.speed, w.ell)
            for t, snap in zip(times, traj.snapshots) for j, w in enumerate(snap.waves)]
    ctx.csv("fronts.csv", ["t", "index", "kind", "position", "left", "right", "speed", "ell"], rows)
    log = [(r.time, r.position, r.taxonomy, r.delta_L, math.nan if r.k_added is None else r.k_added)
           for r in traj.log]
    ctx.csv("interactions.csv", ["t", "x", "taxonomy", "delta_L", "K_added"], log)


def _cmd_weight_trace(ctx):
    traj, times = _front(ctx)
    rows = []
    for t, snap in zip(times, traj.snapshots):
        pos = np.array([w.position for w in snap.waves])
        probes = np.concatenate(([pos.min() - 1], 0.5 * (pos[1:] + pos[:-1]), [pos.max() + 1])) if pos.size \
            else np.zeros(1)
        a = snap.weight_profile(probes)
        rows.append((t, snap.big_shock_potential, float(np.prod(snap.K)) if snap.K else 1.0,
                     float(a.min()), float(a.max()), sum(w.kind == "big" for w in snap.waves)))
    floor = ctx.front_params().weight_floor(traj.initial_tv)
    if min(r[3] for r in rows) < floor:
        raise VerificationFailure("weight dropped below its floor", {"floor": floor})
    ctx.csv("weight_trace.csv", ["t", "L", "K", "a_min", "a_max", "big_shocks"], rows)


def _reference(ctx):
    cfg = ctx.cfg
    n = int(round(2 * cfg.R / cfg.grid_dx))
    return godunov_run(ctx.models.flux, ctx.riemann_datum(), -cfg.R, cfg.R, n, cfg.T, cfl=cfg.cfl,
                       entropy_levels=(cfg.u_L, cfg.u_R, 0.5 * (cfg.u_L + cfg.u_R)))


def _cmd_reference(ctx):
    grid = _reference(ctx)
    every = max(1, (len(grid.times) - 1) // 20)
    ctx.artifacts.append(write_grid_dump(ctx.path("reference.grid"), grid, every))
    ctx.report("reference.txt", {"dt": grid.dt, "n": grid.n, "max_conservation_error": grid.max_conservation_error,
                                 "max_entropy_residual": grid.max_entropy_residual})


def _cmd_shift(ctx):
    grid = _reference(ctx)
    shock = ctx.shock
    weight = LargeWeight(ctx.C1)
    pi = compute_pi(ctx.models, shock, weight)
    c2 = fit_q_control(ctx.models, shock, weight, pi)
    path = filippov_shift(ctx.models, grid, pi, c2, 0.0, 0.0)
    ctx.constants.update(C2=c2)
    ctx.csv("shift.csv", ["t", "h"], path.samples)
    ctx.report("shift.txt", {"lipschitz_bound": path.lipschitz_bound, "truncated": path.truncated,
                             "pi_lo": pi.lo, "pi_hi": pi.hi, "C2": c2})


def _cmd_cone(ctx):
    cfg = ctx.cfg
    u0, bump = acceptance.cone_initial_data()
    wild0 = lambda x: u0(x) + cfg.delta * bump(x)
    r = cone_stability_experiment(ctx.models, u0, wild0, ctx.front_params(), R=cfg.R, T=cfg.cone_T, v=cfg.v,
                                  dx=cfg.grid_dx)
    ctx.csv("cone_energy.csv", ["t", "weighted_relative_entropy"], zip(r.times, r.energy))
    ctx.report("cone_report.txt", {
        "delta": r.delta, "h": r.h, "dx": r.dx, "T": r.T, "R": r.R, "v": r.v, "lambda_hat": r.lambda_hat,
        "inverse_m": r.inverse_m, "window_distance": r.window_distance, "ratio": r.ratio,
        "ratio_bound": r.ratio_bound, "weight_min": r.weight_min, "max_energy_increase": r.max_increase,
        "interface_shock": r.interface_shock, "interface_rarefaction": r.interface_rarefaction,
        "interactions": r.interactions})
    if r.v <= r.lambda_hat:
        raise VerificationFailure("cone speed does not exceed the maximal shift speed",
                                  {"v": r.v, "lambda_hat": r.lambda_hat})
    if r.ratio > r.ratio_bound:
        raise VerificationFailure("stability ratio exceeds its bound", {"ratio": r.ratio, "bound": r.ratio_bound})


def _cmd_nonclassical(ctx):
    sols, _ = nonclassical_demo(ctx.models, u_L=ctx.cfg.u_L if ctx.cfg.u_L > 0 else 1.0)
    ctx.csv("nonclassical.csv", ["middle", "speed_1", "speed_2", "rh_1", "rh_2", "E_1", "E_2", "l2_margin"],
            [(s.middle, *s.speeds, *s.rh_residuals, *s.dissipations, s.l2_margin) for s in sols])
    best = max(sols, key=lambda s: s.l2_margin)
    ctx.report("nonclassical.txt", {"u_L": best.u_L, "u_R": best.u_R, "members": len(sols),
                                    "best_middle": best.middle, "margin": best.l2_margin})
    print(f"non-uniqueness margin {best.l2_margin:.6g} at m={best.middle:.6g} ({len(sols)} members)")
    if not best.l2_margin > 0:
        raise VerificationFailure("no positive margin", {"margin": best.l2_margin})


def _cmd_verify_all(ctx):
    results = acceptance.run_all()
    ctx.csv("acceptance.csv", ["criterion", "passed", "elapsed", "limit"],
            [(r.number, r.ok, r.elapsed, r.limit) for r in results])
    failed = [r for r in results if not r.ok]
    if failed:
        raise VerificationFailure("acceptance criteria failed",
                                  {r.number: {"name": r.name, "details": r.details} for r in failed})


STAGES = {
    "aux": _cmd_aux, "admissible": _cmd_admissible, "calibrate-large": _stage_calibrate_large,
    "calibrate-small": _stage_calibrate_small, "dissipation-scan": _cmd_dissipation_scan,
    "fronttrack": _cmd_fronttrack, "weight-trace": _cmd_weight_trace, "reference": _cmd_reference,
    "shift": _cmd_shift, "cone-experiment": _cmd_cone, "nonclassical-demo": _cmd_nonclassical,
    "verify-all": _cmd_verify_all,
}


def _default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    return str(o)


def execute(cfg: RunConfig, command, out_dir=None, seed=None, config_text=""):
    """Run ``command`` and its planned stages; returns the exit code."""
    stages = plan(cfg, command)
    seed = cfg.rng_seed if seed is None else seed
    out = Path(out_dir if out_dir is not None else cfg.output_dir) / command
    out.mkdir(parents=True, exist_ok=True)
    ctx = Context(cfg, out, seed)
    try:
        for stage in stages:
            STAGES[stage](ctx)
    except (VerificationFailure, CalibrationError, InvariantViolation) as exc:
        witness = getattr(exc, "witness", None) or {"log": [str(r) for r in getattr(exc, "log", [])][-20:]}
        (out / "witness.json").write_text(json.dumps({"error": str(exc), "witness": witness}, indent=2,
                                                     sort_keys=True, default=_default) + "\n")
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (ValueError, CcstabError) as exc:
        # domain, unsupported-range and empty-set errors: the configuration cannot be run
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    write_manifest(out, config_text, cfg.echo(), command, seed, ctx.constants, ctx.artifacts)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="ccstab", description=__doc__)
    p.add_argument("--config", help="path to a key = value configuration file")
    p.add_argument("--seed", type=int, help="random seed (overrides rng_seed)")
    p.add_argument("--out", help="output directory (overrides output_dir)")
    p.add_argument("--command", required=True, help="one of: " + ", ".join(COMMANDS))
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if args.command not in COMMANDS:
        parser.print_usage(sys.stderr)
        print(f"unknown command '{args.command}'", file=sys.stderr)
        return EXIT_CONFIG
    text = ""
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            print(f"cannot read config: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    try:
        cfg = parse_config(text)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return EXIT_CONFIG
    return execute(cfg, args.command, args.out, args.seed, text)


if __name__ == "__main__":
    raise SystemExit(main())
