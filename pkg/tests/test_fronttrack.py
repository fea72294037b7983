import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ccstab.acceptance import check_front_structure, random_bv_profile
from ccstab.errors import InvariantViolation, RefinementError, UnsupportedConfigurationError
from ccstab.fronttrack import (BIG, RAREFACTION, SMALL, FrontParams, FrontState, Wave, advance, classify_interaction,
                               discretize_initial, initial_state, resolve_interaction, rh_speed, run, solve_riemann)
from ccstab.profiles import PiecewiseConstant

P = FrontParams(eps=0.1, C0=2.0, C1=0.5, h=0.05)


def test_params_validation():
    with pytest.raises(ValueError):
        FrontParams(eps=0.3, C0=2.0)
    with pytest.raises(ValueError):
        FrontParams(eps=0.1, C0=2.0, C1=0.7)


def test_riemann_shock(cubic_quad):
    params = FrontParams(eps=0.05, C0=2.0, C1=0.5, h=0.01)
    waves = solve_riemann(1.0, 0.9, params)
    assert [w.kind for w in waves] == [BIG] and waves[0].ell == 1
    assert rh_speed(cubic_quad.flux)(waves[0], None) == pytest.approx(2.71)
    assert solve_riemann(1.0, 1.0, params) == []


def test_riemann_fan(cubic_quad):
    waves = solve_riemann(1.0, 1.25, FrontParams(h=0.1))
    states = [waves[0].left] + [w.right for w in waves]
    assert states == pytest.approx([1.0, 1.0 + 1 / 12, 1.0 + 2 / 12, 1.25])
    speed = rh_speed(cubic_quad.flux)
    assert [speed(w, None) for w in waves] == pytest.approx([3 * s ** 2 for s in states[1:]])
    assert all(w.kind == RAREFACTION for w in waves)


def test_riemann_rejects_concave_region():
    with pytest.raises(UnsupportedConfigurationError):
        solve_riemann(0.5, -0.2, P)


def test_interaction_taxonomy():
    small_a, small_b = Wave(SMALL, 1.0, 0.98, 0), Wave(SMALL, 0.98, 0.97, 0)
    assert classify_interaction(small_a, small_b) == "A4"
    out, tax, dl, k = resolve_interaction(small_a, small_b, P)
    assert (tax, out.kind, out.ell, k) == ("A4", SMALL, 0, None)
    assert out.strength == pytest.approx(0.03)

    rare, small = Wave(RAREFACTION, 1.0, 1.04, 0), Wave(SMALL, 1.04, 0.98, 0)
    out, tax, _, _ = resolve_interaction(rare, small, P)
    assert tax == "B2" and out.kind == SMALL and out.strength == pytest.approx(0.02)

    big_a, big_b = Wave(BIG, 1.5, 1.3, 0, ell=1), Wave(BIG, 1.3, 1.1, 0, ell=1)
    out, tax, dl, k = resolve_interaction(big_a, big_b, P)
    assert (tax, out.kind, out.ell, k) == ("A1", BIG, 2, None)

    big, small = Wave(BIG, 1.5, 1.3, 0, ell=1), Wave(SMALL, 1.3, 1.27, 0)
    out, tax, dl, k = resolve_interaction(big, small, P)
    assert tax == "A3" and k == pytest.approx(1 - 0.03 * P.C0)

    with pytest.raises(InvariantViolation):
        classify_interaction(Wave(RAREFACTION, 1.0, 1.05, 0), Wave(RAREFACTION, 1.05, 1.1, 0))


def _state(waves):
    return FrontState(0.0, waves, P)


def test_advance_kinematics():
    still = lambda w, s: w.speed
    state = _state([Wave(BIG, 1.5, 1.0, 0.0, speed=1.0, ell=1)])
    assert advance(state, still) == math.inf
    state = _state([Wave(BIG, 1.5, 1.3, 0.0, speed=2.0, ell=1), Wave(BIG, 1.3, 1.0, 1.0, speed=1.0, ell=1)])
    assert advance(state, lambda w, s: 0.0) == pytest.approx(1.0)
    assert len(state.waves) == 1 and state.log[0].taxonomy == "A1"


def test_simultaneous_collisions_are_split():
    waves = [Wave(BIG, 1.5, 1.3, -1.0, speed=1.0, ell=1), Wave(BIG, 1.3, 1.1, 0.0, speed=0.0, ell=1),
             Wave(BIG, 1.1, 0.9, 1.0, speed=-1.0, ell=1)]
    state = _state(waves)
    t1 = advance(state, lambda w, s: 0.0)
    t2 = advance(state, lambda w, s: 0.0)
    assert state.perturbations and len(state.log) == 2
    assert t1 < t2 and t2 - t1 < 1e-6


def test_weight_jumps():
    params = FrontParams(eps=0.1, C0=2.0, C1=0.5, h=0.05)
    s = FrontState(0.0, [Wave(SMALL, 1.0, 0.96, 0.0)], params)
    assert (s.weight_at(-1), s.weight_at(1)) == pytest.approx((1.0, 0.92))
    s = FrontState(0.0, [Wave(BIG, 1.0, 0.5, 0.0, ell=1)], params)
    assert (s.weight_at(-1), s.weight_at(1)) == pytest.approx((1.0, 0.5))
    assert FrontState(0.0, [], params).weight_at(0.3) == 1.0


def test_run_examples(cubic_quad):
    speed = rh_speed(cubic_quad.flux)
    traj = run(PiecewiseConstant.step(1.5, 0.5), P, speed, [0.5, 1.0], lambda_hat=6.75)
    assert len(traj.log) == 0 and all(len(s.waves) == 1 for s in traj.snapshots)
    stair = PiecewiseConstant((0.0, 0.1), (1.0, 0.95, 0.9))
    traj = run(stair, P, speed, [1.0], lambda_hat=3.0)
    assert [r.taxonomy for r in traj.log] == ["A4"]
    assert len(traj.snapshots[-1].waves) == 1


def test_discretize_initial():
    prof, err = discretize_initial(lambda x: np.full_like(np.asarray(x, float), 0.8), 0.1)
    assert prof.jumps == [] and err == pytest.approx(0)
    step = PiecewiseConstant.step(1.2, 0.7)
    assert discretize_initial(step, 0.1) == (step, 0.0)
    ramp = lambda x: 1.0 + 0.5 * np.clip(np.asarray(x, float), 0, 1)
    prof, err = discretize_initial(ramp, 0.1, (-1.0, 2.0))
    assert len(prof.jumps) <= 10 and prof.total_variation <= 0.5 + 1e-12
    with pytest.raises(RefinementError):
        discretize_initial(ramp, 0.4, (-1.0, 2.0), l2_budget=1e-3)


@given(st.integers(0, 2 ** 32 - 1))
def test_structure_on_random_data(seed):
    from ccstab.models import build_models
    m = build_models("cubic", "quadratic")
    stats = check_front_structure(m, random_bv_profile(np.random.default_rng(seed)), P, T=0.3, snapshots=13)
    assert stats["tv_excess"] <= 1e-12 and stats["range_excess"] <= 0
    assert stats["lipschitz_ratio"] <= 1.01
    assert stats["big_max"] <= stats["big_cap"]
    assert stats["floor"] <= stats["weight_min"] and stats["weight_max"] <= 1
    assert stats["jump_ratio_err"] <= 1e-12


def test_big_shocks_stay_big_and_potential_bounded(cubic_quad):
    rng = np.random.default_rng(11)
    for _ in range(5):
        prof = random_bv_profile(rng)
        traj = run(prof, P, rh_speed(cubic_quad.flux), np.linspace(0, 0.5, 11), lambda_hat=6.75)
        cap = math.ceil(2 * prof.total_variation / P.eps)
        for snap in traj.snapshots:
            assert snap.big_shock_potential <= cap
            assert all(w.strength >= P.eps / 2 for w in snap.waves if w.kind == BIG)


def test_initial_state_speeds(cubic_quad):
    state = initial_state(PiecewiseConstant.step(1.0, 0.5), P, rh_speed(cubic_quad.flux))
    assert state.waves[0].speed == pytest.approx(1 + 0.5 + 0.25)
