import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ccstab.admissibility import is_eta_entropic, is_kruzhkov_entropic, is_oleinik, kruzhkov_closed_form
from ccstab.curves import phi_tangent
from ccstab.errors import UnsupportedConfigurationError
from ccstab.laws import entropy_dissipation
from ccstab.models import KruzhkovEntropy, build_models


def test_oleinik_examples(cubic_quad):
    f = cubic_quad.flux
    assert is_oleinik(f, 1, 0)
    assert not is_oleinik(f, 1, -0.6)
    assert is_oleinik(f, 1, -0.5)


def test_eta_examples(cubic_quad):
    e, f = cubic_quad.entropy, cubic_quad.flux
    assert is_eta_entropic(e, f, 1, -1)
    assert not is_eta_entropic(e, f, 1, -1.1)
    assert is_eta_entropic(e, f, 0.3, 0.3)


def test_kruzhkov_examples(cubic_quad):
    f = cubic_quad.flux
    assert is_kruzhkov_entropic(f, 1, -0.4, -0.5)
    assert not is_kruzhkov_entropic(f, 1, -0.6, -0.5)
    assert is_kruzhkov_entropic(f, 1, -1, 0)


def test_closed_form_outside_hypotheses(cubic_quad):
    with pytest.raises(UnsupportedConfigurationError):
        kruzhkov_closed_form(cubic_quad.flux, -1, -1.5, -1.2)
    # The fallback still answers with the dissipation sign.
    assert isinstance(is_kruzhkov_entropic(cubic_quad.flux, -1, -1.5, -1.2), bool)


@given(st.floats(0.05, 2.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_closed_form_agrees_with_dissipation(um, frac_up, frac_k):
    f = build_models("cubic", "quadratic").flux
    up = -2.0 + frac_up * (um + 2.0) * 0.999
    k = -2.0 + frac_k * (um + 2.0)
    try:
        verdict = kruzhkov_closed_form(f, um, up, k)
    except UnsupportedConfigurationError:
        return
    e = entropy_dissipation(KruzhkovEntropy(f, k), f, um, up)
    if abs(e) > 1e-12:
        assert verdict == (e < 0)


def test_oleinik_implies_entropic_for_many_entropies():
    m_q, m_e = build_models("cubic", "quadratic"), build_models("cubic", "exp")
    f = m_q.flux
    rng = np.random.default_rng(3)
    ks = rng.uniform(-2, 2, 20)
    checked = 0
    for um, up in rng.uniform(-2, 2, (400, 2)):
        if not is_oleinik(f, um, up):
            continue
        checked += 1
        assert is_eta_entropic(m_q.entropy, f, um, up)
        assert is_eta_entropic(m_e.entropy, f, um, up)
        for k in ks:
            assert entropy_dissipation(KruzhkovEntropy(f, k), f, um, up) <= 1e-12
    assert checked > 50


def test_floor_entropy_keeps_right_states_above_floor(cubic_quad):
    # Holds for left states in [floor, b_lo]; above b_lo the companion branch allows crossing.
    f = cubic_quad.flux
    floor = phi_tangent(f, 0.5)
    kr = KruzhkovEntropy(f, floor)
    rng = np.random.default_rng(4)
    hits = 0
    for um, up in rng.uniform(-2, 2, (3000, 2)):
        if floor <= um <= 0.5 and entropy_dissipation(kr, f, um, up) <= 1e-12:
            hits += 1
            assert up >= floor - 1e-12
    assert hits > 20
