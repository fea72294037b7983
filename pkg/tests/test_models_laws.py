import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from ccstab.errors import DomainError, ModelError
from ccstab.laws import entropy_dissipation, rel_entropy, rel_flux, rel_flux_f, shock_speed
from ccstab.models import KruzhkovEntropy, PolynomialFlux, QuadratureEntropy, build_models, parse_entropy, parse_flux

states = st.floats(-2.0, 2.0, allow_nan=False)


def test_shock_speed_examples(cubic_quad):
    f = cubic_quad.flux
    assert shock_speed(f, 1, 0) == pytest.approx(1)
    assert shock_speed(f, 1, 1) == pytest.approx(3)
    assert shock_speed(f, 1, -0.5) == pytest.approx(0.75)


def test_shock_speed_rejects_out_of_range(cubic_quad):
    with pytest.raises(DomainError):
        shock_speed(cubic_quad.flux, 2.5, 0)


def test_rel_entropy_examples(cubic_quad, cubic_exp):
    assert rel_entropy(cubic_quad.entropy, 2, 1) == pytest.approx(1)
    assert rel_entropy(cubic_quad.entropy, 0.3, 0.3) == 0
    assert rel_entropy(cubic_exp.entropy, 1, 0) == pytest.approx(math.e - 1)


def test_rel_flux_examples(cubic_quad):
    e, f = cubic_quad.entropy, cubic_quad.flux
    assert rel_flux(e, f, 1, 0) == pytest.approx(1.5)
    assert rel_flux(e, f, 0, 1) == pytest.approx(0.5)
    assert rel_flux(e, f, 0.7, 0.7) == 0
    assert rel_flux_f(f, 2, 1) == pytest.approx(4)
    assert rel_flux_f(f, 0, 1) == pytest.approx(2)


def test_dissipation_examples(cubic_quad):
    e, f = cubic_quad.entropy, cubic_quad.flux
    assert entropy_dissipation(e, f, 1, -1) == pytest.approx(0, abs=1e-14)
    assert entropy_dissipation(e, f, 0.4, 0.4) == 0
    assert entropy_dissipation(KruzhkovEntropy(f, -0.5), f, 1, -0.6) == pytest.approx(0.03)


@given(states, states)
def test_dissipation_matches_quadrature_oracle(um, up):
    m = build_models("cubic", "exp")
    if abs(um - up) < 1e-6:
        return
    expected = oracles.dissipation(oracles.eta_exp, oracles.deta_exp, oracles.f_cubic, oracles.df_cubic, um, up)
    assert entropy_dissipation(m.entropy, m.flux, um, up) == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("name", ["quadratic", "exp"])
@given(u=states, v=states)
def test_rel_entropy_is_quadratic(name, u, v):
    m = build_models("cubic", name)
    c_lo, c_hi = m.quadratic_constants()
    r = rel_entropy(m.entropy, u, v)
    d = (u - v) ** 2
    assert c_lo * d - 1e-12 <= r <= c_hi * d + 1e-12


@pytest.mark.parametrize("name", ["quadratic", "exp"])
def test_rel_flux_controlled_by_rel_entropy(name):
    m = build_models("cubic", name)
    rng = np.random.default_rng(1)
    u, v = rng.uniform(-2, 2, (2, 5000))
    keep = np.abs(u - v) > 1e-3
    ratio = np.abs(rel_flux(m.entropy, m.flux, u[keep], v[keep])) / rel_entropy(m.entropy, u[keep], v[keep])
    assert ratio.max() <= 3 * m.flux.max_speed


def test_dissipation_decreases_then_increases(cubic_exp):
    e, f = cubic_exp.entropy, cubic_exp.flux
    for um in (0.5, 1.0, 1.7):
        vs = np.linspace(-2, um, 2001)
        d = np.diff(entropy_dissipation(e, f, um, vs))
        tangent = -um / 2
        mid = 0.5 * (vs[1:] + vs[:-1])
        assert np.all(d[mid < tangent - 1e-3] <= 1e-12)
        assert np.all(d[(mid > tangent + 1e-3)] >= -1e-12)


@pytest.mark.parametrize("spec", ["cubic", "poly: 0, 0.5, 0, 1"])
def test_flux_derivatives_match_central_differences(spec):
    f = parse_flux(spec)
    u = np.linspace(-1.9, 1.9, 41)
    step = 1e-5
    for order in range(1, 4):
        fd = (f.derivative(u + step, order - 1) - f.derivative(u - step, order - 1)) / (2 * step)
        assert np.allclose(f.derivative(u, order), fd, rtol=1e-6, atol=1e-6)


@pytest.mark.parametrize("name", ["quadratic", "exp"])
def test_entropy_derivatives_and_flux(name):
    m = build_models("cubic", name)
    e, f = m.entropy, m.flux
    u = np.linspace(-1.9, 1.9, 41)
    step = 1e-5
    for order in range(1, 3):
        fd = (e.derivative(u + step, order - 1) - e.derivative(u - step, order - 1)) / (2 * step)
        assert np.allclose(e.derivative(u, order), fd, rtol=1e-6, atol=1e-6)
    dq = (e.flux(u + step) - e.flux(u - step)) / (2 * step)
    assert np.allclose(dq, e.derivative(u, 1) * f.derivative(u, 1), rtol=1e-6, atol=1e-6)
    assert e.flux(0.0) == pytest.approx(0.0, abs=1e-15)


def test_quadrature_entropy_matches_closed_form(cubic_exp):
    f = cubic_exp.flux
    quad_entropy = QuadratureEntropy(f, (lambda u: np.asarray(u) ** 2 + np.exp(u),
                                         lambda u: 2 * np.asarray(u) + np.exp(u),
                                         lambda u: 2 + np.exp(u), lambda u: np.exp(u)), name="exp-quad")
    for u in (-1.5, 0.2, 1.9):
        assert quad_entropy.flux(u) == pytest.approx(float(cubic_exp.entropy.flux(u)), abs=1e-9)


def test_non_concave_convex_flux_rejected():
    with pytest.raises(ModelError):
        PolynomialFlux((0, 0, 1))


def test_parsers():
    f = parse_flux("poly: 0,0,0,1")
    assert f(2.0) == pytest.approx(8)
    assert isinstance(parse_entropy("kruzhkov:0.3", f), KruzhkovEntropy)
    with pytest.raises((ModelError, ValueError)):
        parse_entropy("cosh", f)
