"""Flux and entropy models.

Every model evaluates on scalars or numpy arrays. Fluxes are polynomials
with a single inflection point at the origin; entropies are strictly
convex and carry their entropy flux, normalised so that ``q(0) = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import integrate

from .errors import DomainError, ModelError

_SAMPLE_POINTS = 401


def _polyval(u, coeffs, coeff_tuple):
    # numpy's polyval costs microseconds per scalar call; root finders call this a lot
    if isinstance(u, (float, int)):
        acc = 0.0
        for c in reversed(coeff_tuple):
            acc = acc * u + c
        return acc
    return P.polyval(u, coeffs)


def check_states(bound, *states):
    """Raise ``DomainError`` unless every state lies in ``[-bound, bound]``."""
    limit = bound * (1.0 + 1e-12)
    for s in states:
        if isinstance(s, (float, int)):
            if not -limit <= s <= limit:
                raise DomainError(f"state outside [-{bound}, {bound}]: {s}")
            continue
        arr = np.asarray(s, dtype=float)
        if arr.size and (not np.all(np.isfinite(arr)) or np.max(np.abs(arr)) > limit):
            raise DomainError(f"state outside [-{bound}, {bound}]: {s}")


@dataclass(frozen=True)
class PolynomialFlux:
    """Concave-convex polynomial flux on the state interval ``[-bound, bound]``.

    Parameters
    ----------
    coefficients : tuple of float
        Power-series coefficients ``c0 + c1 u + c2 u**2 + ...``.
    bound : float
        Half-width ``M`` of the state interval.
    name : str
        Tag used in reports and manifests.
    """

    coefficients: tuple
    bound: float = 2.0
    name: str = "poly"
    _derivs: tuple = field(init=False, repr=False, compare=False)
    _deriv_tuples: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        coeffs = np.trim_zeros(np.asarray(self.coefficients, dtype=float), "b")
        if coeffs.size < 4:
            raise ModelError("a concave-convex flux needs degree at least 3")
        if not self.bound > 0:
            raise ModelError("state bound must be positive")
        derivs = [coeffs]
        for _ in range(5):
            derivs.append(P.polyder(derivs[-1]) if derivs[-1].size > 1 else np.zeros(1))
        object.__setattr__(self, "coefficients", tuple(float(c) for c in coeffs))
        object.__setattr__(self, "_derivs", tuple(derivs))
        object.__setattr__(self, "_deriv_tuples", tuple(tuple(float(c) for c in d) for d in derivs))
        self._validate()

    def _validate(self):
        u = np.linspace(-self.bound, self.bound, _SAMPLE_POINTS)
        u = u[np.abs(u) > 1e-9]
        if np.any(u * self.derivative(u, 2) <= 0):
            raise ModelError("flux is not concave-convex: u f''(u) > 0 fails")
        if abs(self.derivative(0.0, 2)) > 1e-12:
            raise ModelError("flux inflection point is not at the origin")
        if self.derivative(0.0, 3) == 0:
            raise ModelError("flux third derivative vanishes at the origin")

    def __call__(self, u):
        return self.derivative(u, 0)

    def derivative(self, u, order=0):
        """Derivative of the given order (0 to 4) at ``u``."""
        if order not in range(5):
            raise ValueError("derivative order must be in 0..4")
        return _polyval(u, self._derivs[order], self._deriv_tuples[order])

    def characteristic_speed(self, u):
        return self.derivative(u, 1)

    def critical_points(self):
        """Real roots of f' (sorted)."""
        roots = P.polyroots(self._derivs[1]) if self._derivs[1].size > 1 else np.array([])
        real = np.real(roots[np.abs(np.imag(roots)) < 1e-12])
        return np.sort(real)

    def divided_difference2(self, x0, x1, x2):
        """Second divided difference ``f[x0, x1, x2]``, exact for coincident nodes.

        Uses complete homogeneous symmetric polynomials, so there is no
        cancellation when nodes merge.
        """
        x0, x1, x2 = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (x0, x1, x2)))
        total = np.zeros(x0.shape)
        h3 = np.ones(x0.shape)  # h_m(x0, x1, x2)
        h2 = np.ones(x0.shape)  # h_m(x1, x2)
        for n, c in enumerate(self.coefficients[2:], start=2):
            m = n - 2
            if m > 0:
                h2 = x2 ** m + x1 * h2
                h3 = h2 + x0 * h3
            total = total + c * h3
        return total if total.ndim else float(total)

    @property
    def max_speed(self):
        """``sup |f'|`` over the state interval (evaluated on endpoints and critical points)."""
        pts = np.concatenate(([-self.bound, self.bound], self._second_critical_points()))
        return float(np.max(np.abs(self.derivative(pts, 1))))

    def _second_critical_points(self):
        roots = P.polyroots(self._derivs[2]) if self._derivs[2].size > 1 else np.array([])
        real = np.real(roots[np.abs(np.imag(roots)) < 1e-12])
        return real[np.abs(real) <= self.bound]


def cubic_flux(bound=2.0):
    """The model flux ``f(u) = u**3``."""
    return PolynomialFlux((0.0, 0.0, 0.0, 1.0), bound=bound, name="cubic")


class Entropy:
    """Interface shared by convex entropies: ``derivative(u, order)`` and ``flux(u)``."""

    flux_model: PolynomialFlux
    name: str

    def __call__(self, u):
        return self.derivative(u, 0)

    def derivative(self, u, order=0):
        raise NotImplementedError

    def flux(self, u):
        raise NotImplementedError

    def _validate(self):
        m = self.flux_model.bound
        u = np.linspace(-m, m, _SAMPLE_POINTS)
        if np.any(self.derivative(u, 2) <= 0):
            raise ModelError(f"entropy {self.name} is not strictly convex on [-{m}, {m}]")


class PolyExpEntropy(Entropy):
    """Entropy ``P(u) + beta * exp(u)`` with a closed-form entropy flux.

    For a polynomial flux the flux integral ``int_0^u eta' f'`` is
    elementary: the polynomial part integrates termwise and
    ``int e^s g(s) ds = e^s sum_k (-1)^k g^(k)(s)`` for polynomial ``g``.
    """

    def __init__(self, flux_model, poly=(0.0, 0.0, 1.0), beta=0.0, name="quadratic"):
        self.flux_model = flux_model
        self.name = name
        self.beta = float(beta)
        self._poly = [np.asarray(poly, dtype=float)]
        for _ in range(4):
            prev = self._poly[-1]
            self._poly.append(P.polyder(prev) if prev.size > 1 else np.zeros(1))
        fprime = np.asarray(flux_model._derivs[1])
        self._q_poly = P.polyint(P.polymul(self._poly[1], fprime))
        # e^u * sum_k (-1)^k g^(k)(u) with g = f'
        series = np.zeros(1)
        g = fprime
        sign = 1.0
        while g.size and np.any(g != 0):
            series = P.polyadd(series, sign * g)
            g = P.polyder(g) if g.size > 1 else np.zeros(0)
            sign = -sign
        self._q_exp = series
        self._q_exp_at_zero = float(P.polyval(0.0, series))
        self._poly_tuples = [tuple(float(c) for c in p) for p in self._poly]
        self._q_poly_tuple = tuple(float(c) for c in self._q_poly)
        self._q_exp_tuple = tuple(float(c) for c in series)
        self._validate()

    def derivative(self, u, order=0):
        if order not in range(4):
            raise ValueError("entropy derivative order must be in 0..3")
        val = _polyval(u, self._poly[order], self._poly_tuples[order])
        if self.beta:
            val = val + self.beta * (math.exp(u) if isinstance(u, (float, int)) else np.exp(u))
        return val

    def flux(self, u):
        q = _polyval(u, self._q_poly, self._q_poly_tuple)
        if self.beta:
            e = math.exp(u) if isinstance(u, (float, int)) else np.exp(u)
            q = q + self.beta * (e * _polyval(u, self._q_exp, self._q_exp_tuple) - self._q_exp_at_zero)
        return q


def quadratic_entropy(flux_model):
    """``eta(u) = u**2``."""
    return PolyExpEntropy(flux_model, (0.0, 0.0, 1.0), 0.0, name="quadratic")


def exp_entropy(flux_model):
    """``eta(u) = u**2 + exp(u)``."""
    return PolyExpEntropy(flux_model, (0.0, 0.0, 1.0), 1.0, name="exp")


class QuadratureEntropy(Entropy):
    """Entropy given by derivative callables; its flux is integrated numerically from 0.

    Parameters
    ----------
    derivatives : sequence of callable
        ``[eta, eta', eta'', eta''']``, each vectorised over numpy arrays.
    """

    def __init__(self, flux_model, derivatives, name="custom", abs_tol=1e-10):
        if len(derivatives) != 4:
            raise ModelError("need eta and its first three derivatives")
        self.flux_model = flux_model
        self.name = name
        self._derivatives = tuple(derivatives)
        self.abs_tol = abs_tol
        self._validate()

    def derivative(self, u, order=0):
        if order not in range(4):
            raise ValueError("entropy derivative order must be in 0..3")
        return self._derivatives[order](np.asarray(u, dtype=float))

    def flux(self, u):
        integrand = lambda s: float(self._derivatives[1](s) * self.flux_model.derivative(s, 1))
        arr = np.asarray(u, dtype=float)
        out = np.array([integrate.quad(integrand, 0.0, float(x), epsabs=self.abs_tol, epsrel=0.0)[0]
                        for x in arr.ravel()]).reshape(arr.shape)
        return out if out.ndim else float(out)


class KruzhkovEntropy(Entropy):
    """``eta_k(u) = |u - k|`` with flux ``sgn(u - k)(f(u) - f(k))``."""

    def __init__(self, flux_model, k):
        self.flux_model = flux_model
        self.k = float(k)
        self.name = f"kruzhkov:{self.k!r}"

    def derivative(self, u, order=0):
        if isinstance(u, (float, int)) and order in (0, 1):
            d = u - self.k
            return abs(d) if order == 0 else float(np.sign(d))
        d = np.asarray(u, dtype=float) - self.k
        if order == 0:
            return np.abs(d)
        if order == 1:
            return np.sign(d)
        raise ValueError("Kruzhkov entropies are only Lipschitz")

    def flux(self, u):
        f = self.flux_model
        if isinstance(u, (float, int)):
            return math.copysign(1.0, u - self.k) * (f(u) - f(self.k)) if u != self.k else 0.0
        return np.sign(np.asarray(u, dtype=float) - self.k) * (f(u) - f(self.k))


@dataclass(frozen=True)
class Models:
    """A flux together with the entropy used for dissipation computations."""

    flux: PolynomialFlux
    entropy: Entropy

    @property
    def bound(self):
        return self.flux.bound

    def quadratic_constants(self):
        """``(c_lo, c_hi)`` with ``c_lo |u-v|^2 <= eta(u|v) <= c_hi |u-v|^2`` on ``[-M, M]``."""
        m = self.bound
        second = self.entropy.derivative(np.linspace(-m, m, 2001), 2)
        return 0.5 * float(second.min()), 0.5 * float(second.max())


def parse_flux(spec, bound=2.0):
    """Build a flux from ``"cubic"`` or ``"poly: c0,c1,..."``."""
    text = spec.strip()
    if text == "cubic":
        return cubic_flux(bound)
    if text.startswith("poly:"):
        try:
            coeffs = tuple(float(c) for c in text[5:].split(","))
        except ValueError as exc:
            raise ModelError(f"malformed polynomial coefficients: {text}") from exc
        return PolynomialFlux(coeffs, bound=bound, name=text.replace(" ", ""))
    raise ModelError(f"unknown flux: {spec}")


def parse_entropy(spec, flux_model):
    """Build an entropy from ``"quadratic"``, ``"exp"`` or ``"kruzhkov:<k>"``."""
    text = spec.strip()
    if text == "quadratic":
        return quadratic_entropy(flux_model)
    if text == "exp":
        return exp_entropy(flux_model)
    if text.startswith("kruzhkov:"):
        try:
            k = float(text.split(":", 1)[1])
        except ValueError as exc:
            raise ModelError(f"malformed Kruzhkov level: {text}") from exc
        return KruzhkovEntropy(flux_model, k)
    raise ModelError(f"unknown entropy: {spec}")


def build_models(flux="cubic", entropy="quadratic", bound=2.0):
    f = parse_flux(flux, bound)
    return Models(f, parse_entropy(entropy, f))

