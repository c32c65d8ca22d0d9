"""Segal-Bargmann transform from the restriction map.

Lebesgue measure on the line is normalized to ``dx / sqrt(2 pi)``.  The
restriction ``R F(x) = exp(-x^2/2) F(x)`` from Fock space to ``L2`` has

    R* h(z) = ∫ h(x) exp(-x^2/2 + z x) dx,
    R R* = H_1,   sqrt(R R*) = H_{1/2},

where ``H_t h(y) = t^(-1/2) ∫ h(x) exp(-(y-x)^2 / 2t) dx`` is the heat
semigroup.  The unitary part of ``R* = B sqrt(R R*)`` is

    B h(z) = exp(z^2/2) (H_{1/2} h)(z) = sqrt(2) ∫ h(x) exp(-x^2 + 2 x z - z^2/2) dx.

Fock vectors are stored in the orthonormal basis ``z^k / sqrt(k!)``.  The
orthonormal Hermite functions used here are
``h_n(x) = H_n(sqrt(2) x) exp(-x^2) / sqrt(2^(n-1) n!)``; with this scaling
``B h_n = z^n / sqrt(n!)`` exactly.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial.hermite_e import hermegauss

from .errors import IllConditionedError, TruncationWarning
from .numerics import QuadratureRule, gauss_legendre

SQRT_2PI = math.sqrt(2.0 * math.pi)
DEFAULT_EXTENT = 12.0
DEFAULT_GRID_NODES = 400
HERMITE_NODES = 120
BOUNDARY_TOL = 1e-12


def line_rule(n: int = DEFAULT_GRID_NODES, extent: float = DEFAULT_EXTENT) -> QuadratureRule:
    return gauss_legendre(n, -extent, extent)


def _measure_weights(rule):
    return rule.weights / SQRT_2PI


def _sample(f, rule):
    return np.asarray(f(rule.nodes) if callable(f) else f, dtype=complex)


def l2_inner(rule, f, g) -> complex:
    """``∫ conj(f) g dx / sqrt(2 pi)``."""
    return complex(np.sum(np.conj(_sample(f, rule)) * _sample(g, rule) * _measure_weights(rule)))


def hermite_functions(n_max: int, x) -> np.ndarray:
    """Rows ``h_0..h_n_max`` evaluated at ``x`` by the stable three-term recursion."""
    x = np.asarray(x, dtype=float)
    u = math.sqrt(2.0) * x
    out = np.empty((n_max + 1,) + x.shape)
    # psi_n(u) = H_n(u) exp(-u^2/2) / sqrt(2^n n! sqrt(pi)); h_n(x) = sqrt(2 sqrt(pi)) psi_n(sqrt(2) x)
    out[0] = math.pi ** -0.25 * np.exp(-0.5 * u * u)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * u * out[0]
    for n in range(1, n_max):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * u * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out * math.sqrt(2.0 * math.sqrt(math.pi))


@dataclass(frozen=True)
class HermiteExpansion:
    """Coefficients in the orthonormal basis ``h_n`` of ``L2(R, dx / sqrt(2 pi))``."""

    coefficients: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coefficients", np.atleast_1d(np.asarray(self.coefficients, dtype=complex)))

    def __call__(self, x):
        return self.coefficients @ hermite_functions(self.coefficients.size - 1, x)

    def norm(self):
        return float(np.linalg.norm(self.coefficients))

    @classmethod
    def project(cls, f, n_max: int, rule: QuadratureRule | None = None):
        rule = rule or line_rule()
        h = hermite_functions(n_max, rule.nodes)
        return cls(h @ (_sample(f, rule) * _measure_weights(rule)))


@dataclass(frozen=True)
class FockVector:
    """Coefficients ``a_k`` of ``F(z) = sum_k a_k z^k / sqrt(k!)``."""

    coefficients: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coefficients", np.atleast_1d(np.asarray(self.coefficients, dtype=complex)))

    @property
    def degree(self):
        return self.coefficients.size - 1

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        total = np.zeros_like(z)
        term = np.ones_like(z)
        for k, a in enumerate(self.coefficients):
            if k:
                term = term * z / math.sqrt(k)
            total = total + a * term
        return total

    def norm(self):
        return float(np.linalg.norm(self.coefficients))


def fock_inner(F: FockVector, G: FockVector) -> complex:
    n = min(F.coefficients.size, G.coefficients.size)
    return complex(np.vdot(F.coefficients[:n], G.coefficients[:n]))


def fock_kernel(w: complex, degree: int) -> FockVector:
    """``K_w(z) = exp(z conj(w))``, so ``<K_w, F> = F(w)``."""
    k = np.arange(degree + 1)
    scale = np.exp(-0.5 * np.array([math.lgamma(j + 1) for j in k]))
    return FockVector(np.conj(w) ** k * scale)


def _check_boundary(values, label="function"):
    v = np.abs(values)
    peak = v.max(initial=0.0)
    if peak > 0 and max(v[0], v[-1]) > BOUNDARY_TOL * peak:
        warnings.warn(f"{label} has boundary mass {max(v[0], v[-1]) / peak:.2e} relative to its peak; "
                      "widen the grid", TruncationWarning, stacklevel=3)


def heat_convolve(t: float, f, rule: QuadratureRule | None = None, points=None,
                  n_hermite: int = HERMITE_NODES) -> np.ndarray:
    """``H_t f`` at ``points`` (default: the grid nodes).

    ``H_t f(y)`` is the expectation of ``f(y + sqrt(t) Z)`` for a standard
    normal ``Z``; it is evaluated with a Gauss-Hermite rule in ``Z``, reading
    ``f`` through its polynomial interpolant when only grid values are given.
    This keeps the computation accurate for small ``t``.
    """
    if not t > 0:
        raise ValueError("heat time must be positive")
    rule = rule or line_rule()
    y = rule.nodes if points is None else np.asarray(points, dtype=float)
    if callable(f):
        func = f
        _check_boundary(f(rule.nodes), "input")
    else:
        values = np.asarray(f, dtype=complex)
        _check_boundary(values, "input")

        def func(x):
            return rule.interpolate(values, x)

    z, w = hermegauss(n_hermite)
    w = w / SQRT_2PI
    shifted = y[..., None] + math.sqrt(t) * z
    return func(shifted.ravel()).reshape(shifted.shape) @ w


def heat_convolve_direct(t: float, f, rule: QuadratureRule | None = None, points=None) -> np.ndarray:
    """``H_t f`` by Gauss-Legendre quadrature over the grid; accepts complex points.

    Used for moderate ``t`` and for evaluation off the real axis.
    """
    if not t > 0:
        raise ValueError("heat time must be positive")
    rule = rule or line_rule()
    y = rule.nodes if points is None else np.asarray(points)
    vals = _sample(f, rule) * _measure_weights(rule)
    kern = np.exp(-np.subtract.outer(y, rule.nodes) ** 2 / (2.0 * t))
    return kern @ vals / math.sqrt(t)


def gaussian_heat_closed_form(t: float, y, width: float = 1.0):
    """``H_t`` applied to ``exp(-x^2 / (2 width))``."""
    v = width + t
    return math.sqrt(width / v) * np.exp(-np.asarray(y) ** 2 / (2.0 * v))


def restriction(F: FockVector, x) -> np.ndarray:
    """``R F(x) = exp(-x^2/2) sum_k a_k x^k / sqrt(k!)``."""
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x) * F(x.astype(complex))


def r_star(h, degree: int = 60, rule: QuadratureRule | None = None) -> FockVector:
    """Fock coefficients of ``R* h``: ``a_k = (1/sqrt(k!)) ∫ h(x) x^k exp(-x^2/2) dx``."""
    rule = rule or line_rule()
    x = rule.nodes
    vals = _sample(h, rule) * _measure_weights(rule) * np.exp(-0.5 * x * x)
    out = np.empty(degree + 1, dtype=complex)
    p = np.ones_like(x)
    for k in range(degree + 1):
        if k:
            p = p * x / math.sqrt(k)
        out[k] = np.sum(vals * p)
    return FockVector(out)


def rr_star(h, rule: QuadratureRule | None = None) -> np.ndarray:
    """``R R* h = H_1 h`` on the grid."""
    return heat_convolve(1.0, h, rule)


def sqrt_rr_star(h, rule: QuadratureRule | None = None) -> np.ndarray:
    """``sqrt(R R*) h = H_{1/2} h`` on the grid."""
    return heat_convolve(0.5, h, rule)


def _bargmann_kernel(h, degree, rule):
    # exp(2 x z - z^2/2) = sum_n c_n(x) z^n with (n+1) c_{n+1} = 2 x c_n - c_{n-1}
    x = rule.nodes
    vals = _sample(h, rule) * _measure_weights(rule) * np.exp(-x * x) * math.sqrt(2.0)
    out = np.empty(degree + 1, dtype=complex)
    c_prev, c = np.zeros_like(x), np.ones_like(x)
    for n in range(degree + 1):
        out[n] = np.sum(vals * c) * math.exp(0.5 * math.lgamma(n + 1))
        c_prev, c = c, (2.0 * x * c - c_prev) / (n + 1)
    return out


def _amplification(radius, degree):
    """Log of the roundoff amplification when reading coefficient ``n <= degree`` off ``|z| = radius``.

    ``|B h(z)| <= ||h|| exp(|z|^2 / 2)`` bounds the samples, and the
    coefficient of ``z^n / sqrt(n!)`` is divided by ``radius^n / sqrt(n!)``.
    """
    return 0.5 * radius ** 2 + max(0.5 * math.lgamma(n + 1) - n * math.log(radius) for n in range(degree + 1))


def _bargmann_composition(h, degree, rule, radius=None, n_points=256):
    # B h(z) = exp(z^2/2) (H_{1/2} h)(z) sampled on a circle, Taylor coefficients by FFT
    if radius is None:
        radii = np.linspace(0.5, max(1.0, math.sqrt(degree + 1)), 60)
        radius = float(min(radii, key=lambda r: _amplification(r, degree)))
    log_amp = _amplification(radius, degree)
    if log_amp + math.log(np.finfo(float).eps) > math.log(1e-8):
        raise IllConditionedError(
            f"Taylor extraction to degree {degree} on radius {radius:g} amplifies roundoff beyond 1e-8")
    z = radius * np.exp(2j * np.pi * np.arange(n_points) / n_points)
    vals = np.exp(0.5 * z * z) * heat_convolve_direct(0.5, h, rule, z)
    coeffs = np.fft.fft(vals)[: degree + 1] / n_points
    n = np.arange(degree + 1)
    scale = np.exp(0.5 * np.array([math.lgamma(k + 1) for k in n]) - n * math.log(radius))
    return coeffs * scale


def bargmann_transform(h, degree: int = 40, rule: QuadratureRule | None = None,
                       method: str = "kernel") -> FockVector:
    """Fock coefficients of ``B h``.

    ``method="kernel"`` integrates ``h`` against the Taylor coefficients of
    the integral kernel.  ``method="composition"`` evaluates
    ``exp(z^2/2) H_{1/2} h(z)`` at complex points and extracts the Taylor
    series with an FFT.
    """
    rule = rule or line_rule()
    if method == "kernel":
        return FockVector(_bargmann_kernel(h, degree, rule))
    if method == "composition":
        return FockVector(_bargmann_composition(h, degree, rule))
    raise ValueError(f"unknown method {method!r}")


def scaling_constant(rule: QuadratureRule | None = None) -> complex:
    """Global constant ``<z^0, B h_0>`` fixing the overall normalization of ``B``."""
    rule = rule or line_rule()
    h0 = hermite_functions(0, rule.nodes)[0]
    return complex(bargmann_transform(h0, 0, rule).coefficients[0])
