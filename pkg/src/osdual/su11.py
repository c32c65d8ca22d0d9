"""Complementary series of SL(2, R) and its reflection-positive dual.

For ``0 < s < 1`` the group acts on functions of one real variable by

    pi_s(g) f(t) = |d - b t|^(-s-1) f((-c + a t) / (d - b t)),   g = [[a, b], [c, d]],

and ``J f(t) = |t|^(-s-1) f(1/t)``.  On functions supported in ``(-1, 1)`` the
form ``<f, J g>`` becomes

    <f, g>_J = (1/pi^2) ∫∫ conj(f(x)) g(y) (1 - x y)^(s-1) dx dy,

which is positive definite.  ``U f(z) = (1/pi) ∫ f(u) (1 - z u)^(s-1) du`` maps
the completed space isometrically onto the reproducing kernel space ``H(s)``
of holomorphic functions on the unit disc with kernel ``(1 - z conj(w))^(s-1)``.
The derivatives of the delta function at 0 form an orthogonal basis there and
diagonalize the dilation semigroup with eigenvalues ``2n + 1 - s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import integrate
from scipy.special import roots_jacobi

from .errors import DomainEscapeError, SingularDenominatorError, SupportViolation
from .numerics import QuadratureRule, gauss_legendre, log_gamma_ratio
from .os_core import OsSystem, mode_system

DEFAULT_SUPPORT = 0.9
DEFAULT_NODES = 200


def check_s(s):
    if not 0 < s < 1:
        raise ValueError(f"s must lie in (0, 1), got {s}")
    return float(s)


def binomials(s: float, n_max: int) -> np.ndarray:
    """``binom(s - 1, n)`` for ``n = 0..n_max`` by the ratio recursion."""
    b = np.empty(n_max + 1)
    b[0] = 1.0
    for n in range(1, n_max + 1):
        b[n] = b[n - 1] * (s - n) / n
    return b


def abs_binomials(s: float, n_max: int) -> np.ndarray:
    """``|binom(s - 1, n)| = (1 - s)_n / n!``; strictly positive for ``0 < s < 1``."""
    return np.abs(binomials(s, n_max))


# --------------------------------------------------------------------------
# Function models


@dataclass(frozen=True)
class GridFunction:
    """Values of a function at the nodes of a Gauss-Legendre rule.

    The function is taken to vanish outside ``rule.interval``; between nodes
    it is the polynomial interpolant.
    """

    rule: QuadratureRule
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.rule.nodes.shape or not np.all(np.isfinite(v)):
            raise ValueError("values must be finite, one per node")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, func: Callable, rule: QuadratureRule | None = None):
        rule = rule or default_rule()
        return cls(rule, func(rule.nodes))

    @property
    def support(self):
        return self.rule.interval

    def __call__(self, x):
        return self.rule.interpolate(self.values, x)

    def inside_unit_interval(self):
        lo, hi = self.support
        return -1.0 < lo and hi < 1.0

    def moments(self, degree: int) -> np.ndarray:
        """``∫ f(u) u^n du`` for ``n = 0..degree``."""
        x = self.rule.nodes
        powers = np.vander(x, degree + 1, increasing=True)
        return (self.rule.weights * self.values) @ powers


def default_rule(n: int = DEFAULT_NODES, support: float = DEFAULT_SUPPORT) -> QuadratureRule:
    return gauss_legendre(n, -support, support)


@dataclass(frozen=True)
class DistributionVector:
    """``sum_n c_n delta^(n)`` with ``<f, delta^(n)> = (-1)^n f^(n)(0)``."""

    coefficients: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coefficients", np.atleast_1d(np.asarray(self.coefficients, dtype=complex)))

    @property
    def n_max(self):
        return self.coefficients.size - 1

    @classmethod
    def delta(cls, n: int, n_max: int | None = None):
        c = np.zeros((n if n_max is None else n_max) + 1, dtype=complex)
        c[n] = 1.0
        return cls(c)


@dataclass(frozen=True)
class HolomorphicVector:
    """Taylor coefficients of a holomorphic function on the unit disc."""

    s: float
    taylor: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "taylor", np.atleast_1d(np.asarray(self.taylor, dtype=complex)))

    @property
    def degree(self):
        return self.taylor.size - 1

    def __call__(self, z):
        return P.polyval(np.asarray(z, dtype=complex), self.taylor)

    def norm(self):
        return math.sqrt(rkhs_inner(self.s, self, self).real)


# --------------------------------------------------------------------------
# Group action


def _unpack(g):
    g = np.asarray(g, dtype=float)
    if g.shape != (2, 2):
        raise ValueError("g must be a 2x2 matrix")
    if abs(np.linalg.det(g) - 1.0) > 1e-10:
        raise ValueError("g must have determinant 1")
    return g.ravel()


def pi_s(s: float, g, func: Callable) -> Callable:
    """The action on plain callables, composed exactly (no resampling)."""
    a, b, c, d = _unpack(g)

    def image(t):
        t = np.asarray(t, dtype=float)
        den = d - b * t
        if np.any(den == 0):
            raise SingularDenominatorError("d - b t vanishes at an evaluation point")
        return np.abs(den) ** (-s - 1) * func((-c + a * t) / den)

    return image


def pi_s_action(s: float, g, f: GridFunction) -> GridFunction:
    """Apply ``pi_s(g)`` to a grid function.

    The support ``[lo, hi]`` moves to its image under ``u -> (d u + c)/(b u + a)``;
    the result is sampled on a rule of the same size over that interval.

    Raises
    ------
    SingularDenominatorError
        If ``b u + a`` fails to stay positive on the support, i.e. ``d - b t``
        vanishes on the image.
    """
    s = check_s(s)
    a, b, c, d = _unpack(g)
    lo, hi = f.support
    u = np.linspace(lo, hi, 65)
    if np.any(b * u + a <= 0):
        raise SingularDenominatorError("d - b t vanishes on the image of the support")
    new_lo, new_hi = (d * lo + c) / (b * lo + a), (d * hi + c) / (b * hi + a)
    rule = gauss_legendre(len(f.rule), new_lo, new_hi)
    return GridFunction(rule, pi_s(s, g, f)(rule.nodes))


def dilation(t: float):
    return np.diag([math.exp(t), math.exp(-t)])


def hyperbolic(t: float):
    """``h_t = [[cosh t, sinh t], [sinh t, cosh t]]``."""
    ch, sh = math.cosh(t), math.sinh(t)
    return np.array([[ch, sh], [sh, ch]])


def j_involution(s: float, func: Callable) -> Callable:
    """``J f(t) = |t|^(-s-1) f(1/t)``; undefined at ``t = 0``."""

    def reflected(t):
        t = np.asarray(t, dtype=float)
        if np.any(t == 0):
            raise ValueError("J f is undefined at t = 0")
        return np.abs(t) ** (-s - 1) * func(1.0 / t)

    return reflected


# --------------------------------------------------------------------------
# Forms


def j_kernel(s, x, y):
    return (1.0 - np.multiply.outer(x, y)) ** (s - 1)


def j_form(s: float, f: GridFunction, g: GridFunction) -> complex:
    """``(1/pi^2) ∫∫ conj(f(x)) g(y) (1 - x y)^(s-1) dx dy`` by tensor quadrature."""
    s = check_s(s)
    for h in (f, g):
        if not h.inside_unit_interval():
            raise SupportViolation("j_form needs functions supported inside (-1, 1)")
    k = j_kernel(s, f.rule.nodes, g.rule.nodes)
    left = np.conj(f.values) * f.rule.weights
    right = g.values * g.rule.weights
    return complex(left @ k @ right / math.pi ** 2)


def j_gram_matrix(s: float, rule: QuadratureRule) -> np.ndarray:
    """Discretized ``J``-form on nodal values: ``W K W / pi^2``."""
    w = rule.weights
    return w[:, None] * j_kernel(s, rule.nodes, rule.nodes) * w[None, :] / math.pi ** 2


def j_form_series(s: float, moments_f, moments_g) -> complex:
    """The same form from moments via ``(1 - x y)^(s-1) = sum_k binom(s-1, k) (-x y)^k``."""
    n = min(len(moments_f), len(moments_g))
    b = binomials(s, n - 1) * (-1.0) ** np.arange(n)
    return complex(np.sum(np.conj(moments_f[:n]) * b * moments_g[:n]) / math.pi ** 2)


def interval_moments(lo: float, hi: float, degree: int) -> np.ndarray:
    k = np.arange(degree + 1)
    return (hi ** (k + 1) - lo ** (k + 1)) / (k + 1)


def sup_norm_constant(s: float, rule: QuadratureRule) -> float:
    """A constant with ``||phi||_J <= C sup|phi|`` for ``phi`` supported in the rule's interval."""
    k = np.abs(j_kernel(s, rule.nodes, rule.nodes))
    return math.sqrt(rule.weights @ k @ rule.weights) / math.pi


def full_line_norm_sq(s: float, func: Callable, lo: float, hi: float, n_inner: int = 40) -> float:
    """``∫∫ conj(f(x)) f(y) |x - y|^(s-1) dx dy`` for ``f`` supported on ``[lo, hi]``.

    The weakly singular diagonal is handled by splitting the inner integral
    at ``y = x`` and using Gauss-Jacobi rules with weight ``|x - y|^(s-1)``.
    Intended as a reference computation for the isometry of ``J``.
    """
    t, w = roots_jacobi(n_inner, 0.0, s - 1.0)  # weight (1 + t)^(s-1) on [-1, 1]

    def inner(x):
        total = 0.0
        for length, sign in ((x - lo, -1.0), (hi - x, 1.0)):
            if length <= 0:
                continue
            dist = 0.5 * length * (1.0 + t)
            total += (0.5 * length) ** s * np.sum(w * func(x + sign * dist))
        return np.conj(func(np.array([x]))[0]) * total

    val, _ = integrate.quad(lambda x: np.real(inner(x)), lo, hi, limit=200, epsabs=1e-13, epsrel=1e-12)
    return float(val)


# --------------------------------------------------------------------------
# Delta basis


def delta_norms_sq(s: float, n_max: int) -> np.ndarray:
    """``n! (1-s)(2-s)...(n-s) / pi^2`` evaluated in the log domain."""
    s = check_s(s)
    out = np.empty(n_max + 1)
    for n in range(n_max + 1):
        poch = log_gamma_ratio(1.0 - s, n)
        out[n] = math.exp(math.lgamma(n + 1) + poch.log_abs) / math.pi ** 2
    return out


def kernel_taylor(s: float, n_max: int) -> np.ndarray:
    """Coefficient of ``x^m y^n`` in ``(1 - x y)^(s-1)``: diagonal, ``binom(s-1, n)(-1)^n``."""
    c = np.zeros((n_max + 1, n_max + 1))
    np.fill_diagonal(c, binomials(s, n_max) * (-1.0) ** np.arange(n_max + 1))
    return c


def delta_gram(s: float, n_max: int) -> np.ndarray:
    """Gram matrix of ``delta, delta', ..., delta^(n_max)`` in the ``J``-form.

    Pairing ``<delta^(m), delta^(n)>_J`` differentiates the kernel ``m`` times
    in ``x`` and ``n`` times in ``y`` at the origin, with sign
    ``(-1)^(m+n)``; the Taylor coefficients of the kernel give the
    derivatives exactly.
    """
    s = check_s(s)
    n = np.arange(n_max + 1)
    fact = np.array([math.factorial(k) for k in n], dtype=float)
    deriv = kernel_taylor(s, n_max) * np.outer(fact, fact)
    signs = (-1.0) ** np.add.outer(n, n)
    return signs * deriv / math.pi ** 2


def delta_os_system(s: float, n_max: int, mu: float = 2.0) -> OsSystem:
    """Finite model on ``span{delta^(n)} ⊕ J span{delta^(n)}``.

    The dilation semigroup scales ``delta^(n)`` by ``exp(-(2n+1-s) t)``.
    """
    return mode_system(delta_gram(s, n_max), dilation_spectrum(s, n_max), mu=mu)


def dilation_spectrum(s: float, n_max: int) -> np.ndarray:
    """Eigenvalues ``2n + 1 - s`` of the generator of the induced dilation semigroup.

    ``U(t) f(x) = exp((s+1) t) f(exp(2t) x)`` and
    ``delta^(n)(a x) = a^(-(n+1)) delta^(n)(x)`` give
    ``U(t) delta^(n) = exp(((s+1) - 2(n+1)) t) delta^(n)``.
    """
    s = check_s(s)
    n = np.arange(n_max + 1)
    return -((s + 1.0) - 2.0 * (n + 1.0))


# --------------------------------------------------------------------------
# Holomorphic model


def auto_degree(radius: float, tol: float = 1e-17, floor: int = 40, cap: int = 4000) -> int:
    """Degree where ``radius^(2n)`` drops below ``tol``."""
    if radius <= 0:
        return floor
    n = math.ceil(math.log(tol) / (2.0 * math.log(radius))) if radius < 1 else cap
    return int(min(max(n, floor), cap))


def intertwiner_u(s: float, f, degree: int | None = None) -> HolomorphicVector:
    """Taylor coefficients of ``U f(z) = (1/pi) ∫ f(u) (1 - z u)^(s-1) du``.

    ``f`` may be a :class:`GridFunction` (moments by quadrature) or a
    :class:`DistributionVector`, for which ``∫ delta^(n)(u) u^n du = (-1)^n n!``.
    """
    s = check_s(s)
    if isinstance(f, DistributionVector):
        n = np.arange(f.n_max + 1)
        fact = np.array([math.factorial(k) for k in n], dtype=float)
        taylor = binomials(s, f.n_max) * fact * f.coefficients / math.pi
        if degree is not None:
            taylor = np.pad(taylor, (0, max(0, degree + 1 - taylor.size)))[: degree + 1]
        return HolomorphicVector(s, taylor)
    if degree is None:
        degree = auto_degree(max(abs(f.support[0]), abs(f.support[1])))
    n = np.arange(degree + 1)
    taylor = binomials(s, degree) * (-1.0) ** n * f.moments(degree) / math.pi
    return HolomorphicVector(s, taylor)


def rkhs_inner(s: float, F: HolomorphicVector, G: HolomorphicVector) -> complex:
    """``sum_n conj(F_n) G_n / |binom(s-1, n)|`` over the common degrees."""
    n = min(F.taylor.size, G.taylor.size)
    w = abs_binomials(check_s(s), n - 1)
    return complex(np.sum(np.conj(F.taylor[:n]) * G.taylor[:n] / w))


def kernel_vector(s: float, w: complex, degree: int) -> HolomorphicVector:
    """``u_w(z) = (1 - conj(w) z)^(s-1)``, so that ``<u_w, F> = F(w)``."""
    n = np.arange(degree + 1)
    return HolomorphicVector(s, abs_binomials(s, degree) * np.conj(w) ** n)


def rho_s_action(s: float, g, F: HolomorphicVector, radius: float = 0.9, n_points: int = 1024,
                 degree: int | None = None) -> HolomorphicVector:
    """``(a - c z)^(s-1) F((d z - b) / (a - c z))`` re-expanded in Taylor coefficients.

    The function is sampled on the circle ``|z| = radius`` and the
    coefficients are read off with an FFT.

    Raises
    ------
    DomainEscapeError
        If a sample point maps outside the unit disc or ``a - c z`` leaves the
        right half plane, where the principal power is used.
    """
    s = check_s(s)
    a, b, c, d = _unpack(g)
    z = radius * np.exp(2j * np.pi * np.arange(n_points) / n_points)
    den = a - c * z
    w = (d * z - b) / den
    if np.any(den.real <= 0) or np.any(np.abs(w) >= 1):
        raise DomainEscapeError("Mobius image of the sample circle leaves the unit disc")
    vals = den ** (s - 1) * F(w)
    coeffs = np.fft.fft(vals) / n_points
    degree = min(F.degree, n_points // 2 - 1) if degree is None else degree
    n = np.arange(degree + 1)
    return HolomorphicVector(s, coeffs[: degree + 1] / radius ** n)
