"""Quadrature, Hermitian eigensolves, PSD certification and Pochhammer symbols.

Everything here is plain float64 numpy; no arbitrary precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gammaln, gammasgn

DEFAULT_PSD_TOL = 1e-10
DEFAULT_NODES = 200


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-type rule on ``[lo, hi]`` with strictly increasing interior nodes."""

    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple[float, float]
    degree: int = -1  # polynomial exactness degree, -1 if not advertised

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        lo, hi = self.interval
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise ValueError("nodes and weights must be 1-D arrays of equal length")
        if np.any(weights <= 0):
            raise ValueError("quadrature weights must be positive")
        if np.any(np.diff(nodes) <= 0) or nodes[0] <= lo or nodes[-1] >= hi:
            raise ValueError("nodes must be strictly increasing inside the interval")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.nodes.size

    def integrate(self, values):
        """Apply the rule to sampled values (last axis runs over nodes)."""
        return np.asarray(values) @ self.weights

    def standard_nodes(self):
        lo, hi = self.interval
        return (2.0 * self.nodes - (lo + hi)) / (hi - lo)

    def barycentric_weights(self):
        """Barycentric interpolation weights for Gauss-Legendre nodes.

        For Legendre points the weights are ``(-1)^j sqrt((1 - t_j^2) w_j)``
        with ``t_j, w_j`` the standard nodes and weights on ``[-1, 1]``.
        """
        lo, hi = self.interval
        t = self.standard_nodes()
        w_std = self.weights * 2.0 / (hi - lo)
        signs = np.where(np.arange(t.size) % 2 == 0, 1.0, -1.0)
        return signs * np.sqrt((1.0 - t * t) * w_std)

    def interpolate(self, values, x):
        """Polynomial interpolant of ``values`` evaluated at ``x``.

        Points outside the closed interval evaluate to zero, which is the
        convention for compactly supported grid functions.
        """
        x = np.asarray(x, dtype=complex if np.iscomplexobj(x) else float)
        values = np.asarray(values)
        bw = self.barycentric_weights()
        flat = np.atleast_1d(x).ravel()
        diff = flat[:, None] - self.nodes[None, :]
        exact = diff == 0
        diff = np.where(exact, 1.0, diff)
        terms = bw[None, :] / diff
        out = (terms @ values) / terms.sum(axis=1)
        hit_rows, hit_cols = np.nonzero(exact)
        out = np.asarray(out, dtype=np.result_type(out, values))
        out[hit_rows] = values[hit_cols]
        if not np.iscomplexobj(x):
            lo, hi = self.interval
            out = np.where((flat < lo) | (flat > hi), 0.0, out)
        return out.reshape(np.shape(x))


def gauss_legendre(n: int, lo: float = -1.0, hi: float = 1.0) -> QuadratureRule:
    """Gauss-Legendre rule with ``n`` nodes, exact to degree ``2n - 1``."""
    if int(n) != n or n < 1:
        raise ValueError(f"need at least one node, got n={n}")
    if not lo < hi:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    t, w = leggauss(int(n))
    half = 0.5 * (hi - lo)
    return QuadratureRule(half * t + 0.5 * (hi + lo), half * w, (float(lo), float(hi)), 2 * int(n) - 1)


def hermitian_residual(m) -> float:
    m = np.asarray(m)
    return float(np.linalg.norm(m - m.conj().T))


def hermitize(m, rtol: float = 1e-12):
    """Return the Hermitian part of ``m`` after checking it is already Hermitian."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = np.linalg.norm(m)
    if hermitian_residual(m) > rtol * max(scale, np.finfo(float).tiny):
        raise ValueError("matrix is not Hermitian")
    return 0.5 * (m + m.conj().T)


def eigendecompose_hermitian(m):
    """Ascending eigenvalues and orthonormal eigenvectors of a Hermitian matrix.

    Raises
    ------
    ValueError
        If the symmetry residual exceeds ``1e-12 * ||m||_F``.
    """
    return np.linalg.eigh(hermitize(m))


@dataclass(frozen=True)
class PsdReport:
    min_eigenvalue: float
    max_eigenvalue: float
    is_psd: bool
    tolerance: float
    min_eigenvector: np.ndarray | None = None


def certify_psd(m, tolerance: float = DEFAULT_PSD_TOL) -> PsdReport:
    """Decide positive semidefiniteness up to a relative roundoff allowance.

    The matrix counts as PSD when its smallest eigenvalue is at least
    ``-tolerance * max(1, lambda_max)``.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    evals, evecs = eigendecompose_hermitian(m)
    lo, hi = float(evals[0]), float(evals[-1])
    return PsdReport(lo, hi, lo >= -tolerance * max(1.0, hi), tolerance, evecs[:, 0])


class PochhammerLog(NamedTuple):
    log_abs: float
    sign: int

    @property
    def value(self) -> float:
        return self.sign * math.exp(self.log_abs)


EXACT_PRODUCT_LIMIT = 64


def log_gamma_ratio(a: float, k: int) -> PochhammerLog:
    """``log |(a)_k|`` and the sign of the rising factorial ``a (a+1) ... (a+k-1)``.

    Uses the direct product for ``k <= 64`` and log-gamma functions beyond.
    """
    if int(k) != k or k < 0:
        raise ValueError("k must be a nonnegative integer")
    k = int(k)
    factors = a + np.arange(k)
    if np.any(factors == 0):
        raise ValueError(f"rising factorial ({a})_{k} has a zero factor")
    if k <= EXACT_PRODUCT_LIMIT:
        sign = -1 if np.count_nonzero(factors < 0) % 2 else 1
        return PochhammerLog(float(np.sum(np.log(np.abs(factors)))), sign)
    # (a)_k = Gamma(a+k)/Gamma(a); both arguments avoid the poles here.
    log_abs = float(gammaln(a + k) - gammaln(a))
    sign = int(gammasgn(a + k) * gammasgn(a))
    return PochhammerLog(log_abs, sign)
