"""Gaussian path measure with Ornstein-Uhlenbeck covariance.

The measure has mean zero and ``E[q(t1) q(t2)] = exp(-|t1 - t2|) / 2``.  Test
functions are finite combinations of point evaluations, so every positivity
statement becomes a Gram matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import PsdReport, certify_psd


@dataclass(frozen=True)
class TestFunction:
    """``f = sum_i c_i delta_{t_i}`` with distinct times."""

    __test__ = False  # keep pytest from collecting this class

    times: np.ndarray
    coefficients: np.ndarray

    def __post_init__(self):
        t = np.atleast_1d(np.asarray(self.times, dtype=float))
        c = np.atleast_1d(np.asarray(self.coefficients))
        if t.shape != c.shape:
            raise ValueError("times and coefficients must have the same length")
        if np.unique(t).size != t.size:
            raise ValueError("times must be distinct")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(c))):
            raise ValueError("times and coefficients must be finite")
        order = np.argsort(t)
        object.__setattr__(self, "times", t[order])
        object.__setattr__(self, "coefficients", c[order])

    def reflect(self):
        """``(theta f)(s) = f(-s)``."""
        return TestFunction(-self.times, self.coefficients)

    def __sub__(self, other):
        t = np.concatenate([self.times, other.times])
        c = np.concatenate([self.coefficients, -np.asarray(other.coefficients)])
        uniq, inv = np.unique(t, return_inverse=True)
        merged = np.zeros(uniq.size, dtype=np.result_type(c, float))
        np.add.at(merged, inv, c)
        return TestFunction(uniq, merged)

    def supported_in_positive_half(self):
        return bool(np.all(self.times > 0))


def ou_covariance(t1, t2):
    """``exp(-|t1 - t2|) / 2``, broadcasting over arrays."""
    return 0.5 * np.exp(-np.abs(np.subtract(t1, t2)))


def _times(times):
    t = np.asarray(times, dtype=float).ravel()
    if np.unique(t).size != t.size:
        raise ValueError("duplicate times")
    return t


def covariance_gram(times) -> tuple[np.ndarray, PsdReport]:
    """``[C(t_i, t_j)]`` together with its PSD certificate."""
    t = _times(times)
    m = ou_covariance(t[:, None], t[None, :])
    return m, certify_psd(m)


def reflection_gram(times, rank_tol: float = 1e-10) -> tuple[np.ndarray, PsdReport]:
    """``[C(-t_i, t_j)] = [exp(-(t_i + t_j)) / 2]`` for strictly positive times.

    This is the outer product of ``exp(-t) / sqrt(2)`` with itself, so it is
    PSD of rank one; both facts are checked.
    """
    t = _times(times)
    if np.any(t <= 0):
        raise ValueError("reflection positivity needs strictly positive times")
    m = ou_covariance(-t[:, None], t[None, :])
    report = certify_psd(m)
    sv = np.linalg.svd(m, compute_uv=False)
    if sv.size > 1 and sv[1] > rank_tol * max(1.0, sv[0]):
        raise AssertionError(f"reflection Gram has rank > 1 (second singular value {sv[1]:.3e})")
    return m, report


def ground_state_vector(times):
    """``exp(-t) / sqrt(2)``: the single vector generating the reflection Gram."""
    return np.exp(-np.asarray(times, dtype=float)) / np.sqrt(2.0)


def quadratic_form(f: TestFunction, g: TestFunction | None = None):
    """``<f, C g>`` (bilinear, no conjugation)."""
    g = f if g is None else g
    return f.coefficients @ ou_covariance(f.times[:, None], g.times[None, :]) @ g.coefficients


def schwinger_functional(f: TestFunction) -> float:
    """Characteristic functional ``exp(-<f, C f> / 2)`` for real ``f``."""
    c = np.asarray(f.coefficients)
    if np.iscomplexobj(c) and np.any(c.imag != 0):
        raise ValueError("characteristic functional is defined here for real test functions")
    return float(np.exp(-0.5 * quadratic_form(f).real))


def positive_definiteness_matrix(family) -> np.ndarray:
    """``[S(f_k - f_l)]`` for a family of real test functions."""
    n = len(family)
    return np.array([[schwinger_functional(family[k] - family[l]) for l in range(n)] for k in range(n)])


def reflection_positivity_matrix(family) -> np.ndarray:
    """``[S(theta f_k - f_l)]`` for real test functions supported in ``t > 0``."""
    if not all(f.supported_in_positive_half() for f in family):
        raise ValueError("reflection positivity needs test functions supported in t > 0")
    n = len(family)
    return np.array([[schwinger_functional(family[k].reflect() - family[l]) for l in range(n)]
                     for k in range(n)])


def monte_carlo_schwinger(f: TestFunction, n_samples: int = 1_000_000, seed: int = 0):
    """Sample ``q(f)`` and average ``exp(i q(f))``.

    ``q(f)`` is a centered Gaussian with variance ``<f, C f>``.  The path
    values are drawn jointly from the covariance so that the estimate does
    not rely on the closed form.  Returns the estimate and its standard error.
    """
    rng = np.random.default_rng(seed)
    cov, _ = covariance_gram(f.times)
    chol = np.linalg.cholesky(cov + 1e-15 * np.eye(cov.shape[0]))
    q = rng.standard_normal((n_samples, cov.shape[0])) @ chol.T
    vals = np.cos(q @ np.real(f.coefficients))
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(n_samples))
