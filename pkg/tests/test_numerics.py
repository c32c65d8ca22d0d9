import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from osdual.numerics import (
    QuadratureRule,
    certify_psd,
    eigendecompose_hermitian,
    gauss_legendre,
    hermitize,
    log_gamma_ratio,
)


def test_one_point_rule_is_midpoint():
    r = gauss_legendre(1)
    assert r.nodes == pytest.approx([0.0])
    assert r.weights == pytest.approx([2.0])


def test_two_point_rule_by_hand():
    # solve w1 + w2 = 2, w1 x1 + w2 x2 = 0, w1 x1^2 + w2 x2^2 = 2/3, w1 x1^3 + w2 x2^3 = 0
    r = gauss_legendre(2)
    assert r.nodes == pytest.approx([-1 / math.sqrt(3), 1 / math.sqrt(3)], abs=1e-15)
    assert r.weights == pytest.approx([1.0, 1.0], abs=1e-15)


def test_exactness_degree():
    r = gauss_legendre(3)
    assert r.degree == 5
    assert abs(r.integrate(r.nodes ** 4) - 0.4) < 1e-14


@given(st.integers(1, 30), st.floats(-5, 5), st.floats(0.1, 5))
@settings(max_examples=50, deadline=None)
def test_polynomials_up_to_degree_are_exact(n, lo, width):
    hi = lo + width
    r = gauss_legendre(n, lo, hi)
    k = 2 * n - 1
    exact = (hi ** (k + 1) - lo ** (k + 1)) / (k + 1)
    assert abs(r.integrate(r.nodes ** k) - exact) <= 1e-11 * max(1.0, max(abs(lo), abs(hi)) ** (k + 1))


def test_weights_sum_to_length():
    r = gauss_legendre(37, -2.0, 3.5)
    assert r.weights.sum() == pytest.approx(5.5, rel=1e-14)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        gauss_legendre(0)
    with pytest.raises(ValueError):
        gauss_legendre(3, 1.0, 1.0)
    with pytest.raises(ValueError):
        QuadratureRule(np.array([0.0, 0.5]), np.array([1.0, -1.0]), (-1.0, 1.0))


def test_interpolation_reproduces_polynomials():
    r = gauss_legendre(12, -1, 2)
    x = np.linspace(-0.9, 1.9, 31)
    vals = r.nodes ** 7 - 3 * r.nodes
    assert np.allclose(r.interpolate(vals, x), x ** 7 - 3 * x, atol=1e-11)
    assert np.allclose(r.interpolate(vals, r.nodes), vals)
    assert np.all(r.interpolate(vals, np.array([-1.5, 2.5])) == 0)


@pytest.mark.parametrize("m, expected", [
    (np.eye(3), [1, 1, 1]),
    (np.diag([2.0, -1.0]), [-1, 2]),
    (np.array([[0.0, 1.0], [1.0, 0.0]]), [-1, 1]),
])
def test_eigendecompose_small(m, expected):
    w, v = eigendecompose_hermitian(m)
    assert w == pytest.approx(expected)
    assert np.allclose(v @ np.diag(w) @ v.conj().T, m)


def test_hermitize_rejects_non_hermitian():
    with pytest.raises(ValueError):
        hermitize(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_certify_psd_examples():
    r = certify_psd(np.eye(4))
    assert r.is_psd and r.min_eigenvalue == pytest.approx(1.0)
    assert not certify_psd(np.diag([1.0, -0.5])).is_psd
    v = np.array([1.0, 2.0, -1.0])
    r = certify_psd(np.outer(v, v))
    assert r.is_psd and abs(r.min_eigenvalue) < 1e-12


@given(st.integers(1, 8), st.integers(0, 2 ** 31))
@settings(max_examples=30, deadline=None)
def test_gram_matrices_are_psd(n, seed):
    a = np.random.default_rng(seed).standard_normal((n, n + 2))
    assert certify_psd(a @ a.T).is_psd


@pytest.mark.parametrize("a, k, value, sign", [(1.0, 4, 24.0, 1), (0.5, 2, 0.75, 1), (-0.5, 1, 0.5, -1)])
def test_pochhammer_examples(a, k, value, sign):
    p = log_gamma_ratio(a, k)
    assert p.sign == sign
    assert abs(p.value) == pytest.approx(value, rel=1e-14)


@given(st.floats(-6.5, 6.5).filter(lambda a: abs(a - round(a)) > 1e-3), st.integers(0, 120))
@settings(max_examples=60, deadline=None)
def test_pochhammer_matches_direct_product(a, k):
    direct = np.prod([a + j for j in range(k)]) if k else 1.0
    p = log_gamma_ratio(a, k)
    assert p.sign == np.sign(direct)
    assert p.log_abs == pytest.approx(math.log(abs(direct)), rel=1e-10, abs=1e-10)


def test_pochhammer_zero_factor():
    with pytest.raises(ValueError):
        log_gamma_ratio(-2.0, 5)
