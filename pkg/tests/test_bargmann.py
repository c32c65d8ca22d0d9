import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from osdual import bargmann as bg
from osdual.bargmann import FockVector, HermiteExpansion
from osdual.errors import IllConditionedError, TruncationWarning

RULE = bg.line_rule()
X = RULE.nodes


def gauss(x, width=1.0):
    return np.exp(-np.asarray(x) ** 2 / (2 * width))


def probe(x):
    return np.cos(1.5 * x) * np.exp(-x * x / 3) + 0.4j * x * np.exp(-x * x / 2)


def norm(v):
    return math.sqrt(abs(bg.l2_inner(RULE, v, v)))


def test_hermite_orthonormal():
    h = bg.hermite_functions(30, X)
    gram = (h * RULE.weights / bg.SQRT_2PI) @ h.T
    assert np.abs(gram - np.eye(31)).max() < 1e-12


def test_hermite_closed_forms():
    assert np.allclose(bg.hermite_functions(0, X)[0], math.sqrt(2) * np.exp(-X * X))
    # h_1 = H_1(sqrt(2) x) exp(-x^2) / sqrt(1) with H_1(u) = 2u
    assert np.allclose(bg.hermite_functions(1, X)[1], 2 * math.sqrt(2) * X * np.exp(-X * X))


def test_heat_of_gaussian_closed_form():
    for t in (0.1, 0.5, 2.0):
        out = bg.heat_convolve(t, gauss, RULE)
        assert np.abs(out - bg.gaussian_heat_closed_form(t, X)).max() < 1e-13
    out = bg.heat_convolve_direct(0.7, gauss, RULE)
    assert np.abs(out - bg.gaussian_heat_closed_form(0.7, X)).max() < 1e-13


def test_heat_small_time_is_near_identity():
    out = bg.heat_convolve(0.001, gauss, RULE)
    assert np.abs(out - gauss(X)).max() < 1e-3


def test_heat_semigroup():
    f = probe(X)
    lhs = bg.heat_convolve(0.3, bg.heat_convolve(0.7, f, RULE), RULE)
    rhs = bg.heat_convolve(1.0, f, RULE)
    assert norm(lhs - rhs) <= 1e-8


def test_heat_rejects_nonpositive_time():
    with pytest.raises(ValueError):
        bg.heat_convolve(0.0, gauss)


def test_heat_warns_on_boundary_mass():
    with pytest.warns(TruncationWarning):
        bg.heat_convolve(0.5, np.ones_like(X), RULE)


def test_restriction_examples():
    assert np.allclose(bg.restriction(FockVector([1.0]), X), np.exp(-X * X / 2))
    assert np.allclose(bg.restriction(FockVector([0.0, 1.0]), X), X * np.exp(-X * X / 2))


def test_restriction_injective_on_truncations():
    pts = np.linspace(-3, 3, 25)
    cols = [bg.restriction(FockVector(np.eye(15)[k]), pts) for k in range(15)]
    assert np.linalg.matrix_rank(np.array(cols).T) == 15


def test_r_star_of_gaussian():
    # ∫ exp(-x^2 + z x) dx / sqrt(2 pi) = exp(z^2 / 4) / sqrt(2)
    F = bg.r_star(gauss, 60, RULE)
    z = np.array([0.0, 0.7, -1.1 + 0.5j, 2j])
    assert np.allclose(F(z), np.exp(z * z / 4) / math.sqrt(2), atol=1e-12)
    assert F(0.0) == pytest.approx(bg.l2_inner(RULE, lambda x: np.exp(-x * x / 2), gauss))


def test_r_star_is_adjoint(rng):
    for _ in range(20):
        F = FockVector(rng.normal(size=12) + 1j * rng.normal(size=12))
        c = rng.normal(size=4) + 1j * rng.normal(size=4)
        h = sum(ck * np.exp(-(X - k) ** 2 / 2) for k, ck in enumerate(c))
        lhs = bg.l2_inner(RULE, bg.restriction(F, X), h)
        rhs = bg.fock_inner(F, bg.r_star(h, 80, RULE))
        assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(lhs))


def test_rr_star_closed_form_and_composition():
    assert np.allclose(bg.rr_star(gauss, RULE), bg.gaussian_heat_closed_form(1.0, X), atol=1e-13)
    h = probe(X)
    comp = bg.restriction(bg.r_star(h, 120, RULE), X)
    inner = np.abs(X) < 6
    assert np.abs(comp - bg.rr_star(h, RULE))[inner].max() <= 1e-8


def test_rr_star_is_positive(rng):
    for _ in range(5):
        h = sum(rng.normal() * np.exp(-(X - rng.uniform(-3, 3)) ** 2 / rng.uniform(0.5, 3)) for _ in range(3))
        assert bg.l2_inner(RULE, h, bg.rr_star(h, RULE)).real >= 0


def test_sqrt_rr_star():
    h = probe(X)
    twice = bg.sqrt_rr_star(bg.sqrt_rr_star(h, RULE), RULE)
    assert norm(twice - bg.rr_star(h, RULE)) < 1e-10
    assert np.allclose(bg.sqrt_rr_star(gauss, RULE), bg.gaussian_heat_closed_form(0.5, X), atol=1e-13)
    a = bg.sqrt_rr_star(bg.rr_star(h, RULE), RULE)
    b = bg.rr_star(bg.sqrt_rr_star(h, RULE), RULE)
    assert norm(a - b) < 1e-10


@pytest.mark.parametrize("method", ["kernel", "composition"])
def test_hermite_functions_map_to_monomials(method):
    h = bg.hermite_functions(12, X)
    c = bg.scaling_constant(RULE)
    assert abs(c) == pytest.approx(1.0, abs=1e-12)
    for n in range(13):
        coeffs = bg.bargmann_transform(h[n], 12, RULE, method).coefficients / c
        assert np.abs(np.abs(coeffs) - np.eye(13)[n]).max() <= 1e-6


def test_ground_state_maps_to_constant():
    F = bg.bargmann_transform(lambda x: math.sqrt(2) * np.exp(-x * x), 20, RULE)
    assert F.coefficients[0] == pytest.approx(1.0)
    assert np.abs(F.coefficients[1:]).max() < 1e-12


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=20, deadline=None)
def test_bargmann_is_isometric(seed):
    rng = np.random.default_rng(seed)
    coeffs = rng.normal(size=16) + 1j * rng.normal(size=16)
    h = HermiteExpansion(coeffs)(X)
    F = bg.bargmann_transform(h, 30, RULE)
    assert F.norm() == pytest.approx(norm(h), rel=1e-10)
    assert np.allclose(F.coefficients[:16], coeffs, atol=1e-10)


def test_polar_factorization():
    h = probe(X)
    lhs = bg.r_star(h, 40, RULE).coefficients
    rhs = bg.bargmann_transform(bg.sqrt_rr_star(h, RULE), 40, RULE).coefficients
    assert np.abs(lhs - rhs).max() < 1e-10


def test_composition_agrees_with_kernel():
    h = probe(X)
    a = bg.bargmann_transform(h, 25, RULE, "kernel").coefficients
    b = bg.bargmann_transform(h, 25, RULE, "composition").coefficients
    assert np.abs(a - b).max() < 1e-9


def test_composition_refuses_high_degree():
    with pytest.raises(IllConditionedError):
        bg.bargmann_transform(probe(X), 200, RULE, "composition")


def test_fock_kernel_reproduces():
    F = FockVector([1.0, -0.5j, 0.25, 2.0])
    w = 0.4 - 0.3j
    assert bg.fock_inner(bg.fock_kernel(w, 3), F) == pytest.approx(F(w))


def test_hermite_projection_round_trip():
    e = HermiteExpansion.project(probe, 120, RULE)
    assert np.abs(e(X) - probe(X)).max() < 1e-10
    assert e.norm() == pytest.approx(norm(probe(X)), rel=1e-12)
