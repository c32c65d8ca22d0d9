import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from osdual.path_measure import (
    TestFunction,
    covariance_gram,
    ground_state_vector,
    monte_carlo_schwinger,
    ou_covariance,
    positive_definiteness_matrix,
    quadratic_form,
    reflection_gram,
    reflection_positivity_matrix,
    schwinger_functional,
)
from osdual.numerics import certify_psd

times_st = st.lists(st.floats(0.01, 10.0), min_size=1, max_size=40, unique=True)


def test_covariance_values():
    assert ou_covariance(0.0, 0.0) == 0.5
    assert ou_covariance(0.0, math.log(2.0)) == pytest.approx(0.25)
    a, b = 0.37, -1.2
    assert ou_covariance(a, b) == ou_covariance(b, a)


def test_covariance_gram_small():
    m, rep = covariance_gram([0.0])
    assert m.tolist() == [[0.5]] and rep.is_psd
    m, rep = covariance_gram([0.0, 1.0])
    e = math.exp(-1)
    assert np.allclose(m, [[0.5, 0.5 * e], [0.5 * e, 0.5]])
    assert np.linalg.det(m) == pytest.approx(0.25 * (1 - math.exp(-2)))
    with pytest.raises(ValueError):
        covariance_gram([1.0, 1.0])


def test_covariance_gram_cholesky(rng):
    t = np.sort(rng.uniform(-5, 5, 50))
    m, rep = covariance_gram(t)
    assert rep.is_psd
    np.linalg.cholesky(m)  # strictly positive definite for distinct times


def test_reflection_gram_small():
    m, _ = reflection_gram([1.0])
    assert m[0, 0] == pytest.approx(0.5 * math.exp(-2))
    m, rep = reflection_gram([1.0, 2.0])
    v = np.array([math.exp(-1), math.exp(-2)])
    assert np.allclose(m, 0.5 * np.outer(v, v))
    assert rep.is_psd
    with pytest.raises(ValueError):
        reflection_gram([0.0, 1.0])


@given(times_st)
@settings(max_examples=50, deadline=None)
def test_grams_on_random_positive_times(times):
    assert covariance_gram(times)[1].is_psd
    m, rep = reflection_gram(times)
    assert rep.is_psd
    g = ground_state_vector(times)
    assert np.allclose(m, np.outer(g, g), atol=1e-15)


def test_schwinger_examples():
    assert schwinger_functional(TestFunction([0.0], [0.0])) == 1.0
    assert schwinger_functional(TestFunction([0.0], [1.0])) == pytest.approx(math.exp(-0.25))
    with pytest.raises(ValueError):
        schwinger_functional(TestFunction([0.0], [1j]))


@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(-3, 3)), min_size=1, max_size=8,
                unique_by=lambda p: p[0]))
@settings(max_examples=40, deadline=None)
def test_schwinger_parity(atoms):
    t, c = zip(*atoms)
    f = TestFunction(t, c)
    g = TestFunction(t, [-x for x in c])
    assert schwinger_functional(f) == pytest.approx(schwinger_functional(g))
    assert quadratic_form(f) >= -1e-12


def test_schwinger_against_monte_carlo():
    f = TestFunction([0.2, 0.7, 1.5], [1.0, -0.5, 0.8])
    exact = schwinger_functional(f)
    est, se = monte_carlo_schwinger(f, 1_000_000, seed=3)
    assert abs(est - exact) <= 3 * se


def test_test_function_helpers():
    f = TestFunction([2.0, 1.0], [3.0, 4.0])
    assert f.times.tolist() == [1.0, 2.0] and f.coefficients.tolist() == [4.0, 3.0]
    assert f.reflect().times.tolist() == [-2.0, -1.0]
    d = f - TestFunction([1.0, 5.0], [4.0, 1.0])
    assert dict(zip(d.times, d.coefficients)) == {1.0: 0.0, 2.0: 3.0, 5.0: -1.0}
    assert f.supported_in_positive_half() and not f.reflect().supported_in_positive_half()
    with pytest.raises(ValueError):
        TestFunction([1.0, 1.0], [1.0, 2.0])


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=25, deadline=None)
def test_positive_definite_and_reflection_positive(seed):
    rng = np.random.default_rng(seed)
    fam = [TestFunction(rng.uniform(0.05, 4.0, 3), rng.normal(size=3)) for _ in range(5)]
    assert certify_psd(positive_definiteness_matrix(fam)).is_psd
    assert certify_psd(reflection_positivity_matrix(fam)).is_psd


def test_reflection_positivity_needs_positive_support():
    with pytest.raises(ValueError):
        reflection_positivity_matrix([TestFunction([-1.0], [1.0])])
