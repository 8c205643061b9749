import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from excess_charge.radial import beta_upper_bound
from excess_charge.variational import (
    DegenerateConfigurationError,
    NoConvergenceError,
    ParticleConfiguration,
    alpha_gradient,
    alpha_objective,
    default_n_starts,
    minimize_alpha,
    sample_annulus,
)


def random_config(seed, n):
    return sample_annulus(np.random.default_rng(seed), n)


def central_difference(x, s, h=1e-6):
    g = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        e = np.zeros_like(x)
        e[idx] = h
        g[idx] = (alpha_objective(x + e, s) - alpha_objective(x - e, s)) / (2 * h)
    return g


def test_antipodal_pair():
    x = np.array([[1.0, 0, 0], [-1.0, 0, 0]])
    assert alpha_objective(x, 2.0) == pytest.approx(0.5, abs=1e-15)
    g = alpha_gradient(x, 2.0)
    assert np.allclose(g, 0.0, atol=1e-14)


def test_configuration_validation():
    with pytest.raises(DegenerateConfigurationError):
        ParticleConfiguration(np.array([[0.0, 0, 0], [1.0, 0, 0]]))
    with pytest.raises(DegenerateConfigurationError):
        ParticleConfiguration(np.array([[1.0, 0, 0], [1.0, 0, 0]]))
    with pytest.raises((DegenerateConfigurationError, ValueError)):
        ParticleConfiguration(np.array([[np.nan, 0, 0], [1.0, 0, 0]]))
    with pytest.raises((DegenerateConfigurationError, ValueError)):
        ParticleConfiguration(np.zeros((3, 2)) + 1)


def test_gradient_random_five_points():
    x = random_config(5, 5)
    g = alpha_gradient(x, 2.5)
    fd = central_difference(x, 2.5)
    assert np.linalg.norm(g - fd) <= 1e-5 * np.linalg.norm(g)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.integers(2, 12), st.floats(1.0, 3.0), st.floats(0.1, 10.0))
def test_invariances(seed, n, s, lam):
    x = random_config(seed, n)
    f = alpha_objective(x, s)
    rot = Rotation.random(random_state=seed).as_matrix()
    perm = np.random.default_rng(seed).permutation(n)
    assert alpha_objective(lam * x, s) == pytest.approx(f, rel=1e-12)
    assert alpha_objective(x @ rot.T, s) == pytest.approx(f, rel=1e-12)
    assert alpha_objective(x[perm], s) == pytest.approx(f, rel=1e-12)
    assert f >= 0.5 - 1e-12


def test_default_starts():
    assert default_n_starts(10) == 64
    assert default_n_starts(12) == 256


@pytest.mark.parametrize("n,s,expected,tol", [(2, 2.0, 0.5, 1e-4), (3, 2.0, 0.577350, 1e-4), (10, 2.0, 0.727011, 5e-3)])
def test_minimize_examples(n, s, expected, tol):
    res = minimize_alpha(n, s)
    assert abs(res.value - expected) <= tol
    assert res.converged and res.best_gradient_norm <= 1e-8
    assert res.value <= alpha_objective(res.minimizer, s) + 1e-15
    assert np.all(res.start_values >= res.value)
    assert res.value <= beta_upper_bound(s).beta_up + 5e-3


def test_minimize_n20_s3(ref):
    res = minimize_alpha(20, 3.0)
    assert abs(res.value - ref["figure1_alpha"]["3.00"]["20"]) <= 5e-3


def test_minimizer_is_stationary():
    res = minimize_alpha(6, 1.5, n_starts=8)
    assert np.linalg.norm(alpha_gradient(res.minimizer, 1.5)) <= 1e-8 * 10


def test_determinism_and_workers():
    a = minimize_alpha(5, 2.0, n_starts=8, seed=3)
    b = minimize_alpha(5, 2.0, n_starts=8, seed=3, workers=2)
    assert a.value == b.value
    assert np.array_equal(a.start_values, b.start_values)


def test_s1_reports_best_start_on_failure():
    with pytest.raises(NoConvergenceError) as info:
        minimize_alpha(6, 1.0, n_starts=4, max_iter=200)
    res = info.value.result
    assert res.converged is False
    assert 0.5 - 1e-12 <= res.value < 0.6


def test_argument_checks():
    with pytest.raises(ValueError):
        minimize_alpha(1, 2.0)
    with pytest.raises(ValueError):
        minimize_alpha(3, 0.5)
    with pytest.raises(ValueError):
        minimize_alpha(3, 2.0, n_starts=0)
