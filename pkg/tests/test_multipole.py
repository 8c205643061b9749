import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from excess_charge.multipole import (
    BoundViolation,
    a_k,
    convexity_majorant,
    cs_tail_vs_bound,
    f_remainder,
    g_convexity,
    lambda0_closed_form,
    lambda_moment,
    moment_series,
    positivity_pair_sum,
    quadrupole_shell_average,
    sphere_average_power,
    sphere_quadrature,
    tail_prefactor,
    tail_sum,
)
from excess_charge.specfun import DomainError, legendre_eval


def random_unit(rng, n=1):
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1)[:, None]


def test_sphere_average_examples():
    assert sphere_average_power(1.7, 0.4, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert sphere_average_power(2.0, 1.0, -1.0) == pytest.approx(0.5, abs=1e-15)
    assert sphere_average_power(1.0, 0.5, 2.0) == pytest.approx(1.25, abs=1e-15)
    with pytest.raises(DomainError):
        sphere_average_power(1.0, 0.5, -2.0)


@pytest.mark.parametrize("a,r,lam", [(1.0, 0.5, 2.0), (0.3, 0.9, 1.5), (2.0, 0.7, 3.0), (1.0, 0.4, -0.5)])
def test_sphere_average_vs_quadrature(a, r, lam):
    pts, w = sphere_quadrature()
    vec = a * np.array([0.6, 0.0, 0.8])
    val = np.sum(w * np.linalg.norm(vec - r * pts, axis=1) ** lam)
    assert sphere_average_power(a, r, lam) == pytest.approx(val, rel=1e-10)


def test_moment_examples():
    assert lambda_moment(0, 2.0, 0.3) == pytest.approx(1.09, abs=1e-13)
    assert abs(lambda_moment(3, 2.0, 0.5)) <= 1e-12
    assert lambda_moment(0, 3.0, 0.2) == pytest.approx(1.08032, abs=1e-13)
    assert lambda0_closed_form(3.0, 0.2) == pytest.approx(1.08032, abs=1e-14)


@pytest.mark.parametrize("s", [2.0, 2.3, 2.5, 3.0, 3.7, 4.0])
@pytest.mark.parametrize("r", [0.05, 0.4, 0.9, 1.0])
def test_moment_series_invariants(s, r):
    ms = moment_series(s, r, 12)
    assert 0 < ms.q <= 1
    assert ms.moments[0] == pytest.approx(lambda0_closed_form(s, r), abs=1e-10)
    assert ms.moments[1] >= 0
    if s == 2.0:
        assert np.max(np.abs(ms.moments[2:])) <= 1e-12
    oracle = [integrate.quad(lambda t: 0.5 * (1 + r * r + 2 * r * t) ** (s / 2) * special.eval_legendre(l, t), -1, 1, epsabs=1e-12, limit=200)[0] for l in range(13)]
    assert np.allclose(ms.moments, oracle, atol=1e-10)


def test_moment_domain():
    with pytest.raises(DomainError):
        lambda_moment(0, 1.5, 0.5)
    with pytest.raises(DomainError):
        lambda_moment(0, 2.5, 1.5)
    with pytest.raises(DomainError):
        lambda_moment(-1, 2.5, 0.5)


@pytest.mark.parametrize("l", range(7))
def test_funk_hecke(l):
    rng = np.random.default_rng(l)
    s, r = 2.7, 0.6
    xi, zeta = random_unit(rng, 2)
    pts, w = sphere_quadrature()
    lhs = np.sum(w * (1 + r * r + 2 * r * (pts @ xi)) ** (s / 2) * legendre_eval(l, np.clip(pts @ zeta, -1, 1)))
    assert lhs == pytest.approx(lambda_moment(l, s, r) * legendre_eval(l, float(xi @ zeta)), abs=1e-7)


def test_twisted_orthogonality():
    rng = np.random.default_rng(11)
    x_hat, a_hat = random_unit(rng, 2)
    pts, w = sphere_quadrature()
    cx, ca = np.clip(pts @ x_hat, -1, 1), np.clip(pts @ a_hat, -1, 1)
    for n in range(6):
        for m in range(6):
            val = np.sum(w * legendre_eval(n, cx) * legendre_eval(m, ca))
            want = legendre_eval(n, float(x_hat @ a_hat)) / (2 * n + 1) if n == m else 0.0
            assert val == pytest.approx(want, abs=1e-7)


def test_a_k_examples():
    assert a_k(2, 3.0) == pytest.approx(0.05, abs=1e-15)
    assert a_k(3, 3.0) == pytest.approx(0.0625 * 2 / 35, abs=1e-15)
    assert a_k(2, 2.0) == 0.0
    assert tail_prefactor(3.0) == pytest.approx(0.375)


def test_tail_sum_s3():
    t = tail_sum(3.0, 2001)
    pref = t.prefactor
    assert abs(t.majorant_even / pref - 0.0242) <= 1e-4
    assert abs(t.majorant_odd / pref - 0.0203) <= 1e-4
    assert t.delta <= pref * 0.0003
    assert t.partial_even <= t.majorant_even and t.partial_odd <= t.majorant_odd
    assert t.certified_total <= t.bound
    assert t.bound == pytest.approx(0.375 * 28 / 625)
    direct = sum(a_k(k, 3.0) for k in range(4, 60))
    assert tail_sum(3.0, 59).partial == pytest.approx(direct, rel=1e-12)


def test_tail_sum_s2_vanishes():
    t = tail_sum(2.0, 500)
    assert t.partial == 0.0 and t.delta == 0.0 and t.certified_total == 0.0


def test_tail_sum_domain():
    with pytest.raises(DomainError):
        tail_sum(3.5, 100)
    with pytest.raises(DomainError):
        tail_sum(3.0, 3)


def test_f_and_g_examples():
    assert f_remainder(0.7, 2.0) == 0.0
    r = np.linspace(0, 1, 101)
    assert np.allclose(f_remainder(r, 3.0), 1 / 5 + r / 35 + 168 * r**2 / 625, atol=1e-15)
    assert f_remainder(1.0, 3.0) == pytest.approx(0.4974, abs=1e-4)
    for s in np.linspace(2.0, 3.0, 11):
        assert np.all(f_remainder(r, s) <= f_remainder(r, 3.0) + 1e-15)
    assert np.all(f_remainder(r, 3.0) < 0.5)
    assert g_convexity(1e-9, 2.7) == pytest.approx(1.0, abs=1e-8)
    assert np.allclose(g_convexity(r[1:], 2.0), 1 + r[1:] ** 2, atol=1e-14)
    assert g_convexity(0.5, 3.0) > 0


def test_convexity_majorant_grid():
    t = np.linspace(-1, 1, 201)[:, None, None]
    q = np.linspace(0, 1, 101)[1:][None, :, None]
    s = np.linspace(2, 3, 21)[None, None, :]
    assert np.all(convexity_majorant(t, q, s) - (1 + q * t) ** (s / 2) >= -1e-12)


@pytest.mark.parametrize("s,r", [(2.0, 0.5), (3.0, 0.3), (2.5, 0.8)])
def test_cs_examples(s, r):
    c = cs_tail_vs_bound(s, r, 40)
    assert c.direct <= c.bound + 1e-12
    if s == 2.0:
        assert c.direct <= 1e-11 and c.bound == 0.0
    if (s, r) == (3.0, 0.3):
        assert c.bound == pytest.approx(0.09 * f_remainder(0.3, 3.0))


def test_cs_truncation_stable():
    for s, r in [(2.5, 0.8), (3.0, 1.0), (2.2, 0.5)]:
        short, long_ = moment_series(s, r, 20), moment_series(s, r, 40)
        assert abs(short.c_s_direct() - long_.c_s_direct()) <= short.tail_bound + 1e-12


def test_bound_violation_is_raised(monkeypatch):
    import excess_charge.multipole as mp

    monkeypatch.setattr(mp, "f_remainder", lambda r, s: 0.0 * r)
    with pytest.raises(BoundViolation):
        mp.cs_tail_vs_bound(3.0, 0.5)


def test_positivity_examples():
    x1 = np.array([0.3, -0.4, 0.5])
    rot = np.array([[0, -1, 0], [1, 0, 0], [0, 0, 1.0]])
    total, lower = positivity_pair_sum(x1, rot @ x1, 0.7, 2.5)
    assert lower == 0.0
    assert total > 0
    total, lower = positivity_pair_sum([1.0, 0, 0], [-0.5, 0, 0], 0.6, 3.0)
    assert total > 0 and total >= lower >= 0


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.floats(-2, 2), min_size=6, max_size=6),
    st.floats(1e-3, 1.0),
    st.floats(2.0, 3.0),
    st.booleans(),
)
def test_positivity_property(coords, r, s, tilde):
    x1, x2 = np.array(coords[:3]), np.array(coords[3:])
    if min(np.linalg.norm(x1), np.linalg.norm(x2), np.linalg.norm(x1 - x2)) < 1e-3:
        return
    total, lower = positivity_pair_sum(x1, x2, r, s, tilde)
    scale = max(1.0, abs(total))
    assert total >= -1e-12 * scale
    assert total - lower >= -1e-12 * scale
    assert lower >= -1e-12 * scale


@pytest.mark.parametrize("ratio", [0.3, 0.6, 1.5, 3.0])
def test_quadrupole_bound(ratio):
    rng = np.random.default_rng(7)
    r = 0.8
    for _ in range(5):
        a_hat, x_hat = random_unit(rng, 2)
        a = ratio * r * a_hat
        val = quadrupole_shell_average(a, r, x_hat)
        na = ratio * r
        exact = legendre_eval(2, float(a_hat @ x_hat)) / 5 * min(na, r) ** 2 / max(na, r) ** 3
        assert val == pytest.approx(exact, abs=1e-7)
        assert val <= 1 / (5 * max(na, r)) + 1e-12
