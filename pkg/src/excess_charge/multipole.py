"""Multipole moments of the shifted weight ``(1 + r^2 + 2 r t)^(s/2)``.

``lambda_l(s, r) = 1/2 int_{-1}^{1} (1 + r^2 + 2 r t)^(s/2) P_l(t) dt``.
With ``q = 2r / (1 + r^2)`` the binomial series gives

    lambda_l = (1 + r^2)^(s/2) sum_{n >= l} binom(s/2, n) q^n c_{n,l} / (2l + 1).

For ``s/2 = a`` in [1, 3] the bound ``|binom(a, n)| <= a (a-1) / (n (n-1))``
together with ``0 <= c_{n,l} <= 1`` certifies every truncated tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import special

from .specfun import (
    DomainError,
    gen_binomial,
    gen_binomial_seq,
    legendre_all,
    legendre_coeff_column,
    legendre_coeff_row,
)

SERIES_TOL = 1e-14
SERIES_MAX_TERMS = 20000
QUAD_RTOL = 1e-13
QUAD_MAX_NODES = 4096


class ConsistencyError(RuntimeError):
    """Two independent evaluations of the same quantity disagree."""


class BoundViolation(RuntimeError):
    """A proven inequality failed numerically."""


@lru_cache(maxsize=None)
def _gauss_legendre(n: int):
    # numpy's nodes are Newton-refined; scipy's are much cheaper at large n
    x, w = np.polynomial.legendre.leggauss(n) if n <= 256 else special.roots_legendre(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=16)
def sphere_quadrature(n_theta: int = 64, n_phi: int = 128):
    """Product rule on the unit sphere normalized to total weight 1.

    Gauss-Legendre in ``cos(theta)`` times the trapezoid rule in ``phi``.
    Returns ``(points, weights)`` of shapes ``(M, 3)`` and ``(M,)``.
    """
    ct, wt = np.polynomial.legendre.leggauss(n_theta)
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    st = np.sqrt(1.0 - ct**2)
    pts = np.stack(
        [np.outer(st, np.cos(phi)).ravel(), np.outer(st, np.sin(phi)).ravel(), np.repeat(ct, n_phi)],
        axis=1,
    )
    w = np.repeat(wt / 2.0, n_phi) / n_phi
    pts.setflags(write=False)
    w.setflags(write=False)
    return pts, w


def sphere_average_power(a_norm: float, r: float, lam: float) -> float:
    """Spherical mean of ``|a + r omega|^lam`` over unit ``omega``."""
    if lam <= -2:
        raise DomainError(f"lam must exceed -2, got {lam}")
    if a_norm <= 0 or r <= 0:
        raise DomainError("a_norm and r must be positive")
    e = lam + 2.0
    return ((a_norm + r) ** e - abs(a_norm - r) ** e) / (2.0 * r * a_norm * e)


def _check_sr(s: float, r: float, s_max: float = 4.0):
    if not 2.0 <= s <= s_max:
        raise DomainError(f"s must lie in [2, {s_max}], got {s}")
    if not 0.0 < r <= 1.0:
        raise DomainError(f"r must lie in (0, 1], got {r}")


def _moments_quadrature(lmax: int, s: float, r: float) -> np.ndarray:
    """Gauss-Legendre values of ``lambda_0..lambda_lmax``, doubling nodes to convergence."""
    prev = None
    n = max(64, 2 * lmax + 2)
    while True:
        t, w = _gauss_legendre(n)
        weight = 0.5 * w * (1.0 + r * r + 2.0 * r * t) ** (s / 2.0)
        cur = legendre_all(lmax, t) @ weight
        if prev is not None and np.max(np.abs(cur - prev)) <= QUAD_RTOL * np.max(np.abs(cur)):
            return cur
        if n >= QUAD_MAX_NODES:
            return cur
        prev = cur
        n *= 2


def _binomial_tail_factor(a: float, q: float, m: int) -> float:
    """Bound on ``sum_{n > m} |binom(a, n)| q^n`` for ``a`` in [1, 3]."""
    if float(a).is_integer():
        return 0.0 if m >= a else math.inf
    scale = a * (a - 1.0)
    plain = scale / m
    if q < 1.0:
        return min(plain, scale * q ** (m + 1) / (m * (m + 1) * (1.0 - q)))
    return plain


def _series_length(a: float, q: float, lmax: int) -> int:
    if float(a).is_integer():
        return max(int(a), lmax)
    m = max(lmax + 2, 16)
    while m < SERIES_MAX_TERMS and _binomial_tail_factor(a, q, m) > SERIES_TOL:
        m *= 2
    return min(m, SERIES_MAX_TERMS)


@lru_cache(maxsize=8)
def _coeff_matrix(nmax: int, lmax: int) -> np.ndarray:
    """``c_{n,l}`` for ``n <= nmax``, ``l <= lmax``."""
    out = np.stack([legendre_coeff_column(l, nmax) for l in range(lmax + 1)], axis=1)
    out.setflags(write=False)
    return out


def _moments_series(lmax: int, s: float, r: float):
    """Series values of ``lambda_0..lambda_lmax`` and their certified tails."""
    a = s / 2.0
    q = 2.0 * r / (1.0 + r * r)
    nmax = _series_length(a, q, lmax)
    binom = gen_binomial_seq(a, nmax)
    terms = binom * q ** np.arange(nmax + 1)
    pref = (1.0 + r * r) ** a
    ls = np.arange(lmax + 1)
    vals = pref * (terms @ _coeff_matrix(nmax, lmax)) / (2 * ls + 1)
    tails = pref * _binomial_tail_factor(a, q, nmax) / (2 * ls + 1)
    return vals, tails, binom, q, nmax


def lambda_moment(l: int, s: float, r: float) -> float:
    """``lambda_l(s, r)`` by quadrature, cross-checked against the series."""
    if l < 0:
        raise DomainError("l must be nonnegative")
    _check_sr(s, r)
    quad = _moments_quadrature(l, s, r)
    series, tails, *_ = _moments_series(l, s, r)
    if abs(quad[l] - series[l]) > 1e-8 + tails[l]:
        raise ConsistencyError(f"lambda_{l}(s={s}, r={r}): quadrature {quad[l]!r} vs series {series[l]!r}")
    return float(quad[l])


def lambda0_closed_form(s: float, r: float) -> float:
    return ((1.0 + r) ** (s + 2) - (1.0 - r) ** (s + 2)) / (2.0 * (s + 2) * r)


@dataclass(frozen=True)
class MomentSeries:
    """Moments ``lambda_0..lambda_L`` with a certified bound on ``sum_{l > L} |lambda_l|``."""

    s: float
    r: float
    q: float
    moments: np.ndarray = field(repr=False)
    tail_bound: float

    @property
    def lmax(self) -> int:
        return len(self.moments) - 1

    def c_s_direct(self) -> float:
        """``sum_{l=2}^{L} |lambda_l|`` plus ``tail_bound``."""
        return float(np.sum(np.abs(self.moments[2:])) + self.tail_bound)


def moment_series(s: float, r: float, lmax: int) -> MomentSeries:
    """All moments up to ``lmax`` with both evaluation paths cross-checked.

    The tail over ``l > lmax`` uses ``sum_{l > L} c_{n,l} / (2l+1) <= 1 / (2L+3)``.
    """
    _check_sr(s, r)
    quad = _moments_quadrature(lmax, s, r)
    series, tails, binom, q, nmax = _moments_series(lmax, s, r)
    bad = np.abs(quad - series) > 1e-8 + tails
    if np.any(bad):
        l = int(np.argmax(bad))
        raise ConsistencyError(f"lambda_{l}(s={s}, r={r}): quadrature {quad[l]!r} vs series {series[l]!r}")
    a = s / 2.0
    n = np.arange(lmax + 1, nmax + 1)
    high = float(np.sum(np.abs(binom[lmax + 1 :]) * q**n)) + _binomial_tail_factor(a, q, nmax)
    tail = (1.0 + r * r) ** a * high / (2 * lmax + 3)
    quad.setflags(write=False)
    return MomentSeries(s=float(s), r=float(r), q=q, moments=quad, tail_bound=tail)


def a_k(k: int, s: float) -> float:
    """``|binom(s/2, k)| sum_{l=2}^{k} c_{k,l} / (2l+1)``."""
    if k < 2:
        raise DomainError("k must be at least 2")
    row = legendre_coeff_row(k)
    ls = np.arange(k + 1)
    return abs(gen_binomial(s / 2.0, k)) * float(np.sum(row[2:] / (2 * ls[2:] + 1)))


def tail_prefactor(s: float) -> float:
    a = s / 2.0
    return a * (a - 1.0) * (2.0 - a)


@dataclass(frozen=True)
class TailSum:
    """Partial sums of ``A_k`` over ``4 <= k <= K`` and their s-uniform majorants.

    ``partial_even``/``partial_odd`` use the exact ``A_k``. The majorants
    replace ``|binom(s/2, k)|`` by ``prefactor (k-2)! / k!``; the odd one
    starts at ``k = 3`` as in the published tally, which only loosens it.
    """

    s: float
    K: int
    prefactor: float
    partial_even: float
    partial_odd: float
    majorant_even: float
    majorant_odd: float
    delta: float

    @property
    def partial(self) -> float:
        return self.partial_even + self.partial_odd

    @property
    def certified_total(self) -> float:
        return self.partial + self.delta

    @property
    def bound(self) -> float:
        return self.prefactor * 448 / 10000


def tail_sum(s: float, K: int) -> TailSum:
    """Sum ``A_4 + ... + A_K`` and the remainder bound ``prefactor * 2 / (5 (K - 1))``."""
    if not 2.0 <= s <= 3.0:
        raise DomainError(f"s must lie in [2, 3], got {s}")
    if K < 4:
        raise DomainError("K must be at least 4")
    binom = np.abs(gen_binomial_seq(s / 2.0, K))
    coeff_sums = np.zeros(K + 1)
    for k in range(2, K + 1):
        row = legendre_coeff_row(k)
        ls = np.arange(2, k + 1)
        coeff_sums[k] = np.sum(row[2:] / (2 * ls + 1))
    ks = np.arange(K + 1)
    exact = binom * coeff_sums
    majorant = np.zeros(K + 1)
    majorant[2:] = coeff_sums[2:] / (ks[2:] * (ks[2:] - 1.0))
    pref = tail_prefactor(s)
    even = ks[4::2]
    odd = ks[5::2]
    out = TailSum(
        s=float(s),
        K=K,
        prefactor=pref,
        partial_even=float(np.sum(exact[even])),
        partial_odd=float(np.sum(exact[odd])),
        majorant_even=pref * float(np.sum(majorant[even])),
        majorant_odd=pref * float(np.sum(majorant[ks[3::2]])),
        delta=pref * 2.0 / (5.0 * (K - 1)),
    )
    if K >= 2001 and out.certified_total > out.bound + 1e-6:
        raise BoundViolation(f"certified tail {out.certified_total} exceeds {out.bound}")
    return out


def f_remainder(r, s: float):
    """``(s/2)(s/2 - 1)(4/15 + (2 - s/2)(8/105) r + (2 - s/2)(448/625) r^2)``."""
    a = s / 2.0
    return a * (a - 1.0) * (4.0 / 15.0 + (2.0 - a) * (8.0 / 105.0) * r + (2.0 - a) * (448.0 / 625.0) * r**2)


def g_convexity(r, s: float):
    """Lower envelope constant ``g(r)`` of the convexity comparison; nonnegative."""
    q = 2.0 * r / (1.0 + r**2)
    a = s / 2.0
    bracket = 0.5 * ((1.0 + q) ** a + (1.0 - q) ** a) - s * (s - 2.0) / 15.0 * q**2 * (1.0 + q) ** ((s - 4.0) / 2.0)
    return (1.0 + r**2) ** a * bracket


def convexity_majorant(t, q, s: float):
    """Linear-plus-quadratic upper bound for ``(1 + q t)^(s/2)`` on ``[-1, 1]``."""
    a = s / 2.0
    f_plus = (1.0 + q) ** a
    f_minus = (1.0 - q) ** a
    d0 = (s / 4.0) * (a - 1.0) * q**2 * (1.0 + q) ** ((s - 4.0) / 2.0)
    return 0.5 * (f_plus - f_minus) * t + 0.5 * (f_plus + f_minus) + d0 * (t**2 - 1.0)


@dataclass(frozen=True)
class CsCheck:
    s: float
    r: float
    L: int
    direct: float
    bound: float


def cs_tail_vs_bound(s: float, r: float, L: int = 40) -> CsCheck:
    """Compare ``sum_{l >= 2} |lambda_l|`` (with certified tail) against ``r^2 f(r, s)``."""
    if L < 10:
        raise DomainError("L must be at least 10")
    _check_sr(s, r, s_max=3.0)
    series = moment_series(s, r, L)
    direct = series.c_s_direct()
    bound = r * r * f_remainder(r, s)
    if direct > bound + 1e-8:
        raise BoundViolation(f"C_s(r) = {direct} exceeds r^2 f = {bound} at s={s}, r={r}")
    return CsCheck(s=float(s), r=float(r), L=L, direct=direct, bound=float(bound))


def gamma_weight(u, v, s: float, tilde: bool = False):
    """``v^s min(u, v) / (3 u max(u, v)^2)``; ``tilde`` drops the factor 1/3."""
    val = v**s * np.minimum(u, v) / (u * np.maximum(u, v) ** 2)
    return val if tilde else val / 3.0


def positivity_pair_sum(x1, x2, r: float, s: float, tilde: bool = False):
    """Two-point sum ``sum_{j != k} gamma(|x_j - x_k|, r|x_j|) / |x_j| x_j.(x_j - x_k)``.

    Returns ``(total, lower)`` where ``lower`` is the difference-product
    ``(gamma(|a|, r|x_1|) - gamma(|a|, r|x_2|)) (|x_1| - |x_2|)`` that
    bounds ``total`` from below. Inputs may carry a leading batch axis.
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    n1 = np.linalg.norm(x1, axis=-1)
    n2 = np.linalg.norm(x2, axis=-1)
    dvec = x1 - x2
    u = np.linalg.norm(dvec, axis=-1)
    g1 = gamma_weight(u, r * n1, s, tilde)
    g2 = gamma_weight(u, r * n2, s, tilde)
    total = g1 / n1 * np.sum(x1 * dvec, axis=-1) - g2 / n2 * np.sum(x2 * dvec, axis=-1)
    lower = (g1 - g2) * (n1 - n2)
    return total, lower


def quadrupole_shell_average(a_vec, r: float, x_hat, n_theta: int = 64, n_phi: int = 128) -> float:
    """Spherical mean of ``P_2(x_hat . omega) / |a - r omega|`` by product quadrature."""
    pts, w = sphere_quadrature(n_theta, n_phi)
    a_vec = np.asarray(a_vec, dtype=float)
    x_hat = np.asarray(x_hat, dtype=float)
    x_hat = x_hat / np.linalg.norm(x_hat)
    c = pts @ x_hat
    p2 = 1.5 * c * c - 0.5
    dist = np.linalg.norm(a_vec[None, :] - r * pts, axis=1)
    return float(np.sum(w * p2 / dist))
