"""Special functions: Legendre polynomials, monomial-to-Legendre coefficients,
generalized binomials, Gamma and double factorial.

The coefficients ``c_{k,l}`` expand monomials in Legendre polynomials,

    t^k = sum_{l=0}^{k} c_{k,l} P_l(t),

and are nonzero only for ``l <= k`` with ``k - l`` even, where

    c_{k,l} = (2l+1) k! / (2^j j! (k+l+1)!!),   j = (k-l)/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

EXACT_COEFF_MAX_DEGREE = 20


class DomainError(ValueError):
    """Argument outside the mathematical domain of a function."""


def legendre_eval(l: int, t):
    """Evaluate the Legendre polynomial ``P_l`` by Bonnet's recurrence.

    Parameters
    ----------
    l : int
        Degree, ``l >= 0``.
    t : float or array_like
        Evaluation points in ``[-1, 1]``.

    Returns
    -------
    float or ndarray
        ``P_l(t)`` with the shape of ``t``.
    """
    if l < 0:
        raise DomainError(f"degree must be nonnegative, got {l}")
    t_arr = np.asarray(t, dtype=float)
    if np.any(np.abs(t_arr) > 1.0):
        raise DomainError("Legendre argument must lie in [-1, 1]")
    p_prev = np.ones_like(t_arr)
    if l == 0:
        out = p_prev
    else:
        p_cur = t_arr.copy()
        for m in range(1, l):
            p_prev, p_cur = p_cur, ((2 * m + 1) * t_arr * p_cur - m * p_prev) / (m + 1)
        out = p_cur
    return float(out) if out.ndim == 0 else out


def legendre_all(lmax: int, t) -> np.ndarray:
    """Return ``P_0(t), ..., P_lmax(t)`` stacked along the first axis."""
    if lmax < 0:
        raise DomainError(f"lmax must be nonnegative, got {lmax}")
    t_arr = np.asarray(t, dtype=float)
    if np.any(np.abs(t_arr) > 1.0):
        raise DomainError("Legendre argument must lie in [-1, 1]")
    out = np.empty((lmax + 1,) + t_arr.shape)
    out[0] = 1.0
    if lmax >= 1:
        out[1] = t_arr
    for m in range(1, lmax):
        out[m + 1] = ((2 * m + 1) * t_arr * out[m] - m * out[m - 1]) / (m + 1)
    return out


def double_factorial(n: int) -> int:
    """Exact double factorial ``n!!`` for ``n >= -1``, with ``(-1)!! = 0!! = 1``."""
    if n < -1:
        raise DomainError(f"double factorial undefined for n={n}")
    return math.prod(range(n, 0, -2))


def _log_odd_double_factorial(m):
    """``log((2m+1)!!)`` via ``(2m+1)!! = (2m+1)! / (2^m m!)``."""
    return math.lgamma(2 * m + 2) - m * math.log(2.0) - math.lgamma(m + 1)


@lru_cache(maxsize=None)
def _coeff_exact(k: int, l: int) -> Fraction:
    j = (k - l) // 2
    return Fraction(
        (2 * l + 1) * math.factorial(k),
        2**j * math.factorial(j) * double_factorial(k + l + 1),
    )


def legendre_coeff(k: int, l: int) -> float:
    """Coefficient ``c_{k,l}`` of ``P_l`` in the Legendre expansion of ``t^k``.

    Exact rational arithmetic is used up to degree 20; beyond that the
    closed form is evaluated in log space.
    """
    if k < 0 or l < 0:
        raise DomainError("k and l must be nonnegative")
    if l > k or (k - l) % 2:
        return 0.0
    if k <= EXACT_COEFF_MAX_DEGREE:
        return float(_coeff_exact(k, l))
    j = (k - l) // 2
    log_c = (
        math.log(2 * l + 1)
        + math.lgamma(k + 1)
        - j * math.log(2.0)
        - math.lgamma(j + 1)
        - _log_odd_double_factorial((k + l) // 2)
    )
    return math.exp(log_c)


def legendre_coeff_row(k: int) -> np.ndarray:
    """All coefficients ``c_{k,0..k}`` of one monomial.

    Starts from ``c_{k,k mod 2}`` (``1/(k+1)`` or ``3/(k+2)``) and climbs in
    steps of two with a ratio of positive factors, so no cancellation occurs.
    """
    if k < 0:
        raise DomainError("k must be nonnegative")
    row = np.zeros(k + 1)
    if k <= EXACT_COEFF_MAX_DEGREE:
        for l in range(k % 2, k + 1, 2):
            row[l] = float(_coeff_exact(k, l))
        return row
    l0 = k % 2
    ls = np.arange(l0, k - 1, 2)
    ratios = (2 * ls + 5) / (2 * ls + 1) * (k - ls) / (k + ls + 3)
    start = 1.0 / (k + 1) if l0 == 0 else 3.0 / (k + 2)
    row[l0::2] = start * np.concatenate(([1.0], np.cumprod(ratios)))
    return row


def legendre_coeff_column(l: int, kmax: int) -> np.ndarray:
    """Coefficients ``c_{k,l}`` for ``k = 0..kmax`` at fixed ``l``.

    Climbs in ``k`` from ``c_{l,l}`` with the ratio
    ``c_{k+2,l} / c_{k,l} = (k+1)(k+2) / ((k-l+2)(k+l+3))``.
    """
    col = np.zeros(kmax + 1)
    if l > kmax:
        return col
    ks = np.arange(l, kmax - 1, 2)
    ratios = (ks + 1.0) * (ks + 2.0) / ((ks - l + 2.0) * (ks + l + 3.0))
    col[l::2] = legendre_coeff(l, l) * np.concatenate(([1.0], np.cumprod(ratios)))
    return col


@dataclass(frozen=True)
class LegendreCoeffTable:
    """Immutable table of ``c_{k,l}`` for ``0 <= l <= k <= max_degree``."""

    max_degree: int
    entries: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, max_degree: int) -> "LegendreCoeffTable":
        table = np.zeros((max_degree + 1, max_degree + 1))
        for k in range(max_degree + 1):
            table[k, : k + 1] = legendre_coeff_row(k)
        table.setflags(write=False)
        return cls(max_degree, table)

    def __call__(self, k: int, l: int) -> float:
        if k > self.max_degree or l > self.max_degree:
            raise IndexError("degree beyond table size")
        return float(self.entries[k, l])


def gen_binomial(a: float, k: int) -> float:
    """Generalized binomial coefficient ``a (a-1) ... (a-k+1) / k!``."""
    if k < 0:
        raise DomainError("k must be nonnegative")
    out = 1.0
    for n in range(k):
        out *= (a - n) / (n + 1)
    return out


def gen_binomial_seq(a: float, kmax: int) -> np.ndarray:
    """``gen_binomial(a, k)`` for ``k = 0..kmax`` by cumulative product."""
    n = np.arange(kmax)
    return np.concatenate(([1.0], np.cumprod((a - n) / (n + 1))))


def gamma_fn(x: float) -> float:
    """Gamma function on the positive half line (backed by ``math.gamma``)."""
    if not x > 0:
        raise DomainError(f"gamma_fn requires x > 0, got {x}")
    return math.gamma(x)
