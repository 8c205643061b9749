"""The bound coefficient b(s) and radial trial measures bounding beta_s.

``b(s) = (s-1) / (s t0)`` where ``t0`` is the root in (0, 1) of
``t^s + s t + 1 - s``; its reciprocal is the minimum over ``t`` of
``(1 + t^s) / (1 + t^(s-1))`` and bounds ``beta_s`` from below. Upper
bounds on ``beta_s`` come from evaluating the energy quotient on the
shell densities ``A |x|^(-p)``, ``1 <= |x| <= n``.

Radial integrals are written with ``u = |x|`` and the profile weight
``k u^m`` where ``m = 2 - p`` and ``k = 4 pi A``. Power integrals over
``[1, n]`` reduce to ``E(c) = int_1^n u^c du = L expm1(z) / z`` with
``L = log n`` and ``z = (c+1) L``, which stays accurate through the
logarithmic case ``c = -1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .specfun import DomainError

FIGURE2_S_GRID = tuple(1.5 + 1.5 * k / 29 for k in range(30))


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


class SearchError(RuntimeError):
    """The measure-family search had nothing to search over."""


@dataclass(frozen=True)
class BofS:
    s: float
    t0: float
    b: float
    beta_lower: float


def _root_poly(t: float, s: float) -> float:
    return t**s + s * t + 1.0 - s


def b_of_s(s: float) -> BofS:
    """Compute ``t0`` and ``b(s)`` for ``1 < s <= 3``.

    Bisection shrinks the bracket (0, 1) to width 1e-15, then one Newton
    step polishes the midpoint.
    """
    if not 1.0 < s <= 3.0:
        raise DomainError(f"b(s) is defined here for 1 < s <= 3, got {s}")
    lo, hi = 0.0, 1.0
    if not (_root_poly(lo, s) < 0.0 < _root_poly(hi, s)):
        raise AssertionError("sign change on (0, 1) must always hold")
    while hi - lo > 1e-15:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if _root_poly(mid, s) < 0.0:
            lo = mid
        else:
            hi = mid
    t0 = 0.5 * (lo + hi)
    t0 -= _root_poly(t0, s) / (s * t0 ** (s - 1) + s)
    b = (s - 1.0) / (s * t0)
    beta_lower = (1.0 + t0**s) / (1.0 + t0 ** (s - 1))
    return BofS(s=float(s), t0=t0, b=b, beta_lower=beta_lower)


def beta_closed_form(s: int) -> float:
    """Exact ``beta_s`` for ``s = 2`` and ``s = 3``."""
    if s == 2:
        return 2.0 * (math.sqrt(2.0) - 1.0)
    if s == 3:
        w = 1.0 + math.sqrt(2.0)
        return 1.5 * (w ** (2.0 / 3.0) - 1.0) / w ** (1.0 / 3.0)
    raise DomainError(f"closed form known only for s in {{2, 3}}, got {s}")


def _power_integral(c: float, log_n: float) -> float:
    """``int_1^n u^c du`` with ``log_n = log n``."""
    z = (c + 1.0) * log_n
    if abs(z) < 1e-8:
        return log_n * (1.0 + z / 2.0 + z * z / 6.0)
    return log_n * math.expm1(z) / z


_GL_T, _GL_W = np.polynomial.legendre.leggauss(64)


def _nested_power_integral(b: float, a: float, log_n: float) -> float:
    """``int_1^n u^b int_1^u v^a dv du``.

    Uses the closed form ``(E(a+b+1) - E(b)) / (a+1)`` unless ``a`` is so
    close to -1 that the difference cancels; then a 64-node Gauss-Legendre
    rule in ``t = log u`` is applied to the smooth integrand.
    """
    eps = a + 1.0
    if abs(eps * log_n) > 1e-3:
        return (_power_integral(a + b + 1.0, log_n) - _power_integral(b, log_n)) / eps
    t = 0.5 * log_n * (_GL_T + 1.0)
    w = 0.5 * log_n * _GL_W
    et = eps * t
    phi = np.where(et == 0.0, 1.0, np.expm1(et) / np.where(et == 0.0, 1.0, et))
    return float(np.sum(w * np.exp((b + 1.0) * t) * t * phi))


@dataclass(frozen=True)
class RadialPowerLawMeasure:
    """Probability density ``A |x|^(-p)`` on the shell ``1 <= |x| <= n``."""

    p: float
    n: float
    A: float

    def __post_init__(self):
        if not self.n > 1.0:
            raise DomainError(f"outer radius must exceed 1, got {self.n}")
        if not self.A > 0.0:
            raise DomainError("normalization must be positive")

    @classmethod
    def normalized(cls, p: float, n: float) -> "RadialPowerLawMeasure":
        if not n > 1.0:
            raise DomainError(f"outer radius must exceed 1, got {n}")
        mass = _power_integral(2.0 - p, math.log(n))
        return cls(p=float(p), n=float(n), A=1.0 / (4.0 * math.pi * mass))

    @property
    def profile_scale(self) -> float:
        """``k = 4 pi A``: the radial profile is ``k u^(2-p)``."""
        return 4.0 * math.pi * self.A

    def total_mass(self) -> float:
        return self.profile_scale * _power_integral(2.0 - self.p, math.log(self.n))


def radial_moment(mu: RadialPowerLawMeasure, t: float) -> float:
    """``int |x|^t dmu``."""
    return mu.profile_scale * _power_integral(2.0 - mu.p + t, math.log(mu.n))


def radial_energy(mu: RadialPowerLawMeasure, s: float, method: str = "closed") -> float:
    """``1/2 int int (u^s + v^s) / max(u, v)`` against the radial profile.

    ``method="closed"`` uses nested power-law antiderivatives over the
    triangle ``v <= u``; ``method="quadrature"`` integrates the same
    triangle adaptively and is kept as an independent check.
    """
    m = 2.0 - mu.p
    k = mu.profile_scale
    if method == "closed":
        log_n = math.log(mu.n)
        inner = _nested_power_integral(m - 1.0 + s, m, log_n) + _nested_power_integral(m - 1.0, m + s, log_n)
        return k * k * inner
    if method == "quadrature":
        val, err = integrate.dblquad(
            lambda v, u: k * k * (u**s + v**s) / u * u**m * v**m,
            1.0,
            mu.n,
            1.0,
            lambda u: u,
            epsabs=0.0,
            epsrel=1e-11,
        )
        if not err <= 1e-10 * abs(val):
            raise QuadratureError(f"energy quadrature error {err:.2e} exceeds tolerance")
        return val
    raise ValueError(f"unknown method {method!r}")


def beta_quotient(p: float, n: float, s: float) -> float:
    """Energy over the ``|x|^(s-1)`` moment for the normalized shell measure."""
    mu = RadialPowerLawMeasure.normalized(p, n)
    return radial_energy(mu, s) / radial_moment(mu, s - 1.0)


@dataclass(frozen=True)
class BetaSearch:
    p_range: tuple[float, float] = (-2.0, 6.0)
    n_range: tuple[float, float] = (1.001, 200.0)
    grid: int = 64
    polish_iter: int = 200


@dataclass(frozen=True)
class BetaUpperBound:
    s: float
    beta_up: float
    b_num: float
    p: float
    n: float


def beta_upper_bound(s: float, search: BetaSearch = BetaSearch()) -> BetaUpperBound:
    """Best shell-measure upper bound on ``beta_s``.

    A log-spaced grid in ``n`` times a linear grid in ``p`` seeds a
    Nelder-Mead polish in ``(p, log(n - 1))``. Grid ties go to the
    lexicographically smaller ``(p, n)``.
    """
    if search.grid < 1:
        raise SearchError("empty search grid")
    ps = np.linspace(*search.p_range, search.grid)
    ns = np.exp(np.linspace(math.log(search.n_range[0]), math.log(search.n_range[1]), search.grid))
    best = (math.inf, 0.0, 0.0)
    for p in ps:
        for n in ns:
            val = beta_quotient(p, n, s)
            if val < best[0]:
                best = (val, p, n)
    if not math.isfinite(best[0]):
        raise SearchError("no finite quotient on the grid")

    res = optimize.minimize(
        lambda z: beta_quotient(z[0], 1.0 + math.exp(z[1]), s),
        x0=[best[1], math.log(best[2] - 1.0)],
        method="Nelder-Mead",
        options={"maxiter": search.polish_iter, "xatol": 1e-10, "fatol": 1e-15},
    )
    if res.fun < best[0]:
        beta_up, p_star, n_star = float(res.fun), float(res.x[0]), 1.0 + math.exp(res.x[1])
    else:
        beta_up, p_star, n_star = best
    out = BetaUpperBound(s=float(s), beta_up=beta_up, b_num=1.0 / beta_up, p=p_star, n=n_star)
    if 1.0 < s <= 3.0 and out.b_num > b_of_s(s).b:
        raise AssertionError(f"numeric bound {out.b_num} exceeds b({s}); the sandwich is broken")
    return out
