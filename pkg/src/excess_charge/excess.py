"""Ionization bounds ``N_c(Z)`` and the constants their proofs optimize.

The explicit bounds are

    s = 2:  N_c < (sqrt(2)+1)/2 Z + 2.96 Z^(1/3)                          (Z >= 2)
    s = 3:  N_c < b(3) Z + 3.90 Z^(1/3) + 0.0134 + 0.184 Z^(-1/3)
                  + 0.0196 Z^(-2/3)                                       (Z >= 4)

and for general ``s`` the bound is the largest ``N`` satisfying

    N / b(s) <= Z (1 + A N^(-2/3)) (1 + (lam^2/2) N^(-2/3))
                + (1/lam + (s/3) lam^2 / b(s)) N^(1/3),

with ``lam = (3/(2s))^(1/3) b(s)^(1/3)`` and ``A`` the kinetic correction
coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy import optimize

from .constants import kinetic_correction_coeff
from .radial import b_of_s, beta_closed_form
from .specfun import DomainError

S2_CORRECTION = 2.96
S3_COEFFS = (3.90, 0.0134, 0.184, 0.0196)
S2_MAX_RATIO = 2.5
S3_MAX_RATIO = 2.5


class NoSolutionError(RuntimeError):
    """The implicit inequality holds on the whole search bracket."""


def lieb_bound(Z: float) -> float:
    return 2.0 * Z + 1.0


def nam_bound(Z: float) -> float:
    return 1.22 * Z + 3.0 * Z ** (1.0 / 3.0)


@dataclass(frozen=True)
class BoundBreakdown:
    """An evaluated bound ``total = sum coeff * Z^power`` with reference comparisons.

    ``flags`` carries side conditions of the derivation, such as the
    value of the localization radius for the general bound.
    """

    Z: float
    s: float
    leading_coeff: float
    terms: tuple
    total: float
    valid_from_Z: float
    comparisons: dict
    flags: dict = field(default_factory=dict)

    @property
    def max_particles(self) -> int:
        return math.floor(self.total)


def _breakdown(Z, s, terms, valid_from, flags=None) -> BoundBreakdown:
    total = math.fsum(c * Z**p for p, c in terms)
    return BoundBreakdown(
        Z=float(Z),
        s=float(s),
        leading_coeff=terms[0][1],
        terms=tuple(terms),
        total=total,
        valid_from_Z=valid_from,
        comparisons={"lieb": lieb_bound(Z), "nam": nam_bound(Z)},
        flags=flags or {},
    )


def b2_exact() -> float:
    return (math.sqrt(2.0) + 1.0) / 2.0


def b3_exact() -> float:
    return 1.0 / beta_closed_form(3)


def bound_s2(Z: float) -> BoundBreakdown:
    if Z < 2:
        raise DomainError(f"the s = 2 bound needs Z >= 2, got {Z}")
    return _breakdown(Z, 2.0, [(1.0, b2_exact()), (1.0 / 3.0, S2_CORRECTION)], 2.0)


def bound_s3(Z: float) -> BoundBreakdown:
    if Z < 4:
        raise DomainError(f"the s = 3 bound needs Z >= 4, got {Z}")
    a1, a2, a3, a4 = S3_COEFFS
    terms = [(1.0, b3_exact()), (1.0 / 3.0, a1), (0.0, a2), (-1.0 / 3.0, a3), (-2.0 / 3.0, a4)]
    return _breakdown(Z, 3.0, terms, 4.0)


def bound_general(Z: float, s: float) -> BoundBreakdown:
    """Solve the general-``s`` inequality for its largest admissible ``N`` on ``[Z, 3Z]``.

    Only ``2 <= s <= 3`` is admissible: the kinetic correction needs
    ``s >= 2`` and Lieb's constant is used with ``p = s - 1 <= 2``.
    The result is returned as ``b(s) Z + c_eff Z^(1/3)``; ``flags``
    records ``r = lam N^(-1/3)`` and whether ``r < 1`` and ``r < 0.5``.
    """
    if not 2.0 <= s <= 3.0:
        raise DomainError(f"the general bound is derived for 2 <= s <= 3, got {s}")
    if Z <= 0:
        raise DomainError("Z must be positive")
    b = b_of_s(s).b
    A = kinetic_correction_coeff(s)
    lam = (3.0 / (2.0 * s)) ** (1.0 / 3.0) * b ** (1.0 / 3.0)
    shift = 1.0 / lam + (s / 3.0) * lam**2 / b

    def excess(n):
        m = n ** (-2.0 / 3.0)
        return n / b - (Z * (1.0 + A * m) * (1.0 + 0.5 * lam**2 * m) + shift * n ** (1.0 / 3.0))

    lo, hi = Z, 3.0 * Z
    if excess(hi) <= 0.0:
        raise NoSolutionError(f"inequality holds on all of [Z, 3Z] for Z={Z}, s={s}")
    if excess(lo) > 0.0:
        n_star = lo
    else:
        n_star = optimize.brentq(excess, lo, hi, xtol=1e-13, rtol=1e-15)
    r = lam * n_star ** (-1.0 / 3.0)
    c_eff = (n_star - b * Z) / Z ** (1.0 / 3.0)
    flags = {"r": r, "r_lt_1": r < 1.0, "r_lt_half": r < 0.5, "lambda": lam, "A": A}
    return _breakdown(Z, s, [(1.0, b), (1.0 / 3.0, c_eff)], Z, flags)


@dataclass(frozen=True)
class ProofConstantS2:
    value: float
    argmax: float
    at_lower: float
    at_upper: float
    lam: float


def _maximize(fun, lo, hi):
    """Maximize a smooth scalar function on ``[lo, hi]``, checking both endpoints."""
    res = optimize.minimize_scalar(lambda x: -fun(x), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    cands = [(fun(lo), lo), (fun(hi), hi), (-res.fun, float(res.x))]
    return max(cands)


def proof_constant_s2(x_max: float = S2_MAX_RATIO, lam: float | None = None) -> ProofConstantS2:
    """Maximize ``lam/beta_2 x^(-2/3) + (9 beta_2 / 2)^(1/3) / beta_2 x^(1/3)`` over ``x = N/Z`` in ``[1, x_max]``."""
    beta2 = beta_closed_form(2)
    if lam is None:
        lam = kinetic_correction_coeff(2.0)

    def a(x):
        return lam / beta2 * x ** (-2.0 / 3.0) + (4.5 * beta2) ** (1.0 / 3.0) / beta2 * x ** (1.0 / 3.0)

    value, argmax = _maximize(a, 1.0, x_max)
    return ProofConstantS2(value=value, argmax=argmax, at_lower=a(1.0), at_upper=a(x_max), lam=lam)


@dataclass(frozen=True)
class ProofConstantsS3:
    a1: float
    a1_argmax: float
    a1_at_lower: float
    a2: float
    a3: float
    a4: float
    lambda_opt: float
    lambda_min_value: float
    x_range: tuple


def lambda_tradeoff(lam: float) -> float:
    return 1.0 / lam + 1.2 * lam**2


def a1_profile(x):
    """``3 (3/10)^(1/3) beta_3^(-2/3) x^(1/3) + c beta_3^(-1) x^(-2/3)`` with ``x = N/Z``."""
    beta3 = beta_closed_form(3)
    c = kinetic_correction_coeff(3.0)
    return 3.0 * 0.3 ** (1.0 / 3.0) * beta3 ** (-2.0 / 3.0) * x ** (1.0 / 3.0) + c / beta3 * x ** (-2.0 / 3.0)


def proof_constant_s3(x_max: float = S3_MAX_RATIO) -> ProofConstantsS3:
    """Constants of the ``s = 3`` bound.

    ``a1`` is the supremum of ``a1_profile`` over ``x = N/Z`` in
    ``[1/beta_3, x_max]``; ``a1_at_lower`` is its value at ``x = 1/beta_3``.
    The optimal radius scale ``lambda_opt`` is found by 1-D minimization.
    """
    beta3 = beta_closed_form(3)
    c = kinetic_correction_coeff(3.0)
    lo = 1.0 / beta3
    a1, a1_arg = _maximize(a1_profile, lo, x_max)
    res = optimize.minimize_scalar(lambda_tradeoff, bounds=(0.1, 3.0), method="bounded", options={"xatol": 1e-12})
    return ProofConstantsS3(
        a1=a1,
        a1_argmax=a1_arg,
        a1_at_lower=a1_profile(lo),
        a2=1.0 / (84.0 * beta3),
        a3=c / 5.0 * (5.0 / 12.0) ** (2.0 / 3.0) * beta3 ** (-1.0 / 3.0),
        a4=c * beta3 ** (-1.0 / 3.0) / 84.0,
        lambda_opt=float(res.x),
        lambda_min_value=float(res.fun),
        x_range=(lo, x_max),
    )


def compare_bounds(Z: float) -> dict:
    """Every applicable bound at ``Z`` and the label of the smallest."""
    if Z < 1:
        raise DomainError(f"Z must be at least 1, got {Z}")
    table = {"lieb": lieb_bound(Z), "nam": nam_bound(Z)}
    if Z >= 2:
        table["ours_s2"] = bound_s2(Z).total
    if Z >= 4:
        table["ours_s3"] = bound_s3(Z).total
    table["best"] = min((v, k) for k, v in table.items())[1]
    return table


def crossovers() -> dict:
    """Charges where the ``s = 2`` bound beats Lieb's and the ``s = 3`` bound beats ``s = 2``."""
    s2_vs_lieb = optimize.brentq(lambda z: bound_s2(z).total - lieb_bound(z), 2.0, 100.0, xtol=1e-12)
    s3_vs_s2 = optimize.brentq(lambda z: bound_s3(z).total - bound_s2(z).total, 4.0, 1000.0, xtol=1e-12)
    return {"s2_vs_lieb": s2_vs_lieb, "s3_vs_s2": s3_vs_s2}
