"""Explicit constants: Lieb's sharp ``C_p``, the kinetic constants and their composites.

``C_p`` is the best constant in

    int |x|^p f  >=  C_p (int f)^(1 + 5p/6) / (int f^(5/3))^(p/2),

attained by ``f = (1 - |x|^p)_+^(3/2)``. The number 1.456 is the
Lieb-Thirring-type constant entering ``K_3`` and ``kappa``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import integrate

from .specfun import DomainError, gamma_fn

LT_CONSTANT = 1.456
SPIN_STATES = 2


def _check_p(p: float):
    if not 1.0 <= p <= 2.0:
        raise DomainError(f"p must lie in [1, 2], got {p}")


def lieb_constant(p: float) -> float:
    """``C_p`` from its Gamma-function closed form."""
    _check_p(p)
    a = 3.0 / p
    sqrt_pi = math.sqrt(math.pi)
    quintic = (15.0 * sqrt_pi / 8.0 * gamma_fn(a) / gamma_fn(a + 3.5)) ** (p / 2.0)
    moment = gamma_fn(a + 1.0) / gamma_fn(a + 3.5)
    mass = (sqrt_pi / 4.0 * gamma_fn(a + 1.0) / gamma_fn(a + 2.5)) ** (1.0 + 5.0 * p / 6.0)
    return 3.0 * sqrt_pi / 4.0 * (4.0 * math.pi) ** (-p / 3.0) / p ** (1.0 + p / 2.0) * quintic * moment / mass


def lieb_constant_integral(p: float) -> float:
    """``C_p`` by integrating the optimizer directly; an independent check of the closed form."""
    _check_p(p)
    opts = {"epsabs": 0.0, "epsrel": 1e-13, "limit": 200}
    mass = integrate.quad(lambda r: r * r * (1.0 - r**p) ** 1.5, 0.0, 1.0, **opts)[0]
    moment = integrate.quad(lambda r: r ** (2.0 + p) * (1.0 - r**p) ** 1.5, 0.0, 1.0, **opts)[0]
    quintic = integrate.quad(lambda r: r * r * (1.0 - r**p) ** 2.5, 0.0, 1.0, **opts)[0]
    shell = 4.0 * math.pi
    return (shell * moment) * (shell * quintic) ** (p / 2.0) / (shell * mass) ** (1.0 + 5.0 * p / 6.0)


def lieb_constant_p1_exact() -> float:
    """Closed form ``C_1 = 3^(5/3) 5^(5/6) (7/pi)^(1/3) / (22 sqrt(11))``."""
    return 3 ** (5 / 3) * 5 ** (5 / 6) * (7 / math.pi) ** (1 / 3) / (22 * math.sqrt(11))


def kappa() -> float:
    """``sqrt(5) (2 * 1.456 / (9 pi^2))^(1/3)``."""
    return math.sqrt(5.0) * (2.0 * LT_CONSTANT / (9.0 * math.pi**2)) ** (1.0 / 3.0)


def kinetic_K3() -> float:
    """``(3/5) (1.456 / (6 pi^2))^(-2/3)``."""
    return 0.6 * (LT_CONSTANT / (6.0 * math.pi**2)) ** (-2.0 / 3.0)


def ground_state_coeff(u: int = SPIN_STATES) -> float:
    """``A`` in the hydrogenic bound ``-E <= A Z^2 N^(1/3)`` for ``u`` spin states."""
    if u < 1:
        raise DomainError(f"u must be a positive integer, got {u}")
    return 0.5 * u ** (2.0 / 3.0) * 3.0 ** (1.0 / 3.0)


def kinetic_correction_coeff(s: float) -> float:
    """``(s^2 - 1)/8 C_{s-1}^(-1/(s-1)) kappa`` for ``2 <= s <= 3``."""
    if not 2.0 <= s <= 3.0:
        raise DomainError(f"s must lie in [2, 3], got {s}")
    p = s - 1.0
    return (s * s - 1.0) / 8.0 * lieb_constant(p) ** (-1.0 / p) * kappa()


@dataclass(frozen=True)
class ConstantsReport:
    p: float
    C_p: float
    C_p_inv_root: float
    kappa: float
    K3: float
    A_hyd: float
    c_composite: float


def constants_report(p: float = 1.0, u: int = SPIN_STATES) -> ConstantsReport:
    c_p = lieb_constant(p)
    return ConstantsReport(
        p=float(p),
        C_p=c_p,
        C_p_inv_root=c_p ** (-1.0 / p),
        kappa=kappa(),
        K3=kinetic_K3(),
        A_hyd=ground_state_coeff(u),
        c_composite=lieb_constant(2.0) ** -0.5 * kappa(),
    )
