import math

import numpy as np
import pytest

from excess_charge.constants import (
    constants_report,
    ground_state_coeff,
    kappa,
    kinetic_correction_coeff,
    kinetic_K3,
    lieb_constant,
    lieb_constant_integral,
    lieb_constant_p1_exact,
)
from excess_charge.specfun import DomainError

P_GRID = np.linspace(1.0, 2.0, 20)


def test_lieb_constant_values():
    assert 2.340 < 1 / lieb_constant(1.0) < 2.342
    assert 1 / lieb_constant(1.0) == pytest.approx(2.341, abs=5e-4)
    c2 = lieb_constant(2.0) ** -0.5
    assert 2.215 < c2 < 2.216
    assert c2 == pytest.approx(4 * math.pi ** (2 / 3) / math.sqrt(15), rel=1e-13)
    assert lieb_constant(1.0) == pytest.approx(lieb_constant_p1_exact(), rel=1e-13)


@pytest.mark.parametrize("p", P_GRID)
def test_gamma_form_matches_integrals(p):
    assert lieb_constant(p) == pytest.approx(lieb_constant_integral(p), rel=1e-9)


def test_inverse_root_decreasing():
    vals = [lieb_constant(p) ** (-1 / p) for p in P_GRID]
    assert np.all(np.diff(vals) < 0)


def test_kinetic_constants():
    assert kappa() == pytest.approx(0.7156, abs=5e-4)
    assert 7.095 < kinetic_K3() < 7.097
    assert kinetic_K3() == pytest.approx(7.096, abs=5e-4)
    lam = 3 / 8 / lieb_constant(1.0) * kappa()
    assert abs(lam - 0.6284) <= 1e-3
    assert kinetic_correction_coeff(2.0) == pytest.approx(lam, rel=1e-14)
    c = kinetic_correction_coeff(3.0)
    assert c == pytest.approx(lieb_constant(2.0) ** -0.5 * kappa(), rel=1e-14)
    assert c < 1.5855
    mid = kinetic_correction_coeff(2.5)
    assert lam < mid < c


def test_ground_state_coeff():
    assert ground_state_coeff(2) == pytest.approx(1.5 ** (1 / 3), abs=1e-12)
    assert ground_state_coeff(2) == pytest.approx(12 ** (1 / 3) / 2, abs=1e-12)
    assert ground_state_coeff(1) == pytest.approx(3 ** (1 / 3) / 2, abs=1e-15)
    assert ground_state_coeff(1) < ground_state_coeff(2) < ground_state_coeff(3)
    with pytest.raises(DomainError):
        ground_state_coeff(0)


def test_report_intervals():
    rep = constants_report()
    assert 2.340 < rep.C_p_inv_root < 2.342
    assert 7.095 < rep.K3 < 7.097
    assert rep.c_composite < 1.5855
    assert rep.A_hyd == pytest.approx(1.5 ** (1 / 3), abs=1e-12)


def test_domains():
    for p in (0.5, 2.5):
        with pytest.raises(DomainError):
            lieb_constant(p)
    with pytest.raises(DomainError):
        kinetic_correction_coeff(1.5)
