"""Recompute the constants of the s = 2 and s = 3 bounds and show where a1 peaks."""

import numpy as np

from excess_charge.constants import constants_report
from excess_charge.excess import a1_profile, crossovers, proof_constant_s2, proof_constant_s3
from excess_charge.reference import load_reference


def main():
    ceil = load_reference()["proof_ceilings"]
    rep = constants_report()
    print(f"C_1^-1 = {rep.C_p_inv_root:.7f}  kappa = {rep.kappa:.7f}  K3 = {rep.K3:.7f}  c = {rep.c_composite:.7f}")
    s2 = proof_constant_s2()
    print(f"a (s=2)  = {s2.value:.7f} at x = {s2.argmax:g}   published ceiling {ceil['a_s2']}")
    s3 = proof_constant_s3()
    for name in ("a2", "a3", "a4"):
        print(f"{name}       = {getattr(s3, name):.7f}   published ceiling {ceil[name]}")
    print(f"a1       = {s3.a1:.7f} at x = {s3.a1_argmax:.4f}   published ceiling {ceil['a1']}")
    print(f"a1(1/beta_3) = {s3.a1_at_lower:.7f}")
    print(f"a1 with x <= 2.25 (Z >= 4): {proof_constant_s3(x_max=2.25).a1:.7f}")
    print("a1(x) profile:")
    for x in np.linspace(*s3.x_range, 9):
        print(f"  x = {x:.4f}  a1 = {a1_profile(x):.6f}")
    print(f"lambda_opt = {s3.lambda_opt:.7f}, minimum {s3.lambda_min_value:.7f}")
    print("crossovers:", {k: round(v, 4) for k, v in crossovers().items()})


if __name__ == "__main__":
    main()
