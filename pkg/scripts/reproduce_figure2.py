"""Regenerate b(s) and the numeric bound b_num(s) on the 30-point s grid."""

from excess_charge.radial import FIGURE2_S_GRID, b_of_s, beta_upper_bound
from excess_charge.reference import load_reference


def main():
    rows = load_reference()["figure2"]
    print(f"{'s':>9} {'b':>9} {'b_num':>9} {'d b':>9} {'d b_num':>9} {'gap %':>6} {'p*':>7} {'n*':>7}")
    for s, row in zip(FIGURE2_S_GRID, rows):
        b = b_of_s(s).b
        up = beta_upper_bound(s)
        print(
            f"{s:9.6f} {b:9.6f} {up.b_num:9.6f} {b - row['b']:+9.1e} {up.b_num - row['b_num']:+9.1e}"
            f" {100 * (b - up.b_num) / b:6.2f} {up.p:7.3f} {up.n:7.3f}"
        )


if __name__ == "__main__":
    main()
