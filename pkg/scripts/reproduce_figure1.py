"""Regenerate the alpha(N, s) grid and compare it with the published table."""

import argparse
import time

from excess_charge.reference import load_reference
from excess_charge.variational import NoConvergenceError, minimize_alpha


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()
    table = load_reference()["figure1_alpha"]
    t0 = time.perf_counter()
    print(f"{'s':>5} {'N':>3} {'ours':>9} {'published':>9} {'diff':>9}  note")
    for s_key, column in table.items():
        for n_key, published in column.items():
            note = ""
            try:
                res = minimize_alpha(int(n_key), float(s_key), seed=args.seed, workers=args.workers)
            except NoConvergenceError as exc:
                res, note = exc.result, "no start converged"
            if res.restarts_disagree:
                note = (note + "; " if note else "") + "single start reached best"
            print(f"{float(s_key):5.2f} {int(n_key):3d} {res.value:9.6f} {published:9.6f} {res.value - published:+9.2e}  {note}")
    print(f"total {time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
