"""Remainders of the prime-reciprocal sums and Euler products on a log grid, as CSV.

usage: python scripts/mertens_envelopes.py [--limit 10000000] [--points 200] > mertens.csv
"""
import argparse
import csv
import math
import sys

import numpy as np

from abundancy.mertens import euler_product_grid, prime_sum_grid
from abundancy.primes import build_table


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--limit", type=int, default=10**7)
    ap.add_argument("--points", type=int, default=200)
    args = ap.parse_args()
    table = build_table(args.limit)
    xs = np.minimum(np.exp(np.linspace(math.log(286), math.log(args.limit), args.points)), args.limit)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["series", "envelope", "x", "empirical", "main_term", "residual", "bound", "within"])
    runs = [("inv_p", env, prime_sum_grid(table, xs, "inv_p", env)) for env in ("corrected", "printed")]
    runs += [(v, "corrected", prime_sum_grid(table, xs, v)) for v in ("inv_p_minus_1", "inv_p_plus_1")]
    runs += [(v, "product", euler_product_grid(table, xs, v)) for v in ("one_minus", "p_over_pm1", "one_plus")]
    for name, env, samples in runs:
        for s in samples:
            w.writerow([name, env, f"{s.x:.6g}", f"{s.empirical:.15g}", f"{s.main_term:.15g}",
                        f"{s.residual:.6e}", f"{s.envelope:.6e}", s.within])
        fails = [s.x for s in samples if not s.within]
        print(f"{name:14s} {env:10s} fails={len(fails):3d}"
              + (f" largest failing x={max(fails):.0f}" if fails else ""), file=sys.stderr)


if __name__ == "__main__":
    main()
