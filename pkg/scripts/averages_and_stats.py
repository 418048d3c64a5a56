"""Average orders, Erdos-Kac KS distances, limsup trackers and r4 exceptions.

usage: python scripts/averages_and_stats.py [--limit 1000000]
"""
import argparse

import numpy as np

from abundancy.foursquares import r4_odd_exceptions
from abundancy.stats import average_order, erdos_kac, limsup_tracker, normal_order_fraction


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--limit", type=int, default=10**6)
    args = ap.parse_args()
    L = args.limit

    print("average orders")
    for x in (10**3, 10**4, 10**5, L):
        for fn in ("sigma0", "sigma_s", "phi", "omega"):
            r = average_order(x, fn)
            alt = "; ".join(f"{k}: {v[1]:.4g}" for k, v in r.alternatives.items())
            print(f"  x={x:<8d} {r.fn:8s} sum={r.empirical_sum:<16d} residual={r.residual:<12.4g} {alt}")

    print("Erdos-Kac")
    x = 10**3
    while x <= L:
        print(f"  x={x:<9d} KS={erdos_kac(x)['ks_distance']:.4f}")
        x *= 10

    print("limsup trackers")
    for cls in ("all", "odd", "squarefree"):
        t = limsup_tracker(L, cls)
        print(f"  {cls:10s} sup sigma/(n loglog n)={t['sup_sigma']:.4f} at {t['argmax_sigma']} "
              f"(limit {t['theory_sigma']:.4f}); sup n/(phi loglog n)={t['sup_phi']:.4f}")
    print(f"normal order fractions (band 1.5): {normal_order_fraction(L, 1.5)}")

    exc, margin = r4_odd_exceptions(L)
    tail = exc[exc > L // 2]
    print(f"odd r4 exceptions in [17, {L}]: {len(exc)}, largest {exc[-1]}, "
          f"{len(tail)} in the upper half of the range")
    print(f"  min margin (bound - r4) among odd n: {np.min(margin):.4g}")


if __name__ == "__main__":
    main()
