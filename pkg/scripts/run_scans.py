"""Robin, Lagarias, totient, Nicolas and Duncan scans with a one-line summary each.

usage: python scripts/run_scans.py [--limit 10000000] [--threads 4]
"""
import argparse
import time

import numpy as np

from abundancy.criteria import (duncan_scan, lagarias_scan, nicolas_scan, robin_filtered_violations,
                                robin_scan, rs_primorial_scan, rs_totient_scan)
from abundancy.primes import build_table


def timed(label, fn):
    t0 = time.perf_counter()
    out = fn()
    print(f"{label:<34s} {time.perf_counter() - t0:7.2f}s  ", end="")
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--limit", type=int, default=10**7)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    L = args.limit

    res = timed("robin strict", lambda: robin_scan(L, threads=args.threads))
    print(f"violators={res.violators().tolist()}")
    res = timed("robin unconditional (0.6482)", lambda: robin_scan(L, "unconditional", threads=args.threads))
    print(f"violators={res.violators().tolist()}")
    out = timed("robin filtered (n >= 5041)", lambda: robin_filtered_violations(L))
    print(f"admitted={out['counts']}, violators smooth={out['smooth'].size} dyadic={out['dyadic'].size}")
    res = timed("lagarias", lambda: lagarias_scan(min(L, 10**6), threads=args.threads))
    print(f"violators={res.violators().tolist()}, min margin={res.margin[1:].min():.4g}")
    res = timed("totient (all n)", lambda: rs_totient_scan(L, threads=args.threads))
    print(f"violators={res.violators().tolist()}")
    res = timed("duncan (squarefree n)", lambda: duncan_scan(min(L, 10**6), threads=args.threads))
    print(f"scanned={len(res)}, violators={res.violators().size}")

    table = build_table(L)
    res = timed("nicolas (primorials)", lambda: nicolas_scan(table))
    fin = np.isfinite(res.margin)
    print(f"k={len(res)}, min margin={res.margin[fin].min():.4g} at k={int(res.n[fin][np.argmin(res.margin[fin])])}")
    res = timed("totient (primorials)", lambda: rs_primorial_scan(build_table(min(L, 10**5))))
    print(f"exceptions at k={res.violators().tolist()}")


if __name__ == "__main__":
    main()
