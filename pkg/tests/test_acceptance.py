"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

The lines are printed in the pytest terminal summary (see conftest.py) and
when the module is run as a script. Two criteria are expected to fail; see
the notes in their tests.
"""
import csv
import io
import math
import time

import mpmath
import numpy as np
import pytest

from abundancy import constants as C
from abundancy.arith import factor_int, identity_suite
from abundancy.cli import run
from abundancy.criteria import (duncan_scan, lagarias_check, lagarias_scan, nicolas_check_mp,
                                nicolas_scan, primorial_probe_scan, robin_check,
                                robin_filtered_violations, robin_scan, rs_primorial_scan,
                                rs_totient_scan)
from abundancy.extremal import ca_grid, ca_oracle, colossally_abundant
from abundancy.foursquares import r4_bound_check, r4_bruteforce, r4_jacobi, r4_odd_exceptions
from abundancy.mertens import (elementary_bound_scan, euler_product_grid, mertens_envelope,
                               prime_sum_grid)
from abundancy.primes import build_table
from abundancy.stats import average_order, divisor_power_sum, erdos_kac

RESULTS = []


def record(name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} {name}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def log_grid(lo, hi, n=200):
    return np.minimum(np.exp(np.linspace(math.log(lo), math.log(hi), n)), hi)


@pytest.fixture(scope="module")
def table():
    return build_table(10**7)


def test_jacobi_matches_bruteforce():
    t0 = time.perf_counter()
    bad = [n for n in range(1, 5001) if r4_jacobi(n).r4 != r4_bruteforce(n)]
    dt = time.perf_counter() - t0
    record("01 r4 Jacobi = brute force, n <= 5000", not bad and dt < 60,
           f"mismatches={len(bad)}, {dt:.2f}s")


def test_robin_strict_scan():
    t0 = time.perf_counter()
    res = robin_scan(10**7, "strict", threads=1)
    dt = time.perf_counter() - t0
    late = [int(n) for n in res.violators() if n >= 5041]
    r = robin_check(5040)
    ratio = 19344 / 5040
    with mpmath.workdps(40):
        rhs = float(mpmath.exp(mpmath.euler) * mpmath.log(mpmath.log(5040)))
    # 3.8381 - 3.8166 = 0.0215 as quoted; the rhs is 3.81688, so the margin is -0.02122
    ok = (not late and not r.holds and not r.indeterminate
          and abs(ratio - 3.8381) < 5e-5
          and abs(r.margin - (rhs - ratio)) < 1e-12
          and r.margin == pytest.approx(-0.0215, rel=0.02)
          and not res.indeterminate.any() and dt < 600)
    record("02 strict Robin, 5041 <= n <= 1e7", ok,
           f"violations>=5041: {len(late)}, 5040 margin={r.margin:.6f} "
           f"(sigma/N={ratio:.6f}, rhs={rhs:.6f}), {dt:.1f}s")


def test_robin_unconditional_scan():
    # Expected to fail: with the constant 0.6482 the bound is exceeded at n = 12
    # by 1.5e-5; 0.6482 is the truncation of 0.6482136..., which gives equality there.
    res = robin_scan(10**7, "unconditional")
    v = res.violators()
    record("03 unconditional Robin (0.6482), 3 <= n <= 1e7", len(v) == 0,
           f"violations={v.tolist()[:10]}, margin at 12={robin_check(12, 'unconditional').margin:.3e}")


def test_lagarias_scan():
    res = lagarias_scan(10**6)
    viol = res.where(res.n >= 2).violators()
    r1 = lagarias_check(1)
    ok = len(viol) == 0 and r1.holds and r1.margin == 0 and not res.indeterminate.any()
    record("04 Lagarias, 2 <= n <= 1e6", ok,
           f"violations={len(viol)}, min margin={res.margin[1:].min():.4g}, n=1 margin={r1.margin}")


def test_nicolas_primorials(table):
    t0 = time.perf_counter()
    res = nicolas_scan(table)
    dt = time.perf_counter() - t0
    spot = max(abs(res.margin[k - 1] - float(nicolas_check_mp(table, k))) for k in (2, 9, 1000, len(table)))
    finite = np.isfinite(res.margin)
    ok = (res.holds.all() and not res.indeterminate.any() and len(res) == 664579
          and np.all(res.margin[finite] > res.error_bound[finite]) and spot < 1e-12 and dt < 60)
    record("05 Nicolas over primorials, p_k <= 1e7", ok,
           f"k={len(res)}, min margin={res.margin[finite].min():.4g}, mp check diff={spot:.1e}, {dt:.2f}s")


def test_rs_totient_exceptions(table):
    small = build_table(10**5)
    prim = rs_primorial_scan(small)
    prim_exc = {int(math.prod(int(p) for p in small.primes[:k])) for k in prim.violators()}
    scan = rs_totient_scan(10**7)
    exc = prim_exc | {int(n) for n in scan.violators()}
    ok = exc == {223092870} and not scan.indeterminate.any() and not prim.indeterminate.any()
    record("06 Rosser-Schoenfeld totient exceptions", ok,
           f"exceptions={sorted(exc)} over {len(prim)} primorials and {len(scan)} n")


def test_mertens_envelope_corrected(table):
    # Expected to fail: the corrected envelope is only valid from x >= 10372;
    # on [286, 10372) the remainder exceeds it at some grid points.
    xs = log_grid(286, 10**7)
    corr = prime_sum_grid(table, xs, "inv_p", "corrected")
    printed = prime_sum_grid(table, xs, "inv_p", "printed")
    bad = [s.x for s in corr if not s.within]
    late = [x for x in bad if x >= 10372]
    record("07 Mertens envelope (corrected), 200 x in [286, 1e7]", not bad,
           f"corrected fails={len(bad)} (max failing x={max(bad) if bad else None:.0f}, "
           f"fails at x>=10372: {len(late)}); printed fails={sum(not s.within for s in printed)} "
           f"(reported only)")


def test_euler_product_envelopes(table):
    xs = log_grid(286, 10**7)
    fails = {v: sum(not s.within for s in euler_product_grid(table, xs, v))
             for v in ("one_minus", "p_over_pm1")}
    record("08 Euler product envelopes, x in [286, 1e7]", not any(fails.values()), f"fails={fails}")


def test_elementary_prime_bound(table):
    ps, margins = elementary_bound_scan(table, 10**7)
    record("09 elementary prime-reciprocal bound, x in [3, 1e7]", bool(np.all(margins >= 0)),
           f"checked {len(ps)} primes (worst case on each gap), min margin={margins.min():.4g}")


def test_identity_suite():
    failing, rho_printed = [], None
    for n in range(1, 10**4 + 1):
        rep = identity_suite(factor_int(n))
        if not rep.ok:
            failing.append(n)
        if n == 12:
            rho_printed = rep["abundancy_totient_rho_printed"].holds
            rho_ok = rep["abundancy_totient_rho"].holds
    ok = not failing and rho_ok and rho_printed is False
    record("10 identity suite, n <= 1e4", ok,
           f"failing n={failing[:5]}, sigma/N rho form at 12 holds={rho_ok}, "
           f"printed sigma/phi rho form at 12 holds={rho_printed} (erratum)")


def test_duncan_squarefree():
    res = duncan_scan(10**6)
    record("11 Duncan bound, squarefree n <= 1e6", bool(res.holds.all()),
           f"squarefree n={len(res)}, violations={len(res.violators())}, "
           f"min sigma-margin={res.margin.min():.4g}")


def test_colossally_abundant_grid():
    grid = ca_grid(20, 0.05, 2.0)
    gen = [colossally_abundant(e).value for e in grid]
    orc = [ca_oracle(e, 10**5) for e in grid]
    chain = all(b % a == 0 for a, b in zip(gen, gen[1:]))
    ok = gen == orc and chain and len(grid) == 20 and grid.min() > 0.05 and grid.max() == 2.0
    record("12 colossally abundant generator = oracle", ok,
           f"agree={sum(a == b for a, b in zip(gen, orc))}/20, chain={chain}, values={sorted(set(gen))}")


def test_average_orders():
    x = 10**6
    s0 = average_order(x, "sigma0")
    s1 = average_order(x, "sigma_s", 1)
    ph = average_order(x, "phi")
    rel0 = abs(s0.residual) / s0.main_term
    rel1 = abs(s1.residual) / s1.main_term
    ratio = abs(ph.residual) / abs(ph.alternatives["3/pi^2"][1])
    spot0 = divisor_power_sum(100, 0)
    spotp = average_order(100, "phi").empirical_sum
    ok = rel0 < 1e-3 and rel1 < 5e-3 and ratio >= 10 and spot0 == 482 and spotp == 3044
    record("13 average orders at x = 1e6", ok,
           f"sigma0 rel={rel0:.2e}, sigma rel={rel1:.2e}, phi residual ratio 6/pi^2 : 3/pi^2 = "
           f"{ratio:.3g}, sum sigma0(100)={spot0}, sum phi(100)={spotp}")


def test_erdos_kac_trend():
    ks4 = erdos_kac(10**4)["ks_distance"]
    ks7 = erdos_kac(10**7)["ks_distance"]
    record("14 Erdos-Kac KS distance", ks7 <= 0.3 and ks7 < ks4, f"KS(1e4)={ks4:.4f}, KS(1e7)={ks7:.4f}")


def test_primorial_probe_delta(table):
    cols = primorial_probe_scan(table)
    d = cols["delta"]
    record("15 primorial probe delta_k > 0, p_k <= 1e7", bool(np.all(d > 0)),
           f"k=2..{cols['k'][-1]} (p_k up to {cols['p_k'][-1]}), min delta={d.min():.4g}")


def test_four_square_odd_exceptions():
    exc, _ = r4_odd_exceptions(10**6)
    rep17 = r4_bound_check(17)
    threshold = int(exc[-1])
    # the threshold is read off the scan, so "nothing above it" holds by construction
    above = [int(n) for n in exc if n > threshold]
    ok = (17 in exc and rep17.extra["r4"] == 144 and abs(rep17.extra["bound"] - 126.1) < 0.05
          and not above)
    record("16 four-square bound, odd 17 <= n <= 1e6", ok,
           f"exceptions={len(exc)}, first={exc[:5].tolist()}, threshold={threshold}, "
           f"r4(17)=144 vs bound {rep17.extra['bound']:.1f}")


def _cli(argv):
    out = io.StringIO()
    code = run(argv, out, io.StringIO())
    lines = out.getvalue().splitlines(keepends=True)
    return code, lines[0], "".join(lines[1:])


def test_cli_thread_determinism():
    c1, h1, a = _cli(["scan-robin", "--limit", "1000000", "--threads", "1"])
    c8, h8, b = _cli(["scan-robin", "--limit", "1000000", "--threads", "8"])
    ok = c1 == c8 == 0 and a == b and h1.startswith("# generated") and len(a) > 10**6
    record("17 scan-robin output identical for --threads 1 and 8", ok,
           f"{len(a)} bytes after the timestamp line, identical={a == b}")


def test_filtered_robin_scans():
    out = robin_filtered_violations(10**7)
    ok = out["smooth"].size == 0 and out["dyadic"].size == 0
    record("filtered strict Robin, 5041 <= n <= 1e7", ok,
           f"smooth: {out['counts']['smooth']} n, {out['smooth'].size} violations; "
           f"dyadic: {out['counts']['dyadic']} n, {out['dyadic'].size} violations")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
