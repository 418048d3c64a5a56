"""Misprinted formulas detected by the checks, each with live evidence.

Every entry states the printed form, the reading that the computations
support, and a short evidence string produced by running the relevant
check at a small scale.
"""
from dataclasses import dataclass
from fractions import Fraction
import math

import numpy as np

from . import constants as C
from .arith import factor_int, identity_suite, phi
from .extremal import _best_exponent
from .foursquares import r4_odd_exceptions
from .mertens import (b_series_log_zeta, b_series_printed, euler_product_grid, fit_ap_slope,
                      prime_sum_grid)
from .primes import build_table
from .stats import average_order


@dataclass(frozen=True)
class Erratum:
    name: str
    printed: str
    corrected: str
    evidence: str
    confirmed: bool


def _identity_erratum(name, key, n, printed, corrected):
    rep = identity_suite(factor_int(n))
    ok_corr = rep[key.replace("_printed", "")].holds if key.replace("_printed", "") in rep else True
    fails = not rep[key].holds
    return Erratum(name, printed, corrected,
                   f"printed form fails at N={n}; corrected form holds={ok_corr}", fails and ok_corr)


def printed_ca_exponent(p, eps):
    """ceil(log_p(p^(1+eps) - 1) / log_p(p^eps - 1)) - 1, as printed."""
    num = math.log(p ** (1 + eps) - 1, p)
    den = math.log(p**eps - 1, p)
    return math.ceil(num / den) - 1


def collect(limit=10**6):
    """Run every erratum check with prime and sieve tables up to ``limit``."""
    out = []
    out.append(_identity_erratum(
        "abundancy via rho", "abundancy_totient_rho_printed", 12,
        "sigma(N)/phi(N) = (N/phi(N)) rho(N)", "sigma(N)/N = (N/phi(N)) rho(N)"))

    # totient bound: the printed main term carries an extra factor N
    F = factor_int(223092870)
    ll = math.log(F.log)
    ratio = F.value / phi(F)
    corrected = C.EXP_GAMMA * ll + 2.5 / ll
    printed = C.EXP_GAMMA * F.value * ll + 2.5 / ll
    out.append(Erratum(
        "totient upper bound main term", "N/phi(N) < e^g N loglog N + 5/(2 loglog N)",
        "N/phi(N) < e^g loglog N + 2.5/loglog N",
        f"at N=223092870 ratio={ratio:.6f}, corrected rhs={corrected:.6f} (the single exception), "
        f"printed rhs={printed:.3e} (vacuous)", ratio > corrected and printed > 1e6))

    table = build_table(max(limit, 10**5))
    xs = np.minimum(np.exp(np.linspace(math.log(286), math.log(table.limit), 200)), table.limit)
    samples = {v: prime_sum_grid(table, xs, "inv_p", v) for v in ("corrected", "printed")}
    fails = {v: sum(not s.within for s in ss) for v, ss in samples.items()}
    late = sum(not s.within for s in samples["corrected"] if s.x >= 10372)
    out.append(Erratum(
        "prime reciprocal envelope denominator",
        "1/(10 log^2 x) + 4/(15 log^2 x)", "1/(10 log^2 x) + 4/(15 log^3 x), for x >= 10372",
        f"failures on 200 log-spaced x in [286, {table.limit}]: corrected={fails['corrected']}, "
        f"printed={fails['printed']}; corrected failures at x >= 10372: {late}",
        late == 0))

    bp, bl = b_series_printed(), b_series_log_zeta()
    out.append(Erratum(
        "Mertens constant series", "B = gamma + sum mu(n) zeta(n)/n",
        "B = gamma + sum mu(n) log(zeta(n))/n",
        f"printed series={bp:.6f}, log-zeta series={bl:.12f}, B={C.MERTENS_B:.12f}",
        abs(bl - C.MERTENS_B) < 1e-9 and abs(bp - C.MERTENS_B) > 0.1))

    row = average_order(limit, "phi")
    alt = row.alternatives["3/pi^2"][1]
    out.append(Erratum(
        "totient summatory constant", "sum phi(n) = (6/pi^2) x^2 + O(x log x)",
        "sum phi(n) = (3/pi^2) x^2 + O(x log x)",
        f"x={limit}: sum/x^2={row.fitted_constant:.6f}, residual 6/pi^2={row.residual:.4g}, "
        f"residual 3/pi^2={alt:.4g}", abs(alt) * 10 < abs(row.residual)))

    row = average_order(limit, "omega")
    alt = row.alternatives["x loglog x + Bx"][1]
    out.append(Erratum(
        "omega summatory main term", "sum omega(n) = x log x + cx",
        "sum omega(n) = x loglog x + Bx + O(x/log x)",
        f"x={limit}: residual printed={row.residual:.4g}, residual classical={alt:.4g}",
        abs(alt) * 10 < abs(row.residual)))

    exc, _ = r4_odd_exceptions(limit)
    out.append(Erratum(
        "four-square bound threshold", "r4(N) < 4 e^g N loglog N for odd N > 15",
        "no finite threshold observed: 8 sigma(N) reaches the bound along odd abundant N",
        f"{len(exc)} odd exceptions in [17, {limit}], first={exc[0] if len(exc) else None}, "
        f"largest={exc[-1] if len(exc) else None}", len(exc) > 0 and exc[0] == 17))

    grid = [(p, e) for p in (2, 3, 5, 7) for e in (0.05, 0.1, 0.2, 0.5)]
    bad = [(p, e, printed_ca_exponent(p, e), _best_exponent(p, e)) for p, e in grid
           if printed_ca_exponent(p, e) != _best_exponent(p, e)]
    out.append(Erratum(
        "colossally abundant exponent", "ceil(log_p(p^(1+e) - 1) / log_p(p^e - 1)) - 1",
        "floor(log_p((p^(1+e) - 1)/(p^e - 1))) - 1",
        f"printed form disagrees with the argmax at {len(bad)}/{len(grid)} grid points, "
        f"e.g. (p, eps, printed, argmax)={bad[0] if bad else None}", len(bad) > 0))

    # smaller items found along the way
    ab = Fraction(28, 12)
    ll = math.log(math.log(12))
    rhs = C.EXP_GAMMA * ll + C.ROBIN_UNCONDITIONAL_C / ll
    out.append(Erratum(
        "unconditional Robin constant", "0.6482", "0.6482136... (published rounding 0.6483)",
        f"N=12: sigma/N={float(ab):.8f} > rhs={rhs:.8f}; with 0.6483 rhs="
        f"{C.EXP_GAMMA * ll + C.ROBIN_PUBLISHED_C / ll:.8f}", float(ab) > rhs))

    slope, _, one_q, one_phi = fit_ap_slope(1, 4, np.exp(np.linspace(math.log(1e3), math.log(1e6), 40)))
    out.append(Erratum(
        "harmonic sum in a progression", "sum 1/n over n = a mod q is log(x)/phi(q) + c",
        "log(x)/q + c", f"q=4: fitted slope={slope:.5f}, 1/q={one_q}, 1/phi(q)={one_phi}",
        abs(slope - one_q) < abs(slope - one_phi)))

    prod = euler_product_grid(table, xs, "one_plus")
    worst = max(abs(s.residual) / s.envelope for s in prod)
    out.append(Erratum(
        "product of (1 + 1/p) error term", "O(1/(x log x))", "O(1/log x) (as for the other products)",
        f"max |residual| / (1/(x log x)) on the grid = {worst:.3g}", worst > 1))

    for name, key, n, printed, corrected in [
            ("reciprocal divisor sum", "reciprocal_divisor_sum_printed", 6,
             "sigma(N) = sum_{d|N} 1/d", "sigma(N)/N = sum_{d|N} 1/d"),
            ("divisor sum recursion", "sigma_prime_recursion_printed", 12,
             "sigma_s(N) = sigma_s(N) sigma_s(p) - p^s sigma_s(N/p)",
             "sigma_s(Np) = sigma_s(N) sigma_s(p) - p^s sigma_s(N/p)"),
            ("normalised divisor-power bound", "unnormalized_product_bound_printed", 12,
             "sigma_s(N) < prod p^s/(p^s - 1)", "sigma_s(N)/N^s < prod p^s/(p^s - 1)"),
            ("totient divisor sum", "totient_divisor_sum_printed", 12,
             "phi(N) = sum_{d|N} phi(d)", "N = sum_{d|N} phi(d)"),
            ("Jordan inversion", "jordan_mobius_printed", 12,
             "N^s = sum mu(N/d) J_s(d)", "J_s(N) = sum mu(N/d) d^s"),
            ("N/phi(N) squarefree expansion", "totient_ratio_squarefree_sum_printed", 6,
             "N/phi(N) = (m/mu(m)) sum 1/phi(d)", "N/phi(N) = m sum 1/phi(d)")]:
        rep = identity_suite(factor_int(n))
        corr_key = {"reciprocal_divisor_sum_printed": None,
                    "sigma_prime_recursion_printed": "sigma_prime_recursion",
                    "unnormalized_product_bound_printed": "normalized_product_bound",
                    "totient_divisor_sum_printed": "totient_divisor_sum",
                    "jordan_mobius_printed": "jordan_identities",
                    "totient_ratio_squarefree_sum_printed": "totient_ratio_squarefree_sum"}[key]
        corr_ok = rep[corr_key].holds if corr_key else True
        out.append(Erratum(name, printed, corrected,
                           f"printed form fails at N={n}; corrected form holds={corr_ok}",
                           (not rep[key].holds) and corr_ok))
    return out
