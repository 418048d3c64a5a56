"""Inequality criteria for sigma(N)/N and N/phi(N), single-N and range scans.

Single-integer checkers compare an exact ``Fraction`` against a certified
interval for the transcendental side; a verdict is only issued when the
whole interval lies on one side. Huge factored inputs are compared in log
space with an explicit error bound, escalating to exact evaluation when the
margin falls inside it.

Range scans work on the vectorised tables from :mod:`abundancy.sieve`,
flag float margins below their rounding bound as indeterminate, and settle
those entries with the exact checker.
"""
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
import math
from typing import NamedTuple

import mpmath
import numpy as np

from . import constants as C
from .arith import (FactoredInteger, abundancy, factor_int, log_abundancy,
                    log_n_over_phi, log_space_error, phi, sigma)
from .errors import DomainError, PreconditionError, RangeError
from .mertens import mertens_envelope, prime_cumulative, tail_sum_grid
from .reports import CriterionReport
from .sieve import arith_tables

EXACT_BITS = 20_000
EPS = 2.0**-52


def _as_factored(F):
    return F if isinstance(F, FactoredInteger) else factor_int(F)


def _decide(lhs, rhs_lo, rhs_hi):
    """+1 if lhs < rhs certainly, -1 if lhs >= rhs certainly, 0 otherwise."""
    if lhs < rhs_lo:
        return 1
    if lhs >= rhs_hi:
        return -1
    return 0


def _robin_rhs_bracket(N, variant, dps):
    if dps is None:
        eg_lo, eg_hi = C.EXP_GAMMA_BRACKET
        dps = 30
    else:
        eg_lo, eg_hi = C.exp_gamma_interval(dps)
    ll_lo, ll_hi = C.loglog_interval(N, dps)
    lo, hi = eg_lo * ll_lo, eg_hi * ll_hi
    if variant == "unconditional":
        c = Fraction(str(C.ROBIN_UNCONDITIONAL_C))
        lo, hi = lo + c / ll_hi, hi + c / ll_lo
    return lo, hi


def _certified(lhs, bracket_fn):
    """Try the coarse e^gamma bracket first, then tighter interval arithmetic."""
    for dps in (None, 50, 120):
        lo, hi = bracket_fn(dps)
        verdict = _decide(lhs, lo, hi)
        if verdict:
            return verdict
    return 0


def _robin_float_rhs(logN, variant):
    ll = math.log(logN)
    rhs = C.EXP_GAMMA * ll
    if variant == "unconditional":
        rhs += C.ROBIN_UNCONDITIONAL_C / ll
    return rhs


def robin_check(F, variant="strict"):
    """sigma(N) < e^gamma N log log N (strict), plus 0.6482 N / log log N (unconditional)."""
    if variant not in ("strict", "unconditional"):
        raise ValueError(f"unknown Robin variant {variant!r}")
    F = _as_factored(F)
    crit = f"robin_{variant}"
    if F.log < 2 and F.value < 3:
        raise DomainError("Robin's inequality needs N >= 3")
    logN = F.log
    rhs = _robin_float_rhs(logN, variant)
    if F.log < EXACT_BITS * math.log(2):
        ab = abundancy(F)
        margin = rhs - float(ab)
        v = _certified(ab, lambda dps: _robin_rhs_bracket(F.value, variant, dps))
        return CriterionReport(F, crit, v > 0, margin, "exact_rational", indeterminate=v == 0)
    # log space
    lhs_log = log_abundancy(F)
    margin_log = math.log(rhs) - lhs_log
    err = log_space_error(F) + 8 * EPS * abs(math.log(rhs))
    margin = rhs - math.exp(lhs_log)
    return CriterionReport(F, crit, margin_log > err, margin, "log_space",
                           indeterminate=abs(margin_log) <= err, error_bound=err)


def _harmonic_fraction(n):
    return sum((Fraction(1, k) for k in range(1, n + 1)), Fraction(0))


def harmonic_float(n):
    """H_n: exact below 16, Euler-Maclaurin above (truncation < 1/(240 n^8))."""
    n = np.asarray(n, dtype=np.float64)
    small = np.cumsum(np.concatenate(([0.0], 1.0 / np.arange(1, 17))))
    m = np.minimum(n, 16).astype(int)
    big = n >= 16
    nb = np.where(big, n, 16.0)
    em = (np.log(nb) + C.GAMMA + 1 / (2 * nb) - 1 / (12 * nb**2)
          + 1 / (120 * nb**4) - 1 / (252 * nb**6))
    return np.where(big, em, small[m])


def lagarias_check(n, exact_limit=10**4):
    """sigma(n) <= H_n + exp(H_n) log H_n; strict for n >= 2, equality at n = 1."""
    n = int(n)
    if n < 1:
        raise DomainError("Lagarias needs n >= 1")
    F = factor_int(n)
    s = sigma(F)
    if n == 1:
        return CriterionReport(F, "lagarias", True, 0.0, "exact_rational",
                               note="boundary equality at n = 1")
    if n <= exact_limit:
        H = _harmonic_fraction(n)

        def bracket(dps):
            mpmath.iv.dps = dps or 30
            h = mpmath.iv.mpf(H.numerator) / H.denominator
            return C._iv_bracket(h + mpmath.iv.exp(h) * mpmath.iv.log(h))

        v = _certified(Fraction(s), bracket)
        h = float(H)
        margin = h + math.exp(h) * math.log(h) - s
        return CriterionReport(F, "lagarias", v > 0, margin, "exact_rational",
                               indeterminate=v == 0)
    h = float(harmonic_float(n))
    rhs = h + math.exp(h) * math.log(h)
    margin = rhs - s
    err = 16 * EPS * rhs
    return CriterionReport(F, "lagarias", margin > err, margin, "log_space",
                           indeterminate=abs(margin) <= err, error_bound=err)


def rs_totient_check(F):
    """N/phi(N) < e^gamma log log N + 2.5 / log log N."""
    F = _as_factored(F)
    if F.log < 2 and F.value < 3:
        raise DomainError("Rosser-Schoenfeld needs N >= 3")
    ll = math.log(F.log)
    rhs = C.EXP_GAMMA * ll + C.RS_TOTIENT_C / ll
    if F.log < EXACT_BITS * math.log(2):
        ratio = Fraction(F.value, phi(F))
        cst = Fraction(str(C.RS_TOTIENT_C))

        def bracket(dps):
            eg_lo, eg_hi = C.EXP_GAMMA_BRACKET if dps is None else C.exp_gamma_interval(dps)
            ll_lo, ll_hi = C.loglog_interval(F.value, dps or 30)
            return eg_lo * ll_lo + cst / ll_hi, eg_hi * ll_hi + cst / ll_lo

        v = _certified(ratio, bracket)
        return CriterionReport(F, "rs_totient", v > 0, rhs - float(ratio), "exact_rational",
                               indeterminate=v == 0)
    lhs_log = log_n_over_phi(F)
    margin_log = math.log(rhs) - lhs_log
    err = log_space_error(F) + 8 * EPS * abs(math.log(rhs))
    return CriterionReport(F, "rs_totient", margin_log > err, rhs - math.exp(lhs_log),
                           "log_space", indeterminate=abs(margin_log) <= err, error_bound=err)


# -- condition filters ------------------------------------------------------------

def smooth_condition(F):
    """P(N) < (1 - 1/(9 log log N)) log N."""
    logN = F.log
    if logN < math.log(16):
        raise DomainError("smooth filter needs N >= 16")
    return F.largest_prime < (1 - 1 / (9 * math.log(logN))) * logN


def dyadic_condition(F):
    """2^nu <= (log log N)^2 with nu the 2-adic valuation."""
    logN = F.log
    if logN < math.log(16):
        raise DomainError("dyadic filter needs N >= 16")
    return 2**F.nu2 <= math.log(logN) ** 2


def fifth_power_condition(F):
    return F.max_exponent >= 5


def condition_filters(F, s_values=(2, 3, 4, 5)):
    F = _as_factored(F)
    out = {"smooth": smooth_condition(F), "dyadic": dyadic_condition(F),
           "fifth_power": fifth_power_condition(F)}
    for s in s_values:
        out[f"s_free({s})"] = F.is_s_free(s)
    return out


def sfree_margin(F, s):
    """(e^gamma / zeta(s)) log log N - sigma(N)/N for s-free N.

    The O(1/(log log N)^2) slack makes small-N failures expected; below
    N = 10^4 the verdict is report-only (see ``note``).
    """
    F = _as_factored(F)
    if s < 2:
        raise DomainError("s-free margin needs s >= 2")
    if not F.is_s_free(s):
        raise PreconditionError(f"{F} is not {s}-free")
    if F.log < 2 and F.value < 3:
        raise DomainError("s-free margin needs N >= 3")
    ll = math.log(F.log)
    threshold = C.EXP_GAMMA / C.zeta(s) * ll
    if F.log < EXACT_BITS * math.log(2):
        lhs, mode = float(abundancy(F)), "exact_rational"
    else:
        lhs, mode = math.exp(log_abundancy(F)), "log_space"
    margin = threshold - lhs
    note = "report-only below 1e4" if F.log < math.log(10**4) else ""
    return CriterionReport(F, f"sfree({s})", margin > 0, margin, mode, note=note)


# -- range scans ---------------------------------------------------------------------

class ScanResult(Sequence):
    """Per-n outcome arrays; indexing yields :class:`CriterionReport` lazily."""

    def __init__(self, criterion, n, margin, holds, indeterminate=None, mode="log_space",
                 error_bound=None):
        self.criterion = criterion
        self.n = np.asarray(n)
        self.margin = np.asarray(margin, dtype=float)
        self.holds = np.array(holds, dtype=bool)
        self.indeterminate = (np.zeros(len(self.n), bool) if indeterminate is None
                              else np.array(indeterminate, dtype=bool))
        self.error_bound = (np.zeros(len(self.n)) if error_bound is None
                            else np.broadcast_to(np.asarray(error_bound, dtype=float),
                                                 self.n.shape))
        self.mode = mode

    def __len__(self):
        return len(self.n)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        return CriterionReport(int(self.n[i]), self.criterion, bool(self.holds[i]),
                               float(self.margin[i]), self.mode, bool(self.indeterminate[i]),
                               float(self.error_bound[i]))

    def violators(self):
        return self.n[~self.holds]

    def where(self, mask):
        return ScanResult(self.criterion, self.n[mask], self.margin[mask], self.holds[mask],
                          self.indeterminate[mask], self.mode, self.error_bound[mask])


def _blocks(start, stop, threads):
    """Contiguous partition of [start, stop]; its shape never affects results."""
    size = stop - start + 1
    k = max(1, threads)
    edges = [start + size * i // k for i in range(k + 1)]
    return [(edges[i], edges[i + 1] - 1) for i in range(k) if edges[i + 1] > edges[i]]


def _run_blocks(fn, start, stop, threads):
    blocks = _blocks(start, stop, threads)
    if threads <= 1 or len(blocks) == 1:
        parts = [fn(a, b) for a, b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda ab: fn(*ab), blocks))
    return [np.concatenate(arrs) for arrs in zip(*parts)]


def _settle(result, checker):
    """Re-decide indeterminate float verdicts with the exact checker."""
    for i in np.nonzero(result.indeterminate)[0]:
        rep = checker(int(result.n[i]))
        result.holds[i] = rep.holds
        result.indeterminate[i] = rep.indeterminate
    return result


def robin_scan(limit, variant="strict", start=3, threads=1):
    if start < 3:
        raise DomainError("Robin scans start at n >= 3")
    T = arith_tables(limit)

    def block(a, b):
        n = np.arange(a, b + 1, dtype=np.int64)
        ll = np.log(np.log(n.astype(float)))
        rhs = C.EXP_GAMMA * ll
        if variant == "unconditional":
            rhs = rhs + C.ROBIN_UNCONDITIONAL_C / ll
        lhs = T.sigma[a:b + 1] / n
        margin = rhs - lhs
        err = 16 * EPS * np.maximum(rhs, lhs)
        return n, margin, margin > err, np.abs(margin) <= err

    n, margin, holds, indet = _run_blocks(block, start, limit, threads)
    res = ScanResult(f"robin_{variant}", n, margin, holds, indet)
    return _settle(res, lambda m: robin_check(m, variant))


def robin_filtered_violations(limit, start=5041):
    """Strict-Robin violators in [start, limit] that pass each condition filter."""
    T = arith_tables(limit)
    res = robin_scan(limit, "strict", start=max(start, 16))
    n = res.n
    logn = np.log(n.astype(float))
    ll = np.log(logn)
    smooth = T.largest_prime[n] < (1 - 1 / (9 * ll)) * logn
    nu = (n & -n).astype(float)
    dyadic = nu <= ll**2
    bad = ~res.holds
    return {"smooth": n[bad & smooth], "dyadic": n[bad & dyadic],
            "counts": {"smooth": int(smooth.sum()), "dyadic": int(dyadic.sum())}}


def lagarias_scan(limit, start=1, threads=1):
    T = arith_tables(limit)

    def block(a, b):
        n = np.arange(a, b + 1, dtype=np.int64)
        H = harmonic_float(n)
        rhs = H + np.exp(H) * np.log(H)
        margin = rhs - T.sigma[a:b + 1]
        err = 64 * EPS * np.maximum(rhs, 1.0)
        holds = margin > err
        indet = np.abs(margin) <= err
        if a == 1:  # equality at n = 1 is the boundary case
            holds[0], indet[0], margin[0] = True, False, 0.0
        return n, margin, holds, indet

    n, margin, holds, indet = _run_blocks(block, start, limit, threads)
    return _settle(ScanResult("lagarias", n, margin, holds, indet), lagarias_check)


def rs_totient_scan(limit, start=3, threads=1):
    T = arith_tables(limit)

    def block(a, b):
        n = np.arange(a, b + 1, dtype=np.int64)
        ll = np.log(np.log(n.astype(float)))
        rhs = C.EXP_GAMMA * ll + C.RS_TOTIENT_C / ll
        lhs = n / T.phi[a:b + 1]
        margin = rhs - lhs
        err = 16 * EPS * np.maximum(rhs, lhs)
        return n, margin, margin > err, np.abs(margin) <= err

    n, margin, holds, indet = _run_blocks(block, start, limit, threads)
    return _settle(ScanResult("rs_totient", n, margin, holds, indet), rs_totient_check)


def duncan_scan(limit, threads=1):
    """sigma(n) < (pi^2/6) n (1 + omega(n) log 2) over squarefree n <= limit."""
    from .arith import duncan_bound
    T = arith_tables(limit)

    def block(a, b):
        n = np.arange(a, b + 1, dtype=np.int64)
        keep = T.max_exponent[a:b + 1] <= 1
        n = n[keep]
        rhs = C.PI2_OVER_SIX * n * (1 + T.omega[n] * math.log(2))
        margin = rhs - T.sigma[n]
        err = 16 * EPS * rhs
        return n, margin, margin > err, np.abs(margin) <= err

    n, margin, holds, indet = _run_blocks(block, 1, limit, threads)
    res = ScanResult("duncan", n, margin, holds, indet)
    return _settle(res, lambda m: duncan_bound(factor_int(m)))


def _primorial_logs(table, k_max):
    if k_max > len(table):
        raise RangeError(f"k_max={k_max} beyond {len(table)} primes")
    lhs = -prime_cumulative(table, "log_one_minus")[:k_max]  # log(N_k/phi(N_k))
    logN = table.cum_log[:k_max]
    return lhs, logN


def _ld_error(scale):
    """Rounding bound for the k-th cumulative longdouble sum, then one float cast."""
    eps_ld = float(np.finfo(np.longdouble).eps)
    k = np.arange(1, len(scale) + 1)
    return (k + 8) * eps_ld * np.abs(scale) + 4 * EPS * np.abs(scale) + 1e-300


def nicolas_scan(table, k_max=None):
    """N_k/phi(N_k) > e^gamma log log N_k over primorials, compared in log space.

    lhs = -sum_{p <= p_k} log(1 - 1/p), rhs = gamma + log log log N_k with
    log N_k = theta(p_k). For k = 1 (N = 2) log log N < 0 and the rhs is
    -infinity, so the inequality holds trivially.
    """
    k_max = len(table) if k_max is None else k_max
    lhs, logN = _primorial_logs(table, k_max)
    ll = np.log(logN)
    with np.errstate(invalid="ignore", divide="ignore"):
        rhs = np.where(ll > 0, np.longdouble(C.GAMMA_DIGITS) + np.log(np.where(ll > 0, ll, 1)),
                       -np.inf)
    margin = (lhs - rhs).astype(float)
    err = _ld_error(np.maximum(np.abs(lhs), np.abs(np.where(np.isfinite(rhs), rhs, 0))).astype(float))
    k = np.arange(1, k_max + 1)
    return ScanResult("nicolas", k, margin, margin > err, np.abs(margin) <= err,
                      error_bound=err)


def nicolas_check_mp(table, k, dps=40):
    """Independent high-precision evaluation of the Nicolas margin at N_k."""
    with mpmath.workdps(dps):
        ps = [int(p) for p in table.primes[:k]]
        lhs = -mpmath.fsum(mpmath.log1p(-mpmath.mpf(1) / p) for p in ps)
        logN = mpmath.fsum(mpmath.log(p) for p in ps)
        return lhs - (mpmath.euler + mpmath.log(mpmath.log(logN)))


def rs_primorial_scan(table, k_max=None):
    """N_k/phi(N_k) < e^gamma log log N_k + 2.5/log log N_k for k >= 2, in log space."""
    k_max = len(table) if k_max is None else k_max
    lhs, logN = _primorial_logs(table, k_max)
    lhs, logN = lhs[1:], logN[1:]  # N_1 = 2 is below the domain N >= 3
    ll = np.log(logN)
    rhs = np.exp(np.longdouble(C.GAMMA_DIGITS)) * ll + np.longdouble(C.RS_TOTIENT_C) / ll
    margin = (np.log(rhs) - lhs).astype(float)
    err = _ld_error(np.abs(lhs).astype(float)) + 8 * EPS * np.abs(np.log(rhs).astype(float))
    k = np.arange(2, k_max + 1)
    return ScanResult("rs_totient", k, margin, margin > err, np.abs(margin) <= err,
                      error_bound=err)


# -- primorial probe ---------------------------------------------------------------------

@dataclass(frozen=True)
class PrimorialProbe:
    k: int
    p_k: int
    log_N: float
    delta: float  # log log p_k - log log theta(p_k), theta(p_k) = log N_k
    R_envelope: float  # unconditional Mertens envelope at p_k
    tail: float  # sum_{p > p_k} sum_{n >= 2} 1/(n p^n), truncated at the table limit
    lhs_12: float  # delta + R(p_k)
    rhs_12: float  # tail
    f_envelope: float  # 1/(f(log N) log log N) for the chosen f


def _f_envelope(logN, f_choice, A, c):
    ll = np.log(logN)
    if f_choice == "log_power":
        return 1 / (c * np.log(logN) ** A * ll)
    if f_choice == "sqrt":
        return 1 / (c * np.sqrt(logN) * ll)
    raise ValueError(f"unknown f choice {f_choice!r}")


def primorial_probe_scan(table, k_max=None, f_choice="log_power", A=1.0, c=1.0):
    """Vectorised probe for k = 2..k_max (p_k must stay below the table limit)."""
    kmax = k_max or int(np.searchsorted(table.primes, table.limit, side="left"))
    kmax = min(kmax, len(table) - 1 if table.primes[-1] == table.limit else len(table))
    if kmax < 2:
        raise RangeError("probe needs k >= 2")
    ps = table.primes[1:kmax].astype(np.longdouble)
    logN = table.cum_log[1:kmax]
    delta = np.log(np.log(ps)) - np.log(np.log(logN))
    inv = prime_cumulative(table, "inv_p")[1:kmax]
    R = inv - np.log(np.log(ps)) - np.longdouble(C.MERTENS_B_DIGITS)
    pf = ps.astype(float)
    tail = tail_sum_grid(table, pf)
    return {
        "k": np.arange(2, kmax + 1), "p_k": table.primes[1:kmax], "log_N": logN.astype(float),
        "delta": delta.astype(float), "R_envelope": mertens_envelope(pf, "corrected"),
        "tail": tail, "lhs_12": (delta + R).astype(float), "rhs_12": tail,
        "f_envelope": _f_envelope(logN.astype(float), f_choice, A, c),
    }


def primorial_probe(table, k, f_choice="log_power", A=1.0, c=1.0):
    if k < 2 or k > len(table) or table.primes[k - 1] >= table.limit:
        raise RangeError(f"k={k} outside the probe range of this table")
    cols = primorial_probe_scan(table, k, f_choice, A, c)
    i = -1
    return PrimorialProbe(int(cols["k"][i]), int(cols["p_k"][i]), float(cols["log_N"][i]),
                          float(cols["delta"][i]), float(cols["R_envelope"][i]),
                          float(cols["tail"][i]), float(cols["lhs_12"][i]),
                          float(cols["rhs_12"][i]), float(cols["f_envelope"][i]))


# -- arithmetic progressions ---------------------------------------------------------------

class APExtremes(NamedTuple):
    sup_sigma_ratio: float
    argmax_sigma: int
    sup_phi_ratio: float
    argmax_phi: int


def ap_extremes(a, q, x, table=None):
    """sup of sigma(N)/(N e^g log log N) and N/(phi(N) e^g log log N) over N = a mod q, 16 <= N <= x."""
    if q < 1 or not 0 <= a < q:
        raise DomainError("need q >= 1 and 0 <= a < q")
    T = arith_tables(x)
    first = 16 + (a - 16) % q
    n = np.arange(first, x + 1, q, dtype=np.int64)
    if not len(n):
        return APExtremes(float("nan"), 0, float("nan"), 0)
    ll = C.EXP_GAMMA * np.log(np.log(n.astype(float)))
    rs = T.sigma[n] / n / ll
    rp = n / T.phi[n] / ll
    i, j = int(np.argmax(rs)), int(np.argmax(rp))
    return APExtremes(float(rs[i]), int(n[i]), float(rp[j]), int(n[j]))
