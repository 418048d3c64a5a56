"""Abundancy classes and record-setting integers.

Highly composite and superabundant numbers come from exhaustive scans of
the sieve tables with exact integer keys. Colossally abundant numbers are
built prime by prime from an exponent argmax and checked against a brute
force maximiser of sigma(M)/M^(1+eps).
"""
from dataclasses import dataclass
from fractions import Fraction
import math
from typing import Any

import mpmath
import numpy as np

from .arith import FactoredInteger, abundancy, factor_int, log_abundancy
from .errors import DomainError, ResourceError
from .primes import sieve_primes
from .sieve import SCAN_BUDGET, arith_tables


@dataclass(frozen=True)
class AbundancyClass:
    kind: str  # deficient, perfect or abundant
    ratio: Fraction  # sigma(N)/N

    def multiperfect_eq(self, m):
        """sigma(N) = m N."""
        return self.ratio == m

    def m_abundant_ge(self, m):
        """sigma(N) >= m N."""
        return self.ratio >= m


def abundancy_class(F):
    F = F if isinstance(F, FactoredInteger) else factor_int(F)
    r = abundancy(F)
    kind = "deficient" if r < 2 else "perfect" if r == 2 else "abundant"
    return AbundancyClass(kind, r)


@dataclass(frozen=True)
class RecordEntry:
    n: int
    key: Any  # int for sigma0, Fraction for sigma(n)/n
    predecessor_key: Any


def _divisor_counts(limit):
    """sigma0(n) for n <= limit by a multiplicative sieve over exponents."""
    d = np.ones(limit + 1, dtype=np.int64)
    rem = np.arange(limit + 1, dtype=np.int64)
    for p in sieve_primes(math.isqrt(limit)):
        p = int(p)
        e = np.zeros(limit // p, dtype=np.int64)
        pk = p
        while pk <= limit:
            step = pk // p
            e[step - 1::step] += 1
            pk *= p
        d[p::p] *= e + 1
        rem[p::p] //= p ** e
    d[rem > 1] *= 2
    d[0] = 0
    return d


def record_scan(limit, kind="superabundant"):
    """Record-setters n <= limit of sigma0(n) or sigma(n)/n (strict records)."""
    if limit < 1:
        raise DomainError("record_scan needs limit >= 1")
    if limit > SCAN_BUDGET:
        raise ResourceError(f"limit {limit} exceeds scan budget {SCAN_BUDGET}")
    if kind == "highly_composite":
        keys = _divisor_counts(limit)
        n_sig = None
    elif kind == "superabundant":
        T = arith_tables(max(limit, 2))
        n_sig = T.sigma
        keys = None
    else:
        raise ValueError(f"unknown record kind {kind!r}")
    out = [RecordEntry(1, 1 if n_sig is None else Fraction(1), None)]
    if n_sig is None:
        best = 1
        # candidates: running maximum changes; vectorised prefilter
        run = np.maximum.accumulate(keys[1:limit + 1])
        idx = np.nonzero(np.diff(run))[0] + 2
        for n in idx:
            k = int(keys[n])
            out.append(RecordEntry(int(n), k, best))
            best = k
        return out
    # sigma(n)/n: float prefilter then exact cross-multiplication
    ratio = n_sig[1:limit + 1] / np.arange(1, limit + 1)
    run = np.maximum.accumulate(ratio)
    cand = np.nonzero(ratio >= run * (1 - 1e-12))[0] + 1
    best_s, best_n = 1, 1
    for n in cand[1:]:
        n = int(n)
        s = int(n_sig[n])
        if s * best_n > best_s * n:
            out.append(RecordEntry(n, Fraction(s, n), Fraction(best_s, best_n)))
            best_s, best_n = s, n
    return out


def hc_exponents_ok(n):
    """Exponents non-increasing along 2, 3, 5, ... with no gap in the support."""
    F = factor_int(n)
    if not F.factors:
        return True
    ps = sieve_primes(F.largest_prime).tolist()
    exps = [dict(F.factors).get(p, 0) for p in ps]
    return all(e > 0 for e in exps) and all(a >= b for a, b in zip(exps, exps[1:]))


# -- colossally abundant -----------------------------------------------------------

def _best_exponent(p, eps, tol=1e-13):
    """argmax over v >= 0 of sigma(p^v)/p^(v(1+eps)); ties go to the larger v.

    The step ratio sigma(p^(v+1))/(sigma(p^v) p^(1+eps)) decreases in v, so
    the exponent grows while that ratio is at least 1.
    """
    lp = math.log(p)
    v = 0
    while math.log((p ** (v + 2) - 1) / (p ** (v + 1) - 1)) - (1 + eps) * lp >= -tol:
        v += 1
    return v


def closed_form_exponent(p, eps):
    """floor(log((p^(1+eps) - 1)/(p^eps - 1)) / log p) - 1."""
    return math.floor(math.log((p ** (1 + eps) - 1) / (p**eps - 1)) / math.log(p) + 1e-12) - 1


def colossally_abundant(epsilon, table=None):
    """Prime-by-prime exponent argmax; stops at the first prime with exponent 0."""
    if not epsilon > 0:
        raise DomainError("epsilon must be positive")
    ps = table.primes if table is not None else sieve_primes(10**6)
    exps = {}
    for p in ps:
        p = int(p)
        v = _best_exponent(p, epsilon)
        if v == 0:
            break
        exps[p] = v
    return FactoredInteger.from_dict(exps)


def ca_oracle(epsilon, m_max):
    """Largest M <= m_max maximising sigma(M)/M^(1+eps), by brute force.

    The float key picks candidates; near-ties within 1e-12 relative are
    settled by comparing sigma(M) M'^(1+eps) in high precision.
    """
    if m_max > SCAN_BUDGET:
        raise ResourceError(f"m_max {m_max} exceeds scan budget")
    T = arith_tables(max(m_max, 2))
    m = np.arange(1, m_max + 1)
    key = np.log(T.sigma[1:m_max + 1].astype(float)) - (1 + epsilon) * np.log(m)
    top = key.max()
    cand = m[key >= top - 1e-9 * max(1.0, abs(top))]
    if len(cand) == 1:
        return int(cand[0])
    with mpmath.workdps(50):
        e = mpmath.mpf(epsilon)
        keys = [(mpmath.log(int(T.sigma[c])) - (1 + e) * mpmath.log(int(c)), int(c)) for c in cand]
    best = max(k for k, _ in keys)
    return max(c for k, c in keys if abs(k - best) < mpmath.mpf(10) ** -40)


def ca_grid(n_points=20, lo=0.05, hi=2.0):
    """Log-spaced epsilon grid in (lo, hi]."""
    return np.exp(np.linspace(math.log(hi), math.log(lo), n_points + 1))[:-1]


def multiple_abundance_check(n_max, m_max=10):
    """Counterexamples (m, N) over abundant N <= n_max and 1 <= m <= m_max.

    Three readings of "mN is (m+1)-abundant" are tested:
    ``weak``: sigma(mN) > (m+1) N; ``abundancy``: sigma(mN) >= (m+1) mN;
    ``argument``: sigma(mN) >= (m+1) sigma(N).
    """
    T = arith_tables(max(n_max * m_max, 2))
    n = np.arange(1, n_max + 1)
    abundant = n[T.sigma[1:n_max + 1] > 2 * n]
    out = {"weak": [], "abundancy": [], "argument": []}
    for m in range(1, m_max + 1):
        smn = T.sigma[m * abundant]
        for name, fail in (("weak", smn <= (m + 1) * abundant),
                           ("abundancy", smn < (m + 1) * m * abundant),
                           ("argument", smn < (m + 1) * T.sigma[abundant])):
            out[name].extend((m, int(N)) for N in abundant[fail])
    return out


def sigma_ratio(F):
    """(log N, log(sigma(N)/N)) for emission of large factored values."""
    return F.log, log_abundancy(F)

