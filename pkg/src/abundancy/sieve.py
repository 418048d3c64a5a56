"""Whole-range arithmetic tables for n <= limit.

sigma, phi, omega, P(n) and the largest exponent are filled by one pass
over primes p <= sqrt(limit); what is left of n after removing those primes
is 1 or a single large prime, which finishes every entry.
"""
from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from .errors import ResourceError
from .primes import sieve_primes

SCAN_BUDGET = 10**8


@dataclass(frozen=True, eq=False)
class ArithTables:
    limit: int
    sigma: np.ndarray  # int64
    phi: np.ndarray  # int64
    omega: np.ndarray  # int8
    largest_prime: np.ndarray  # int64, 1 at n = 1
    max_exponent: np.ndarray  # int8, 0 at n = 1

    @property
    def n(self):
        return np.arange(self.limit + 1, dtype=np.int64)

    def squarefree(self):
        return self.max_exponent <= 1

    def nu2(self):
        n = self.n
        n[0] = 1
        low = n & -n
        return np.log2(low).astype(np.int8)

    def sigma0(self):
        """Divisor counts by the additive divisor sieve (independent of ``sigma``)."""
        d = np.zeros(self.limit + 1, dtype=np.int32)
        for k in range(1, self.limit + 1):
            d[k::k] += 1
        return d


@lru_cache(maxsize=2)
def arith_tables(limit):
    limit = int(limit)
    if limit > SCAN_BUDGET:
        raise ResourceError(f"table limit {limit} exceeds scan budget {SCAN_BUDGET}")
    size = limit + 1
    rem = np.arange(size, dtype=np.int64)
    sig = np.ones(size, dtype=np.int64)
    ph = np.ones(size, dtype=np.int64)
    om = np.zeros(size, dtype=np.int8)
    lpf = np.ones(size, dtype=np.int64)
    mexp = np.zeros(size, dtype=np.int8)
    for p in sieve_primes(math.isqrt(limit)):
        p = int(p)
        m = limit // p
        sig_part = np.ones(m, dtype=np.int64)
        p_part = np.ones(m, dtype=np.int64)
        exp = np.zeros(m, dtype=np.int8)
        pk = p
        while pk <= limit:
            # entry j is n = p*(j+1); p^k | n iff (pk/p) | (j+1)
            step = pk // p
            sig_part[step - 1::step] += pk
            p_part[step - 1::step] *= p
            exp[step - 1::step] += 1
            pk *= p
        sl = slice(p, None, p)
        sig[sl] *= sig_part
        ph[sl] *= p_part - p_part // p
        rem[sl] //= p_part
        om[sl] += 1
        lpf[sl] = p
        np.maximum(mexp[sl], exp, out=mexp[sl])
    big = rem > 1
    q = rem[big]
    sig[big] *= q + 1
    ph[big] *= q - 1
    om[big] += 1
    lpf[big] = q
    mexp[big] = np.maximum(mexp[big], 1)
    sig[0] = ph[0] = 0
    for a in (sig, ph, om, lpf, mexp):
        a.setflags(write=False)
    return ArithTables(limit, sig, ph, om, lpf, mexp)
