"""Four-square representation counts.

r4(n) counts ordered signed quadruples with x^2 + y^2 + z^2 + w^2 = n.
Jacobi's formula gives it from sigma of the odd part; two enumeration
routes (two-square convolution and a literal four-fold loop) serve as
oracles.
"""
from dataclasses import dataclass
import math

import numpy as np

from . import constants as C
from .arith import FactoredInteger, factor_int, sigma
from .errors import DomainError, ResourceError
from .reports import CriterionReport

BRUTE_LIMIT = 10**5
LOOP_LIMIT = 10**4


@dataclass(frozen=True)
class R4Result:
    n: int
    r4: int
    parity_branch: str  # "odd" or "even"
    m_odd_part: int


def _odd_part(F):
    alpha = F.nu2
    M = FactoredInteger(tuple((p, e) for p, e in F.factors if p != 2))
    return alpha, M


def r4_jacobi(F):
    """8 sigma(n) for odd n, 24 sigma(M) for n = 2^a M with a > 0 and M odd."""
    F = F if isinstance(F, FactoredInteger) else factor_int(F)
    alpha, M = _odd_part(F)
    if alpha == 0:
        return R4Result(F.value, 8 * sigma(F), "odd", F.value)
    return R4Result(F.value, 24 * sigma(M), "even", M.value)


def r2_table(limit):
    """r2(k) for 0 <= k <= limit by enumerating x^2 + y^2 = k over signed pairs."""
    r = math.isqrt(limit)
    xs = np.arange(-r, r + 1)
    sq = (xs * xs)[:, None] + (xs * xs)[None, :]
    return np.bincount(sq[sq <= limit], minlength=limit + 1).astype(np.int64)


def r4_table(limit):
    """r4(n) for 0 <= n <= limit as the self-convolution of r2."""
    if limit > BRUTE_LIMIT:
        raise ResourceError(f"r4 table beyond {BRUTE_LIMIT}")
    r2 = r2_table(limit)
    nz = np.nonzero(r2)[0]
    out = np.zeros(limit + 1, dtype=np.int64)
    for k in nz:
        out[k:] += r2[k] * r2[:limit + 1 - k]
    return out


def r4_loop(n):
    """Literal four-fold loop over |x|, |y|, |z|, |w| <= sqrt(n)."""
    if n > LOOP_LIMIT:
        raise ResourceError(f"four-fold loop limited to n <= {LOOP_LIMIT}")
    r = math.isqrt(n)
    count = 0
    for x in range(-r, r + 1):
        for y in range(-r, r + 1):
            rest = n - x * x - y * y
            if rest < 0:
                continue
            for z in range(-r, r + 1):
                w2 = rest - z * z
                if w2 < 0:
                    continue
                w = math.isqrt(w2)
                if w * w == w2:
                    count += 1 if w == 0 else 2
    return count


def r4_bruteforce(n):
    """r4(n) by two-square convolution."""
    if n < 0:
        raise DomainError("r4 needs n >= 0")
    if n > BRUTE_LIMIT:
        raise ResourceError(f"brute force limited to n <= {BRUTE_LIMIT}")
    r2 = r2_table(n)
    return int(np.dot(r2, r2[::-1]))


def ball_count(x):
    """Lattice points of Z^4 with x1^2 + ... + x4^2 <= x, by direct enumeration."""
    r = math.isqrt(x)
    s = np.arange(-r, r + 1) ** 2
    two = (s[:, None] + s[None, :]).ravel()
    two = np.sort(two[two <= x])
    # for each pair sum a, count pair sums b <= x - a
    return int(np.searchsorted(two, x - two, side="right").sum())


def r4_bound(F):
    """(bound, branch): 4 e^g N loglog N for odd N, 24 e^g M loglog M for even N."""
    F = F if isinstance(F, FactoredInteger) else factor_int(F)
    alpha, M = _odd_part(F)
    if alpha == 0:
        return 4 * C.EXP_GAMMA * F.value * math.log(F.log), "odd"
    if M.value < 3:
        raise DomainError("even branch needs odd part M >= 3")
    return 24 * C.EXP_GAMMA * M.value * math.log(M.log), "even"


def r4_bound_check(F):
    F = F if isinstance(F, FactoredInteger) else factor_int(F)
    if F.value <= 15:
        raise DomainError("r4 bound is stated for N > 15")
    bound, branch = r4_bound(F)
    r4 = r4_jacobi(F).r4
    margin = bound - r4
    return CriterionReport(F, f"r4_bound_{branch}", margin > 0, margin, "log_space",
                           error_bound=8 * 2.0**-52 * bound, extra={"r4": r4, "bound": bound})


def r4_odd_exceptions(limit, start=17):
    """Odd start <= n <= limit with r4(n) = 8 sigma(n) >= 4 e^g n loglog n."""
    from .sieve import arith_tables
    T = arith_tables(limit)
    n = np.arange(start | 1, limit + 1, 2, dtype=np.int64)
    bound = 4 * C.EXP_GAMMA * n * np.log(np.log(n.astype(float)))
    r4 = 8 * T.sigma[n]
    margin = bound - r4
    return n[margin <= 1e-9 * bound], margin
