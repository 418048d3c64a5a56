"""Distributional and average-order experiments.

Divisor sums are exact integers (block sums over the distinct values of
floor(x/d)); the sieve tables provide per-n values for histograms and
running maxima.
"""
from dataclasses import dataclass, field
from fractions import Fraction
import math

import numpy as np
from scipy.special import ndtr

from . import constants as C
from .errors import DomainError, ResourceError
from .primes import sieve_primes
from .sieve import SCAN_BUDGET, arith_tables


@dataclass(frozen=True)
class Histogram:
    bin_edges: np.ndarray
    masses: np.ndarray
    sample_count: int


@dataclass(frozen=True)
class AverageOrderRow:
    x: int
    fn: str
    empirical_sum: int
    main_term: float
    fitted_constant: float
    residual: float
    alternatives: dict = field(default_factory=dict)  # name -> (main_term, residual)


# -- Erdos-Kac ----------------------------------------------------------------------

def omega_standardized(x):
    """(omega(n) - log log n) / sqrt(log log n) for 3 <= n <= x."""
    T = arith_tables(x)
    n = np.arange(3, x + 1, dtype=float)
    ll = np.log(np.log(n))
    return (T.omega[3:].astype(float) - ll) / np.sqrt(ll)


def ks_normal(z):
    """Kolmogorov-Smirnov distance between the sample z and the standard normal."""
    z = np.sort(np.asarray(z, dtype=float))
    m = len(z)
    F = ndtr(z)
    # ties: the empirical CDF jumps at the last copy of each value
    last = np.r_[z[1:] != z[:-1], True]
    first = np.r_[True, z[1:] != z[:-1]]
    hi = np.arange(1, m + 1)[last] / m - F[last]
    lo = F[first] - np.arange(0, m)[first] / m
    return float(max(hi.max(), lo.max()))


def erdos_kac(x, bins=40):
    if x < 100 or bins < 5:
        raise DomainError("erdos_kac needs x >= 100 and bins >= 5")
    if x > SCAN_BUDGET:
        raise ResourceError(f"x={x} exceeds scan budget {SCAN_BUDGET}")
    z = omega_standardized(x)
    counts, edges = np.histogram(z, bins=bins)
    hist = Histogram(edges, counts / counts.sum(), int(counts.sum()))
    return {"histogram": hist, "ks_distance": ks_normal(z)}


# -- average orders ----------------------------------------------------------------

def _floor_blocks(x):
    """Yield (lo, hi, q) with floor(x/d) = q for every d in [lo, hi]."""
    d = 1
    while d <= x:
        q = x // d
        d_hi = x // q
        yield d, d_hi, q
        d = d_hi + 1


def _power_sum(m, s):
    """1^s + ... + m^s (Faulhaber, s <= 3)."""
    if s == 0:
        return m
    if s == 1:
        return m * (m + 1) // 2
    if s == 2:
        return m * (m + 1) * (2 * m + 1) // 6
    if s == 3:
        return (m * (m + 1) // 2) ** 2
    raise ValueError("power sums implemented for s <= 3")


def divisor_power_sum(x, s):
    """sum_{n <= x} sigma_s(n) = sum_{k <= x} S_s(floor(x/k)), exact, over floor blocks."""
    return sum((k_hi - k_lo + 1) * _power_sum(q, s) for k_lo, k_hi, q in _floor_blocks(x))


def hyperbola_sigma0(x):
    """sum_{n <= x} sigma0(n) = 2 sum_{d <= sqrt x} floor(x/d) - floor(sqrt x)^2."""
    r = math.isqrt(x)
    return 2 * sum(x // d for d in range(1, r + 1)) - r * r


def omega_sum(x):
    """sum_{n <= x} omega(n) = sum_{p <= x} floor(x/p)."""
    ps = sieve_primes(x)
    return int((x // ps).sum())


def average_order(x, fn="sigma0", s=1):
    if x < 2:
        raise DomainError("average_order needs x >= 2")
    lx = math.log(x)
    if fn == "sigma0":
        S = divisor_power_sum(x, 0)
        main = x * lx + (2 * C.GAMMA - 1) * x
        return AverageOrderRow(x, fn, S, main, (S - x * lx) / x, S - main)
    if fn == "sigma_s":
        if s not in (1, 2, 3):
            raise DomainError("sigma_s needs s in {1, 2, 3}")
        S = divisor_power_sum(x, s)
        main = C.zeta(s + 1) / (s + 1) * float(x) ** (s + 1)
        return AverageOrderRow(x, f"sigma_{s}", S, main, S / float(x) ** (s + 1), S - main)
    if fn == "phi":
        T = arith_tables(x)
        S = int(T.phi[1:x + 1].sum())
        printed = C.SIX_OVER_PI2 * x * x
        classical = C.SIX_OVER_PI2 / 2 * x * x
        return AverageOrderRow(x, fn, S, printed, S / (x * x), S - printed,
                               {"3/pi^2": (classical, S - classical)})
    if fn == "omega":
        S = omega_sum(x)
        llx = math.log(lx)
        printed = x * lx
        classical = x * llx + C.MERTENS_B * x
        return AverageOrderRow(x, fn, S, printed, (S - x * llx) / x, S - printed,
                               {"x loglog x + Bx": (classical, S - classical)})
    raise ValueError(f"unknown function {fn!r}")


def fit_error_exponent(xs, fn="sigma0"):
    """Slope of log|residual| against log x, an empirical error exponent."""
    res = np.array([abs(average_order(int(x), fn).residual) for x in xs], dtype=float)
    keep = res > 0
    slope, _ = np.polyfit(np.log(np.asarray(xs, float)[keep]), np.log(res[keep]), 1)
    return float(slope)


# -- binomial rows -------------------------------------------------------------------

def _legendre(n, p):
    e = 0
    while n:
        n //= p
        e += n
    return e


def binomial_row_average(N):
    """Mean over k of sigma(C(N,k))/C(N,k) and phi(C(N,k))/C(N,k), exact.

    The row is symmetric, so only k <= N/2 is evaluated.
    """
    if not 1 <= N <= 2000:
        raise ResourceError("binomial_row_average supports 1 <= N <= 2000")
    ps = [int(p) for p in sieve_primes(max(N, 2))]
    vN = {p: _legendre(N, p) for p in ps}
    half_s = []
    half_p = []
    for k in range(N // 2 + 1):
        rs, rp = Fraction(1), Fraction(1)
        for p in ps:
            e = vN[p] - _legendre(k, p) - _legendre(N - k, p)
            if e:
                rs *= Fraction(p ** (e + 1) - 1, p**e * (p - 1))
                rp *= Fraction(p - 1, p)
        half_s.append(rs)
        half_p.append(rp)
    mid = N % 2 == 0
    sig = 2 * sum(half_s) - (half_s[-1] if mid else 0)
    ph = 2 * sum(half_p) - (half_p[-1] if mid else 0)
    sig, ph = sig / (N + 1), ph / (N + 1)
    lll = math.log(math.log(math.log(N))) if N > 15 else float("nan")
    return {"sigma_avg": float(sig), "phi_avg": float(ph), "sigma_exact": sig,
            "phi_exact": ph, "logloglog_N": lll}


def binomial_row_average_full(N):
    """Same average over every k, straight from math.comb; used as a cross-check."""
    from .arith import factor_int, phi, sigma
    entries = [math.comb(N, k) for k in range(N + 1)]
    fs = [factor_int(c) if c > 1 else None for c in entries]
    sig = sum((Fraction(sigma(F), c) if F else Fraction(1)) for F, c in zip(fs, entries))
    ph = sum((Fraction(phi(F), c) if F else Fraction(1)) for F, c in zip(fs, entries))
    return sig / (N + 1), ph / (N + 1)


# -- limsup, density, normal order -----------------------------------------------------

LIMSUP_THEORY = {"all": C.EXP_GAMMA, "odd": C.EXP_GAMMA / 2,
                 "squarefree": C.EXP_GAMMA * C.SIX_OVER_PI2}


def _class_mask(T, n, cls):
    if cls == "all":
        return np.ones(len(n), dtype=bool)
    if cls == "odd":
        return n % 2 == 1
    if cls == "squarefree":
        return T.max_exponent[n] <= 1
    raise ValueError(f"unknown class {cls!r}")


def limsup_tracker(x, cls="all"):
    """Maxima over 16 <= n <= x in the class of sigma(n)/(n loglog n) and n/(phi(n) loglog n)."""
    if x < 100:
        raise DomainError("limsup_tracker needs x >= 100")
    T = arith_tables(x)
    n = np.arange(16, x + 1, dtype=np.int64)
    n = n[_class_mask(T, n, cls)]
    ll = np.log(np.log(n.astype(float)))
    rs = T.sigma[n] / n / ll
    rp = n / T.phi[n] / ll
    i, j = int(np.argmax(rs)), int(np.argmax(rp))
    return {"sup_sigma": float(rs[i]), "argmax_sigma": int(n[i]),
            "sup_phi": float(rp[j]), "argmax_phi": int(n[j]),
            "theory_sigma": LIMSUP_THEORY[cls]}


def robin_ratio(x):
    """sigma(n)/(e^gamma n loglog n) for 16 <= n <= x (array index n - 16)."""
    T = arith_tables(x)
    n = np.arange(16, x + 1, dtype=np.int64)
    return n, T.sigma[16:x + 1] / n / (C.EXP_GAMMA * np.log(np.log(n.astype(float))))


def density_search(target, tol, budget):
    """Smallest 16 <= n <= budget with |sigma(n)/(e^g n loglog n) - target| < tol, else None."""
    if not 0 < target < 1 or tol <= 0:
        raise DomainError("need 0 < target < 1 and tol > 0")
    if budget < 16:
        return None
    n, r = robin_ratio(budget)
    hit = np.nonzero(np.abs(r - target) < tol)[0]
    return int(n[hit[0]]) if len(hit) else None


def normal_order_fraction(x, band):
    """Fractions of 16 <= n <= x with sigma(n)/n, resp. n/phi(n), in [1/band, band] e^g logloglog n."""
    if x < 10**4 or band <= 1:
        raise DomainError("need x >= 1e4 and band > 1")
    T = arith_tables(x)
    n = np.arange(16, x + 1, dtype=np.int64)
    centre = C.EXP_GAMMA * np.log(np.log(np.log(n.astype(float))))
    rs = T.sigma[16:x + 1] / n / centre
    rp = n / T.phi[16:x + 1] / centre
    inside = lambda r: float(np.mean((r >= 1 / band) & (r <= band)))
    return {"sigma": inside(rs), "phi": inside(rp)}
