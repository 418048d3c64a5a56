"""Harmonic and prime-reciprocal sums, Euler products and Mertens constants.

Every comparison produces a :class:`RemainderSample`: the empirical value,
the predicted main term, their difference and an envelope the difference is
expected to stay inside. Sums over primes are read off cumulative
``longdouble`` arrays cached on the :class:`PrimeTable`, so grids of many x
cost one pass.
"""
from dataclasses import dataclass
from fractions import Fraction
import math
from typing import NamedTuple, Optional

import numpy as np

from . import constants as C
from .errors import DomainError, RangeError
from .reports import CriterionReport


@dataclass(frozen=True)
class RemainderSample:
    x: float
    empirical: float
    main_term: float
    residual: float
    envelope: float
    within: bool

    @classmethod
    def make(cls, x, empirical, main_term, envelope):
        residual = empirical - main_term
        return cls(float(x), float(empirical), float(main_term), float(residual),
                   float(envelope), bool(abs(residual) <= envelope))


@dataclass(frozen=True)
class ConstantEstimate:
    name: str
    value: float
    reference: Optional[float]
    abs_error: Optional[float]
    method: str = ""


# -- envelopes ---------------------------------------------------------------

def mertens_envelope(x, variant="corrected"):
    """Unconditional envelope for sum 1/p - log log x - B.

    ``corrected``: 1/(10 log^2 x) + 4/(15 log^3 x);
    ``printed``: both terms over log^2 x.
    """
    L = np.log(x)
    if variant == "corrected":
        return 1 / (10 * L**2) + 4 / (15 * L**3)
    if variant == "printed":
        return 1 / (10 * L**2) + 4 / (15 * L**2)
    raise ValueError(f"unknown envelope variant {variant!r}")


def mertens_rh_envelope(x):
    """(3 log x + 4) / (8 pi sqrt x); conditional, reported only."""
    return (3 * np.log(x) + 4) / (8 * math.pi * np.sqrt(x))


# -- power-series guards -----------------------------------------------------

def log1p_partial(t, terms):
    """sum_{n=1}^{terms} (-1)^(n+1) t^n / n."""
    return sum((-1) ** (n + 1) * t**n / n for n in range(1, terms + 1))


def log1p_bracket(t, m):
    """(lower, upper) for log(1+t), 0 < t <= 1, from 2m and 2m+1 terms."""
    return log1p_partial(t, 2 * m), log1p_partial(t, 2 * m + 1)


def inner_tail(p):
    """sum_{n>=2} 1/(n p^n) = -log(1 - 1/p) - 1/p, without cancellation."""
    u = 1.0 / np.asarray(p, dtype=np.float64)
    small = u < 1e-2
    us = np.where(small, u, 0.0)
    series = sum(us**n / n for n in range(2, 10))
    direct = -np.log1p(-np.where(small, 0.5, u)) - np.where(small, 0.5, u)
    return np.where(small, series, direct)


# -- harmonic sums -------------------------------------------------------------

_HARMONIC_VARIANTS = ("plain", "ap", "coprime", "squarefree", "log_power", "inverse_log")


def _squarefree_mask(X):
    mask = np.ones(X + 1, dtype=bool)
    mask[0] = False
    for d in range(2, math.isqrt(X) + 1):
        mask[d * d::d * d] = False
    return mask


def harmonic_cumulative(X, variant="plain", a=0, q=1, N=1, k=1):
    """S[n] = sum over admissible m <= n of the variant's term, n = 0..X."""
    n = np.arange(X + 1, dtype=np.longdouble)
    n[0] = 1
    if variant == "plain":
        terms = 1 / n
    elif variant == "ap":
        idx = np.arange(X + 1)
        terms = np.where(idx % q == a % q, 1 / n, 0)
    elif variant == "coprime":
        idx = np.arange(X + 1)
        terms = np.where(np.gcd(idx, N) == 1, 1 / n, 0)
    elif variant == "squarefree":
        terms = np.where(_squarefree_mask(X), 1 / n, 0)
    elif variant == "log_power":
        terms = np.log(n) ** k / n
    elif variant == "inverse_log":
        ln = np.log(n)
        terms = np.where(np.arange(X + 1) >= 2, 1 / (n * np.where(ln > 0, ln, 1)), 0)
    else:
        raise ValueError(f"unknown harmonic variant {variant!r}")
    terms[0] = 0
    return np.cumsum(terms)


def _harmonic_main(x, variant, a, q, N, k, ap_slope):
    """Main term without its additive constant, and the O-term shape."""
    L = np.log(x)
    if variant == "plain":
        return L, 1 / x
    if variant == "ap":
        slope = 1 / q if ap_slope == "standard" else 1 / _phi_int(q)
        return slope * L, 1 / x
    if variant == "coprime":
        # error of the Moebius expansion is at most 2^omega(N) / x
        return _phi_int(N) / N * L, 2 ** _omega_int(N) / x
    if variant == "squarefree":
        return C.SIX_OVER_PI2 * L, x**-0.5
    if variant == "log_power":
        return L ** (k + 1) / (k + 1), L**k / x
    if variant == "inverse_log":
        return np.log(L), 1 / (x * L)
    raise ValueError(variant)


def _known_constant(variant):
    return C.GAMMA if variant == "plain" else None


def _harmonic_domain(x, variant):
    lo = 2 if variant == "inverse_log" else 1
    if x < lo:
        raise DomainError(f"{variant} harmonic sum needs x >= {lo}, got {x}")


def fit_harmonic_constant(variant, xs, a=0, q=1, N=1, k=1, ap_slope="standard"):
    """Additive constant over ``xs``, weighted by 1/shape^2; returns (c, rms residual)."""
    xs = np.asarray(xs, dtype=float)
    S = harmonic_cumulative(int(xs.max()), variant, a, q, N, k)
    emp = S[np.floor(xs).astype(int)].astype(float)
    main, shape = _harmonic_main(xs, variant, a, q, N, k, ap_slope)
    d = emp - main
    c = float(np.average(d, weights=np.broadcast_to(shape, d.shape) ** -2.0))
    return c, float(np.sqrt(np.mean((d - c) ** 2)))


def fit_ap_slope(a, q, xs):
    """Fit sum_{n = a mod q, n <= x} 1/n = slope * log x + c.

    Returns (slope, c, 1/q, 1/phi(q)) so the two candidate slopes can be
    compared with the data.
    """
    xs = np.asarray(xs, dtype=float)
    S = harmonic_cumulative(int(xs.max()), "ap", a=a, q=q)
    emp = S[np.floor(xs).astype(int)].astype(float)
    X = np.column_stack([np.log(xs), np.ones(len(xs))])
    (slope, c), *_ = np.linalg.lstsq(X, emp, rcond=None)
    return float(slope), float(c), 1 / q, 1 / _phi_int(q)


def harmonic_sum(x, variant="plain", a=0, q=1, N=1, k=1, constant=None,
                 envelope_constant=1.0, ap_slope="standard"):
    """Direct summation against the asymptotic main term.

    Constants the statement leaves unnamed are fitted on a log-spaced grid
    over [max(2, x/1000), x] unless passed in.
    """
    if variant not in _HARMONIC_VARIANTS:
        raise ValueError(f"unknown harmonic variant {variant!r}")
    _harmonic_domain(x, variant)
    X = int(math.floor(x))
    S = harmonic_cumulative(X, variant, a, q, N, k)
    empirical = float(S[X])
    if constant is None:
        constant = _known_constant(variant)
    if constant is None:
        lo = max(2.0, x / 1000)
        grid = np.exp(np.linspace(math.log(lo), math.log(max(x, lo + 1)), 50))
        constant, _ = fit_harmonic_constant(variant, grid, a, q, N, k, ap_slope)
    main, shape = _harmonic_main(float(x), variant, a, q, N, k, ap_slope)
    return RemainderSample.make(x, empirical, main + constant, envelope_constant * shape)


def _phi_int(q):
    result, m, p = q, q, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _omega_int(q):
    count, m, p = 0, q, 2
    while p * p <= m:
        if m % p == 0:
            count += 1
            while m % p == 0:
                m //= p
        p += 1
    return count + (m > 1)


def coprime_harmonic_constant(N):
    """Exact constant in sum_{n<=x, (n,N)=1} 1/n = (phi(N)/N)(log x + gamma) - sum mu(d) log d / d."""
    ps, m, p = [], N, 2
    while p * p <= m:
        if m % p == 0:
            ps.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        ps.append(m)
    total = 0.0
    for mask in range(1, 2 ** len(ps)):
        d = math.prod(p for i, p in enumerate(ps) if mask >> i & 1)
        total += (-1) ** bin(mask).count("1") * math.log(d) / d
    return _phi_int(N) / N * C.GAMMA - total


# -- sums over primes -----------------------------------------------------------

_PRIME_VARIANTS = {
    "inv_p": lambda p: 1 / p,
    "inv_p_minus_1": lambda p: 1 / (p - 1),
    "inv_p_plus_1": lambda p: 1 / (p + 1),
    "log_one_minus": lambda p: np.log1p(-1 / p),
    "log_one_plus": lambda p: np.log1p(1 / p),
    "inner_tail": lambda p: inner_tail(p).astype(np.longdouble),
    "pp_minus": lambda p: 1 / (p * (p - 1)),
    "pp_plus": lambda p: 1 / (p * (p + 1)),
}


def prime_cumulative(table, key):
    """Cumulative sum over the table's primes of a named per-prime term."""
    f = _PRIME_VARIANTS[key]
    return table.derived(("cum", key), lambda ps: np.cumsum(f(ps.astype(np.longdouble))))


def _sum_upto(table, cum, xs):
    idx = np.searchsorted(table.primes, np.floor(np.asarray(xs, dtype=float)), side="right")
    out = np.where(idx > 0, cum[np.maximum(idx - 1, 0)], 0)
    return out.astype(np.longdouble)


def _check_x(table, xs, lo=2):
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if xs.size and (xs.min() < lo or xs.max() > table.limit):
        raise RangeError(f"x outside [{lo}, {table.limit}]")
    return xs


def beyond_limit_pp(table):
    """Integral estimate of sum_{p > limit} 1/p^2 ~ 1/(L log L)."""
    L = table.limit
    return 1 / (L * math.log(L))


def a_constants(table):
    """(A_minus, A_plus) for sum 1/(p-1) and sum 1/(p+1).

    sum 1/(p-1) = sum 1/p + sum 1/(p(p-1)) and sum 1/(p+1) = sum 1/p - sum 1/(p(p+1)).
    """
    tail = beyond_limit_pp(table)
    s_minus = float(prime_cumulative(table, "pp_minus")[-1]) + tail
    s_plus = float(prime_cumulative(table, "pp_plus")[-1]) + tail
    return C.MERTENS_B + s_minus, C.MERTENS_B - s_plus


def a_pairing_residuals(table, x):
    """|residual| at x for every sign/denominator pairing of the A constants.

    Keys are (variant, sign, denominator) with the constant
    B + sign * sum 1/(p(p + denominator)).
    """
    tail = beyond_limit_pp(table)
    sums = {-1: float(prime_cumulative(table, "pp_minus")[-1]) + tail,
            +1: float(prime_cumulative(table, "pp_plus")[-1]) + tail}
    out = {}
    lnln = math.log(math.log(x))
    for variant in ("inv_p_minus_1", "inv_p_plus_1"):
        emp = float(_sum_upto(table, prime_cumulative(table, variant), [x])[0])
        for sign in (+1, -1):
            for den in (-1, +1):
                const = C.MERTENS_B + sign * sums[den]
                out[(variant, sign, den)] = abs(emp - lnln - const)
    return out


def prime_sum_grid(table, xs, variant="inv_p", envelope="corrected", a=1, q=4,
                   constant=None, envelope_constant=1.0):
    xs = _check_x(table, xs)
    lnln = np.log(np.log(xs))
    if variant == "ap":
        key = ("ap", a, q)
        cum = table.derived(key, lambda ps: np.cumsum(
            np.where(ps % q == a % q, 1 / ps.astype(np.longdouble), 0)))
        emp = _sum_upto(table, cum, xs).astype(float)
        main = lnln / _phi_int(q)
        if constant is None:
            constant = float(np.mean(emp - main)) if len(xs) > 1 else fit_prime_ap_constant(table, a, q)
        return [RemainderSample.make(x, e, m + constant, envelope_constant / math.log(x))
                for x, e, m in zip(xs, emp, main)]
    if variant not in ("inv_p", "inv_p_minus_1", "inv_p_plus_1"):
        raise ValueError(f"unknown prime-sum variant {variant!r}")
    emp = _sum_upto(table, prime_cumulative(table, variant), xs).astype(float)
    if constant is None:
        a_minus, a_plus = a_constants(table)
        constant = {"inv_p": C.MERTENS_B, "inv_p_minus_1": a_minus,
                    "inv_p_plus_1": a_plus}[variant]
    env = mertens_envelope(xs, envelope)
    if variant != "inv_p":
        # tail of sum 1/(p(p -+ 1)) beyond x is below sum_{n > x} 1/(n(n-1)) = 1/floor(x)
        env = env + 1 / np.floor(xs)
    return [RemainderSample.make(x, e, lnln_x + constant, en)
            for x, e, lnln_x, en in zip(xs, emp, lnln, env)]


def fit_prime_ap_constant(table, a, q, x_lo=1e3):
    xs = np.exp(np.linspace(math.log(x_lo), math.log(table.limit), 100))
    cum = table.derived(("ap", a, q), lambda ps: np.cumsum(
        np.where(ps % q == a % q, 1 / ps.astype(np.longdouble), 0)))
    emp = _sum_upto(table, cum, xs).astype(float)
    return float(np.mean(emp - np.log(np.log(xs)) / _phi_int(q)))


def prime_sum(table, x, variant="inv_p", envelope="corrected", a=1, q=4, constant=None):
    if variant == "ap" and constant is None:
        constant = fit_prime_ap_constant(table, a, q)
    return prime_sum_grid(table, [x], variant, envelope, a, q, constant)[0]


# -- Euler products ------------------------------------------------------------

def euler_product_grid(table, xs, variant="one_minus", envelope_constant=1.0):
    """Products over p <= x via exp of compensated log-sums.

    one_minus and p_over_pm1 use the envelope main/(2 log^2 x), asserted only
    for x >= 286; one_plus uses envelope_constant / (x log x).
    """
    xs = _check_x(table, xs, lo=0)
    L = np.log(np.maximum(xs, 2.0))
    if variant == "one_minus":
        s = _sum_upto(table, prime_cumulative(table, "log_one_minus"), xs)
        emp = np.exp(s.astype(float))
        main = C.EXP_MINUS_GAMMA / L
        env = main / (2 * L**2)
    elif variant == "p_over_pm1":
        s = _sum_upto(table, prime_cumulative(table, "log_one_minus"), xs)
        emp = np.exp(-s.astype(float))
        main = C.EXP_GAMMA * L
        env = main / (2 * L**2)
    elif variant == "one_plus":
        s = _sum_upto(table, prime_cumulative(table, "log_one_plus"), xs)
        emp = np.exp(s.astype(float))
        main = 6 * C.EXP_GAMMA / math.pi**2 * L
        env = envelope_constant / (xs * L)
    else:
        raise ValueError(f"unknown product variant {variant!r}")
    return [RemainderSample.make(x, e, m, v) for x, e, m, v in zip(xs, emp, main, env)]


def euler_product(table, x, variant="one_minus", envelope_constant=1.0):
    if x < 2:
        return RemainderSample.make(x, 1.0, float("nan"), float("inf"))
    return euler_product_grid(table, [x], variant, envelope_constant)[0]


# -- tails and constants ---------------------------------------------------------

class Tail(NamedTuple):
    value: float
    truncated_at: int


def tail_sum(table, x):
    """sum over x < p <= limit of sum_{n>=2} 1/(n p^n)."""
    if x < 2 or x >= table.limit:
        raise RangeError(f"tail_sum needs 2 <= x < {table.limit}")
    cum = prime_cumulative(table, "inner_tail")
    head = _sum_upto(table, cum, [x])[0]
    return Tail(float(cum[-1] - head), table.limit)


def tail_sum_grid(table, xs):
    cum = prime_cumulative(table, "inner_tail")
    return (cum[-1] - _sum_upto(table, cum, xs)).astype(float)


def _mobius_upto(n):
    mu = np.ones(n + 1, dtype=np.int8)
    mu[0] = 0
    for p in range(2, n + 1):
        if all(p % d for d in range(2, math.isqrt(p) + 1)):
            mu[p::p] *= -1
            mu[p * p::p * p] = 0
    return mu


def b_series_log_zeta(terms=60):
    """gamma + sum_{n>=2} mu(n)/n log zeta(n), zeta from certified brackets."""
    mu = _mobius_upto(terms)
    total = []
    for n in range(2, terms + 1):
        if mu[n]:
            lo, hi = C.zeta_bracket(n)
            total.append(int(mu[n]) / n * math.log1p(float((lo + hi) / 2 - 1)))
    return C.GAMMA + math.fsum(total)


def b_series_printed(terms=10_000):
    """gamma + sum_{n>=2} mu(n) zeta(n)/n, the form as printed."""
    mu = _mobius_upto(terms)
    total = []
    for n in range(2, terms + 1):
        if mu[n]:
            if n <= 60:
                lo, hi = C.zeta_bracket(n)
                z = float((lo + hi) / 2)
            else:
                z = 1.0 + 2.0**-n
            total.append(int(mu[n]) * z / n)
    return C.GAMMA + math.fsum(total)


def estimate_gamma(x):
    """H_x - log x - 1/(2x) + 1/(12x^2) with H_x summed in extended precision."""
    S = harmonic_cumulative(int(x))
    return float(S[-1] - np.log(np.longdouble(x))) - 1 / (2 * x) + 1 / (12 * x * x)


def estimate_constants(table, ap=((1, 4), (3, 4))):
    if table.limit < 10**5:
        raise DomainError("estimate_constants needs table.limit >= 1e5")
    out = []
    g = estimate_gamma(min(table.limit, 10**7))
    out.append(ConstantEstimate("gamma", g, C.GAMMA, abs(g - C.GAMMA), "harmonic sum"))
    # B = gamma + sum (log(1 - 1/p) + 1/p); tail beyond the table ~ 1/(2 L log L)
    head = float(prime_cumulative(table, "inner_tail")[-1])
    b = C.GAMMA - head - beyond_limit_pp(table) / 2
    out.append(ConstantEstimate("B", b, C.MERTENS_B, abs(b - C.MERTENS_B), "gamma + prime sum"))
    bs = b_series_log_zeta()
    out.append(ConstantEstimate("B", bs, C.MERTENS_B, abs(bs - C.MERTENS_B), "log-zeta series"))
    a_minus, a_plus = a_constants(table)
    out.append(ConstantEstimate("A_minus", a_minus, None, None, "B + sum 1/(p(p-1))"))
    out.append(ConstantEstimate("A_plus", a_plus, None, None, "B - sum 1/(p(p+1))"))
    xs = np.exp(np.linspace(math.log(1e3), math.log(min(table.limit, 10**7)), 60))
    for a, q in ap:
        baq = fit_prime_ap_constant(table, a, q)
        out.append(ConstantEstimate("B_aq", baq, None, None, f"fit a={a} q={q}"))
        gaq, _ = fit_harmonic_constant("ap", xs, a=a, q=q)
        out.append(ConstantEstimate("gamma_aq", gaq, None, None, f"fit a={a} q={q}"))
    return out


def elementary_bound_rhs(x):
    return np.log(np.log(x)) - math.log(math.log(2)) + 1 / (2 * math.log(2))


def elementary_bound_check(table, x):
    """sum_{p<=x} 1/p <= log log x - log log 2 + 1/(2 log 2)."""
    if x < 3:
        raise DomainError("elementary bound needs x >= 3")
    _check_x(table, [x], lo=3)
    lhs = float(_sum_upto(table, prime_cumulative(table, "inv_p"), [x])[0])
    margin = float(elementary_bound_rhs(x)) - lhs
    return CriterionReport(x, "elementary_prime_sum", margin >= 0, margin, "log_space",
                           error_bound=1e-12, extra={"lhs": lhs})


def elementary_bound_scan(table, x_max=None):
    """Margins at every prime 3 <= p <= x_max.

    Between consecutive primes the sum is constant and the bound increases,
    so the worst case on [p, p') is at x = p.
    """
    x_max = table.limit if x_max is None else x_max
    k = table.count_upto(x_max)
    ps = table.primes[1:k].astype(float)
    lhs = prime_cumulative(table, "inv_p")[1:k].astype(float)
    return ps, elementary_bound_rhs(ps) - lhs
