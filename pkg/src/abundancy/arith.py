"""Exact divisor and totient arithmetic on factored integers.

Integers are carried as :class:`FactoredInteger` so that sigma(N)/N,
phi(N)/N and rho(N) can be formed exactly (as ``Fraction``) or in log
space for integers far beyond machine range.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
import itertools
import math
import re
import warnings

import numpy as np

from . import constants as C
from .errors import DomainError, IncompleteFactorizationError, PreconditionError
from .reports import CriterionReport

MR_DETERMINISTIC_BOUND = 3_317_044_064_679_887_385_961_981
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_probable_prime(n):
    """Miller-Rabin over the first 13 prime bases.

    Deterministic below ``MR_DETERMINISTIC_BOUND`` (> 2**64).
    """
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FactoredInteger:
    factors: tuple = ()  # ((p, e), ...) with p strictly increasing, e >= 1
    trusted: frozenset = field(default=frozenset(), compare=False)

    def __post_init__(self):
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError(f"not a canonical factorization: {self.factors}")
            last = p

    @classmethod
    def from_dict(cls, exps, trusted=frozenset()):
        return cls(tuple(sorted((int(p), int(e)) for p, e in exps.items() if e)),
                   frozenset(trusted))

    @classmethod
    def from_text(cls, text):
        """Parse ``"2^4 * 3^2 * 5 * 7"``; ``"1"`` is the empty product.

        Each base must pass a primality test; bases beyond the deterministic
        Miller-Rabin range are accepted as ``trusted`` with a warning.
        """
        text = text.strip()
        if text == "1":
            return cls()
        exps, trusted = {}, set()
        for term in text.split("*"):
            m = re.fullmatch(r"\s*(\d+)\s*(?:\^\s*(\d+))?\s*", term)
            if not m:
                raise ValueError(f"cannot parse factor {term!r}")
            p, e = int(m.group(1)), int(m.group(2) or 1)
            if p in exps:
                raise ValueError(f"prime {p} repeated in {text!r}")
            if not is_probable_prime(p):
                raise ValueError(f"{p} is not prime")
            if p >= MR_DETERMINISTIC_BOUND:
                warnings.warn(f"{p} is only a probable prime; marked trusted")
                trusted.add(p)
            exps[p] = e
        fi = cls.from_dict(exps, trusted)
        if str(fi) != " * ".join(t.strip() for t in text.split("*")):
            raise ValueError(f"non-canonical form {text!r}, expected {fi}")
        return fi

    def __str__(self):
        if not self.factors:
            return "1"
        return " * ".join(f"{p}^{e}" if e > 1 else str(p) for p, e in self.factors)

    @cached_property
    def value(self):
        return math.prod(p**e for p, e in self.factors)

    def __int__(self):
        return self.value

    @property
    def primes(self):
        return tuple(p for p, _ in self.factors)

    @property
    def exponents(self):
        return tuple(e for _, e in self.factors)

    @property
    def omega(self):
        return len(self.factors)

    @property
    def largest_prime(self):
        """P(N); 1 for N = 1."""
        return self.factors[-1][0] if self.factors else 1

    @property
    def nu2(self):
        return self.factors[0][1] if self.factors and self.factors[0][0] == 2 else 0

    @property
    def max_exponent(self):
        return max(self.exponents, default=0)

    def is_squarefree(self):
        return self.max_exponent <= 1

    def is_s_free(self, s):
        return self.max_exponent < s

    @cached_property
    def log(self):
        return math.fsum(e * math.log(p) for p, e in self.factors)

    def as_dict(self):
        return dict(self.factors)

    def __mul__(self, other):
        exps = self.as_dict()
        for p, e in other.factors:
            exps[p] = exps.get(p, 0) + e
        return FactoredInteger.from_dict(exps, self.trusted | other.trusted)


def factorize(n, table):
    """Trial division over ``table``; the cofactor is certified or rejected."""
    n = int(n)
    if n < 1:
        raise DomainError(f"factorize needs n >= 1, got {n}")
    exps, trusted = {}, set()
    r = n
    primes = table.primes
    bound = min(table.limit, math.isqrt(r))
    k = int(np.searchsorted(primes, bound, side="right"))
    if r < 2**62:
        # vectorised divisibility test, then exact extraction
        cand = primes[:k][(r % primes[:k]) == 0]
    else:
        cand = (int(p) for p in primes[:k])
    for p in cand:
        p = int(p)
        if p * p > r:
            break
        if r % p == 0:
            e = 0
            while r % p == 0:
                r //= p
                e += 1
            exps[p] = e
    if r > 1:
        # every prime <= min(limit, sqrt(r)) has been tried
        exps[r] = exps.get(r, 0) + 1
        if math.isqrt(r) > table.limit:
            if not is_probable_prime(r):
                raise IncompleteFactorizationError(
                    f"{n}: cofactor {r} is composite with no factor <= {table.limit}")
            if r >= MR_DETERMINISTIC_BOUND:
                warnings.warn(f"cofactor {r} of {n} is only a probable prime")
                trusted.add(r)
    return FactoredInteger.from_dict(exps, trusted)


_small_tables = {}


def factor_int(n):
    """Factorize n with a cached prime table reaching at least sqrt(n)."""
    from .primes import build_table
    need = max(1000, math.isqrt(int(n)) + 1)
    limit = max([L for L in _small_tables if L >= need], default=None)
    if limit is None:
        limit = max(need, 10**6) if need <= 10**7 else need
        _small_tables[limit] = build_table(limit)
    return factorize(n, _small_tables[limit])


def sigma_pp(p, e, s=1):
    """sigma_s(p^e)."""
    if s == 0:
        return e + 1
    q = p**s
    return (q ** (e + 1) - 1) // (q - 1)


def sigma_s(F, s=1):
    """Exact sum of s-th powers of divisors; s = 0 counts divisors."""
    if s < 0:
        raise DomainError("sigma_s needs s >= 0")
    return math.prod(sigma_pp(p, e, s) for p, e in F.factors)


def sigma(F):
    return sigma_s(F, 1)


def phi(F):
    return math.prod((p - 1) * p ** (e - 1) for p, e in F.factors)


def jordan(F, s):
    """Jordan totient J_s(N) = N^s prod (1 - p^-s)."""
    return math.prod((p**s - 1) * p ** (s * (e - 1)) for p, e in F.factors)


def mobius(F):
    return 0 if F.max_exponent > 1 else (-1) ** F.omega


def rho(F):
    """prod over p^a || N of (1 - p^-(a+1)), exact."""
    num = math.prod(p ** (e + 1) - 1 for p, e in F.factors)
    den = math.prod(p ** (e + 1) for p, e in F.factors)
    return Fraction(num, den)


def abundancy(F):
    """sigma(N)/N as an exact Fraction."""
    return Fraction(sigma(F), F.value)


def log_abundancy(F):
    """log(sigma(N)/N) = sum log((1 - p^-(a+1)) / (1 - 1/p)), compensated."""
    terms = []
    for p, e in F.factors:
        terms.append(math.log1p(-float(p) ** -(e + 1)))
        terms.append(-math.log1p(-1.0 / p))
    return math.fsum(terms)


def log_n_over_phi(F):
    return -math.fsum(math.log1p(-1.0 / p) for p in F.primes)


def log_space_error(F):
    """Certified absolute error bound on ``log_abundancy``/``log_n_over_phi``.

    Each log1p is within 1 ulp and fsum is exactly rounded, so a few
    machine epsilons per term (relative to the term size) suffices.
    """
    terms = 2 * F.omega + 2
    return 4 * terms * 2.0**-52 * max(1.0, abs(log_abundancy(F)) if F.factors else 1.0)


@dataclass(frozen=True)
class CoreRatios:
    sigma_over_n: Fraction
    phi_over_n: Fraction
    rho: Fraction
    omega: int
    sigma0: int
    log_n: float
    log_sigma_over_n: float


def core_ratios(F):
    phi_over_n = Fraction(math.prod(p - 1 for p in F.primes), math.prod(F.primes))
    r = rho(F)
    return CoreRatios(
        sigma_over_n=r / phi_over_n,
        phi_over_n=phi_over_n,
        rho=r,
        omega=F.omega,
        sigma0=sigma_s(F, 0),
        log_n=F.log,
        log_sigma_over_n=log_abundancy(F),
    )


# -- divisors ----------------------------------------------------------------

def divisor_exponents(F):
    """All divisors as exponent tuples aligned with ``F.primes``."""
    return itertools.product(*(range(e + 1) for e in F.exponents))


def divisors(F):
    ps = F.primes
    return sorted(math.prod(p**k for p, k in zip(ps, ks)) for ks in divisor_exponents(F))


def _sub(F, ks):
    return FactoredInteger(tuple((p, k) for p, k in zip(F.primes, ks) if k))


# -- identity suite -------------------------------------------------------------

@dataclass(frozen=True)
class IdentityResult:
    holds: bool
    lhs: object
    rhs: object
    erratum: bool = False  # the form exactly as printed; failure is evidence, not a bug
    skipped: bool = False


class IdentityReport(dict):
    """Mapping identity name -> IdentityResult."""

    def failures(self):
        return {k: v for k, v in self.items()
                if not v.holds and not v.erratum and not v.skipped}

    def errata_failing(self):
        return {k: v for k, v in self.items() if v.erratum and not v.holds}

    @property
    def ok(self):
        return not self.failures()


def _eq(lhs, rhs, erratum=False):
    return IdentityResult(lhs == rhs, lhs, rhs, erratum)


def _lt(lhs, rhs, erratum=False):
    return IdentityResult(lhs < rhs, lhs, rhs, erratum)


def _all(results):
    """Collapse a list of results; report the first failing instance."""
    for r in results:
        if not r.holds:
            return r
    return results[0] if results else IdentityResult(True, None, None)


DEFAULT_IDENTITY_BOUND = 10**12


def identity_suite(F, bound=DEFAULT_IDENTITY_BOUND, gcd_oracle_bound=1000):
    rep = IdentityReport()
    N = F.value
    if N > bound:
        for name in _IDENTITY_NAMES:
            rep[name] = IdentityResult(False, None, None, skipped=True)
        return rep

    ps, es = F.primes, F.exponents
    divs = [(ks, _sub(F, ks)) for ks in divisor_exponents(F)]
    dvals = [(d.value, d) for _, d in divs]
    sig = {s: sigma_s(F, s) for s in (0, 1, 2, 3)}
    mu = mobius

    # divisor count
    rep["divisor_count"] = _eq(sig[0], len(divs))
    # product formula equals the divisor sum
    rep["sigma_product_formula"] = _all([_eq(sig[s], sum(d**s for d, _ in dvals)) for s in (1, 2, 3)])
    # Moebius pair (standard form) and the printed negative-power form
    rep["mobius_inversion_sigma"] = _all([
        _eq(N**s, sum(mu(_sub(F, tuple(e - k for e, k in zip(es, ks)))) * sigma_s(d, s)
                      for ks, d in divs))
        for s in (1, 2)])
    rep["reciprocal_divisor_sum_printed"] = _eq(Fraction(sig[1]), sum(Fraction(1, d) for d, _ in dvals), erratum=True)
    rep["sigma_squared_convolution"] = _eq(sig[1] ** 2, sum(sigma(d * d) * (N // dv) for dv, d in dvals))
    # sigma(d)/d <= sigma(N)/N for d | N (cross-multiplied)
    rep["abundancy_monotone_divisors"] = IdentityResult(all(sigma(d) * N <= sig[1] * dv for dv, d in dvals), None, None)
    rep["mobius_weighted_sigma"] = _eq(sum(mu(d) * sigma(d) for _, d in dvals), (-1) ** F.omega * math.prod(ps))
    # M = p and M = p*N for p | N share a factor with N
    sub = []
    for p in ps:
        P = FactoredInteger(((p, 1),))
        for M in (P, P * F):
            for s in (0, 1, 2):
                sub.append(_lt(sigma_s(M * F, s), sigma_s(M, s) * sigma_s(F, s)))
    rep["submultiplicative_common_factor"] = _all(sub)
    # sigma_s(Np) = sigma_s(N) sigma_s(p) - p^s sigma_s(N/p), p | N
    sub, printed = [], []
    for i, p in enumerate(ps):
        P = FactoredInteger(((p, 1),))
        Nop = FactoredInteger.from_dict({**F.as_dict(), p: es[i] - 1})
        for s in (1, 2):
            rhs = sig[s] * sigma_s(P, s) - p**s * sigma_s(Nop, s)
            sub.append(_eq(sigma_s(F * P, s), rhs))
            printed.append(_eq(sig[s], rhs, erratum=True))
    rep["sigma_prime_recursion"] = _all(sub)
    rep["sigma_prime_recursion_printed"] = _all(printed) if printed else IdentityResult(True, None, None, erratum=True)
    sq = F * F
    rep["sigma_square_identity"] = _all([
        _eq(sig[s] ** 2, sum(dv**s * sigma_s(_divide(sq, d * d), s) for dv, d in dvals))
        for s in (1, 2)])
    sub = []
    for M in _companions(F):
        g = math.gcd(M.value, N)
        MN = M * F
        gdivs = [d for _, d in divs if g % d.value == 0]
        for s in (1, 2):
            sub.append(_eq(sigma_s(M, s) * sig[s],
                           sum(d.value**s * sigma_s(_divide(MN, d * d), s) for d in gdivs)))
    rep["sigma_pair_identity"] = _all(sub)
    # normalised product bound, zeta bound, and the printed form
    sub, printed = [], []
    for s in (1, 2, 3):
        prod = math.prod(Fraction(p**s, p**s - 1) for p in ps)
        lhs = Fraction(sigma_s(F, s), N**s)
        # N = 1 makes both sides empty products
        sub.append(_lt(lhs, prod) if F.factors else _eq(lhs, prod))
        printed.append(_lt(Fraction(sigma_s(F, s)), prod, erratum=True))
    rep["normalized_product_bound"] = _all(sub)
    rep["unnormalized_product_bound_printed"] = _all(printed)
    rep["zeta_bound"] = _all([_lt(Fraction(sigma_s(F, s), N**s), C.zeta_bracket(s)[0]) for s in (2, 3)])

    # sigma/N through rho, sigma_2 and sigma_3
    phiN = phi(F)
    r = rho(F)
    rep["abundancy_totient_rho"] = _eq(Fraction(sig[1], N), Fraction(N, phiN) * r)
    rep["abundancy_totient_rho_printed"] = _eq(Fraction(sig[1], phiN), Fraction(N, phiN) * r, erratum=True)
    rep["sigma_from_sigma2"] = _eq(Fraction(sig[1]), sig[2] * math.prod(
        Fraction(p + 1, p ** (a + 1) + 1) for p, a in F.factors))
    rep["sigma_from_sigma3"] = _eq(Fraction(sig[1]), sig[3] * math.prod(
        Fraction(p * p + p + 1, p ** (2 * (a + 1)) + p ** (a + 1) + 1) for p, a in F.factors))
    ab = Fraction(sig[1], N)
    rep["abundancy_from_sigma2"] = _eq(ab, Fraction(sig[2], N**2) * math.prod(
        Fraction(p ** (3 * a + 2) + p**a, p * p + 1)
        * Fraction(p**3 + p**2 + p + 1,
                   p ** (3 * (a + 1)) + p ** (2 * (a + 1)) + p ** (a + 1) + 1)
        for p, a in F.factors))
    rep["abundancy_from_sigma3"] = _eq(ab, Fraction(sig[3], N**3) * math.prod(
        Fraction(p ** (5 * a + 3) + p ** (2 * a), p**3 + 1)
        * Fraction(sum(p**j for j in range(6)),
                   sum(p ** (j * (a + 1)) for j in range(6)))
        for p, a in F.factors))
    mid3 = math.prod(Fraction(p * p, p * p - 1) * Fraction(p + 1, p) for p in ps)
    out3 = C.zeta_bracket(2)[0] * math.prod(Fraction(p + 1, p) for p in ps)
    rep["abundancy_chain_zeta2"] = IdentityResult(ab < mid3 < out3 if F.factors else ab < out3, ab, (mid3, out3))
    mid4 = math.prod(Fraction(p**3, p**3 - 1) * Fraction(p * p + p + 1, p * p) for p in ps)
    out4 = C.zeta_bracket(3)[0] * math.prod(Fraction(p * p + p + 1, p * p) for p in ps)
    rep["abundancy_chain_zeta3"] = IdentityResult(ab < mid4 < out4 if F.factors else ab < out4, ab, (mid4, out4))

    # Totient properties
    prod_form = N * math.prod(Fraction(p - 1, p) for p in ps)
    if N <= gcd_oracle_bound:
        oracle = sum(1 for m in range(1, N + 1) if math.gcd(m, N) == 1)
    else:
        oracle = phiN
    rep["totient_product"] = _eq(prod_form, oracle)
    rep["totient_mobius"] = _eq(Fraction(phiN), N * sum(Fraction(mu(d), dv) for dv, d in dvals))
    rep["totient_divisor_sum"] = _eq(N, sum(phi(d) for _, d in dvals))
    rep["totient_divisor_sum_printed"] = _eq(phiN, sum(phi(d) for _, d in dvals), erratum=True)
    sub, printed = [], []
    for s in (1, 2, 3):
        js = jordan(F, s)
        sub.append(_eq(Fraction(js), N**s * math.prod(1 - Fraction(1, p**s) for p in ps)))
        sub.append(_eq(N**s, sum(jordan(d, s) for _, d in dvals)))
        sub.append(_eq(js, sum(mu(_sub(F, tuple(e - k for e, k in zip(es, ks)))) * d.value**s
                               for ks, d in divs)))
        printed.append(_eq(N**s, sum(mu(_sub(F, tuple(e - k for e, k in zip(es, ks)))) * jordan(d, s)
                                     for ks, d in divs), erratum=True))
    rep["jordan_identities"] = _all(sub)
    rep["jordan_mobius_printed"] = _all(printed)
    ratio = Fraction(N, phiN)
    sub, printed = [], []
    for mks, m in divs:
        if m.max_exponent > 1:
            continue
        mv = m.value
        tail = sum(Fraction(1, phi(d)) for dv, d in dvals if dv % mv == 0 and d.max_exponent <= 1)
        sub.append(_eq(ratio, mv * tail))
        printed.append(_eq(ratio, Fraction(mv, mu(m)) * tail, erratum=True))
    rep["totient_ratio_squarefree_sum"] = _all(sub)
    rep["totient_ratio_squarefree_sum_printed"] = _all(printed)
    return rep


def _divide(F, D):
    exps = F.as_dict()
    for p, e in D.factors:
        exps[p] -= e
        if exps[p] < 0:
            raise ValueError(f"{D} does not divide {F}")
    return FactoredInteger.from_dict(exps)


def _companions(F):
    """A few M with gcd(M, N) > 1 (or N itself) for the two-variable identities."""
    out = [F, FactoredInteger(((2, 2), (3, 1)))]
    if F.factors:
        p = F.primes[0]
        out.append(FactoredInteger(((p, 2),)) * FactoredInteger(((max(F.primes) + 2, 1),))
                   if is_probable_prime(max(F.primes) + 2) else FactoredInteger(((p, 3),)))
    return out


_IDENTITY_NAMES = (
    "divisor_count", "sigma_product_formula", "mobius_inversion_sigma", "reciprocal_divisor_sum_printed", "sigma_squared_convolution",
    "abundancy_monotone_divisors", "mobius_weighted_sigma", "submultiplicative_common_factor", "sigma_prime_recursion", "sigma_prime_recursion_printed", "sigma_square_identity",
    "sigma_pair_identity", "normalized_product_bound", "unnormalized_product_bound_printed", "zeta_bound", "abundancy_totient_rho",
    "abundancy_totient_rho_printed", "sigma_from_sigma2", "sigma_from_sigma3", "abundancy_from_sigma2", "abundancy_from_sigma3", "abundancy_chain_zeta2",
    "abundancy_chain_zeta3", "totient_product", "totient_mobius", "totient_divisor_sum", "totient_divisor_sum_printed",
    "jordan_identities", "jordan_mobius_printed", "totient_ratio_squarefree_sum", "totient_ratio_squarefree_sum_printed",
)


def duncan_bound(F):
    """sigma(N) < (pi^2/6) N (1 + omega(N) log 2) for squarefree N."""
    if not F.is_squarefree():
        raise PreconditionError(f"{F} is not squarefree")
    ab = abundancy(F)
    k = F.omega
    # certified lower bound on the rhs/N: pi^2/6 > 1/0.608, log 2 > 0.693147
    lo = (1 / C.SIX_OVER_PI2_BRACKET[1]) * (1 + k * Fraction(693147, 10**6))
    rhs_ratio = C.PI2_OVER_SIX * (1 + k * math.log(2))
    holds = ab < lo
    margin_ratio = rhs_ratio - float(ab)
    try:
        margin, note = float(F.value) * margin_ratio, ""
    except OverflowError:
        margin, note = margin_ratio, "margin in sigma/N units"
    return CriterionReport(F, "duncan", holds, margin, "exact_rational",
                           indeterminate=not holds and margin_ratio > 0, note=note)
