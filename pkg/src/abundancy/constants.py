"""Reference constants and certified rational brackets.

Decimal strings are kept verbatim so that rational brackets can be built
from them without going through binary floating point.
"""
from fractions import Fraction
from functools import lru_cache
import math

import mpmath

GAMMA_DIGITS = "0.57721566490153286060651209008240243104215933593992"
MERTENS_B_DIGITS = "0.26149721284764278375542683860869585905156664"
ZETA3_DIGITS = "1.20205690315959428539973816151144999076498629234049"
# rounded to 50 places, so the bracket is symmetric
ZETA5_DIGITS = "1.03692775514336992633136548645703416805708091950191"
ZETA7_DIGITS = "1.00834927738192282683979754984979675959986356056524"

GAMMA = float(GAMMA_DIGITS)
MERTENS_B = float(MERTENS_B_DIGITS)
EXP_GAMMA = math.exp(GAMMA)
EXP_MINUS_GAMMA = math.exp(-GAMMA)
SIX_OVER_PI2 = 6.0 / math.pi**2
PI2_OVER_SIX = math.pi**2 / 6.0

# e^gamma = 1.78107241799...
EXP_GAMMA_BRACKET = (Fraction(178107, 100000), Fraction(178108, 100000))
# 6/pi^2 = 0.607927...
SIX_OVER_PI2_BRACKET = (Fraction(6079, 10000), Fraction(608, 1000))

# Robin's unconditional constant as it appears in the statement; the
# published value is 0.6483.
ROBIN_UNCONDITIONAL_C = 0.6482
ROBIN_PUBLISHED_C = 0.6483
# Rosser-Schoenfeld totient constant, dimensionally consistent reading.
RS_TOTIENT_C = 2.5


def _decimal_bracket(digits, symmetric=False):
    whole, frac = digits.split(".")
    value = Fraction(int(whole + frac), 10 ** len(frac))
    ulp = Fraction(1, 10 ** len(frac))
    return (value - ulp if symmetric else value, value + ulp)


def _iv_bracket(x):
    lo, hi = mpmath.mpf(x.a), mpmath.mpf(x.b)
    return Fraction(*_mpf_ratio(lo)), Fraction(*_mpf_ratio(hi))


def _mpf_ratio(x):
    man, exp = x.man_exp
    man = int(man)
    if exp >= 0:
        return man * 2**exp, 1
    return man, 2**-exp


@lru_cache(maxsize=None)
def zeta_bracket(s):
    """Rational (lo, hi) with lo < zeta(s) < hi, for integer s >= 2."""
    if s < 2 or int(s) != s:
        raise ValueError("zeta_bracket needs an integer s >= 2")
    s = int(s)
    if s == 3:
        return _decimal_bracket(ZETA3_DIGITS)
    if s == 5:
        return _decimal_bracket(ZETA5_DIGITS, symmetric=True)
    if s == 7:
        return _decimal_bracket(ZETA7_DIGITS, symmetric=True)
    if s in (2, 4, 6):
        mpmath.iv.dps = 40
        num, den = {2: (1, 6), 4: (1, 90), 6: (1, 945)}[s]
        return _iv_bracket(mpmath.iv.pi**s * num / den)
    # s >= 8: partial Dirichlet sum plus integral bounds on the tail
    m = 50
    head = sum(Fraction(1, n**s) for n in range(1, m + 1))
    return head + Fraction(1, (s - 1) * (m + 1) ** (s - 1)), head + Fraction(1, (s - 1) * m ** (s - 1))


def zeta(s):
    lo, hi = zeta_bracket(s)
    return float((lo + hi) / 2)


def exp_gamma_interval(dps=40):
    """Tight certified bracket of e^gamma from interval arithmetic."""
    mpmath.iv.dps = dps
    return _iv_bracket(mpmath.iv.exp(mpmath.iv.euler))


def loglog_interval(n, dps=40):
    """Certified bracket of log log n for an integer (or Fraction) n > e."""
    mpmath.iv.dps = dps
    if isinstance(n, Fraction):
        x = mpmath.iv.mpf(n.numerator) / n.denominator
    else:
        x = mpmath.iv.mpf(int(n))
    return _iv_bracket(mpmath.iv.log(mpmath.iv.log(x)))


def log_interval(x, dps=40):
    mpmath.iv.dps = dps
    if isinstance(x, Fraction):
        v = mpmath.iv.mpf(x.numerator) / x.denominator
    else:
        v = mpmath.iv.mpf(x)
    return _iv_bracket(mpmath.iv.log(v))
