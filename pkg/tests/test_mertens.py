from fractions import Fraction
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from abundancy import constants as C
from abundancy.errors import DomainError, RangeError
from abundancy.mertens import (a_constants, a_pairing_residuals, b_series_log_zeta,
                               b_series_printed, coprime_harmonic_constant, elementary_bound_check,
                               elementary_bound_scan, estimate_constants, estimate_gamma,
                               euler_product, euler_product_grid, fit_ap_slope,
                               harmonic_cumulative, harmonic_sum, inner_tail, log1p_bracket,
                               mertens_envelope, prime_sum, prime_sum_grid, tail_sum,
                               tail_sum_grid)
from abundancy.primes import build_table


def test_harmonic_small_exact():
    S = harmonic_cumulative(10)
    assert float(S[10]) == pytest.approx(float(sum(Fraction(1, n) for n in range(1, 11))), rel=1e-15)


def test_harmonic_plain_envelope():
    for x in (10, 1000, 10**5):
        s = harmonic_sum(x)
        assert s.within and abs(s.residual) < 1 / x


def test_harmonic_domain():
    with pytest.raises(DomainError):
        harmonic_sum(1.5, "inverse_log")


def test_coprime_constant_fits():
    s = harmonic_sum(10**5, "coprime", N=30, constant=coprime_harmonic_constant(30))
    assert s.within


@pytest.mark.parametrize("variant, kw", [("squarefree", {}), ("log_power", {"k": 2}),
                                         ("inverse_log", {}), ("ap", {"a": 1, "q": 4})])
def test_harmonic_variants_within_envelope(variant, kw):
    assert harmonic_sum(10**5, variant, **kw, envelope_constant=5.0).within


def test_ap_slope_is_one_over_q():
    xs = np.exp(np.linspace(math.log(1e3), math.log(1e6), 40))
    slope, _, one_q, one_phi = fit_ap_slope(1, 4, xs)
    assert abs(slope - one_q) < 1e-3 < abs(slope - one_phi)


def test_estimate_gamma():
    assert estimate_gamma(10**6) == pytest.approx(C.GAMMA, abs=1e-12)


def test_mertens_b_series():
    assert b_series_log_zeta() == pytest.approx(C.MERTENS_B, abs=1e-12)
    assert abs(b_series_printed() - C.MERTENS_B) > 0.1


def test_constants_from_table(table_1e6):
    est = {(e.name, e.method): e for e in estimate_constants(table_1e6)}
    assert est[("B", "gamma + prime sum")].abs_error < 1e-7
    assert est[("gamma", "harmonic sum")].abs_error < 1e-12


def test_a_constants_sign_pairing(table_1e6):
    a_minus, a_plus = a_constants(table_1e6)
    # sum 1/(p(p-1)) = 0.7731566690497..., sum 1/(p(p+1)) = 0.3302299262...
    assert a_minus == pytest.approx(C.MERTENS_B + 0.7731566690497, abs=1e-6)
    assert a_plus == pytest.approx(C.MERTENS_B - 0.3302299262, abs=1e-6)
    res = a_pairing_residuals(table_1e6, 10**6)
    assert min(res, key=lambda k: res[k] if k[0] == "inv_p_minus_1" else 9) == ("inv_p_minus_1", 1, -1)
    assert min(res, key=lambda k: res[k] if k[0] == "inv_p_plus_1" else 9) == ("inv_p_plus_1", -1, 1)


def test_prime_sum_at_small_x():
    t = build_table(1000)
    s = prime_sum(t, 10)
    assert s.empirical == pytest.approx(1 / 2 + 1 / 3 + 1 / 5 + 1 / 7, rel=1e-15)
    with pytest.raises(RangeError):
        prime_sum(t, 1001)


def test_corrected_envelope_from_threshold(table_1e6):
    xs = np.exp(np.linspace(math.log(10372), math.log(10**6), 200))
    assert all(s.within for s in prime_sum_grid(table_1e6, xs))
    assert all(s.within for s in prime_sum_grid(table_1e6, xs, "inv_p", "printed"))


def test_corrected_envelope_fails_below_threshold(table_1e6):
    # the corrected form is too tight somewhere in [286, 10372)
    xs = np.arange(286, 10372)
    assert not all(s.within for s in prime_sum_grid(table_1e6, xs))


def test_mertens_envelope_ordering():
    x = np.array([300.0, 1e4, 1e7])
    assert np.all(mertens_envelope(x, "corrected") < mertens_envelope(x, "printed"))
    with pytest.raises(ValueError):
        mertens_envelope(x, "other")


@pytest.mark.parametrize("variant", ["inv_p_minus_1", "inv_p_plus_1"])
def test_shifted_prime_sums(table_1e6, variant):
    xs = np.exp(np.linspace(math.log(10372), math.log(10**6), 50))
    assert all(s.within for s in prime_sum_grid(table_1e6, xs, variant))


def test_ap_prime_sum(table_1e6):
    xs = np.exp(np.linspace(math.log(1e3), math.log(1e6), 50))
    ss = prime_sum_grid(table_1e6, xs, "ap", a=1, q=4)
    assert all(s.within for s in ss)


@pytest.mark.parametrize("variant", ["one_minus", "p_over_pm1"])
def test_euler_products(table_1e6, variant):
    xs = np.exp(np.linspace(math.log(286), math.log(1e6), 200))
    assert all(s.within for s in euler_product_grid(table_1e6, xs, variant))


def test_euler_product_one_plus_envelope_too_small(table_1e6):
    xs = np.exp(np.linspace(math.log(286), math.log(1e6), 50))
    assert not all(s.within for s in euler_product_grid(table_1e6, xs, "one_plus"))


def test_euler_product_small():
    t = build_table(100)
    assert euler_product(t, 10).empirical == pytest.approx(0.5 * 2 / 3 * 4 / 5 * 6 / 7, rel=1e-14)
    assert euler_product(t, 1.5).empirical == 1.0


@given(st.floats(1e-6, 1.0), st.integers(1, 30))
def test_log1p_bracket(t, m):
    lo, hi = log1p_bracket(t, m)
    v = math.log1p(t)
    assert lo <= v + 1e-15 and v <= hi + 1e-15


@given(st.integers(2, 10**9))
def test_inner_tail_identity(p):
    v = float(inner_tail(p))
    # oracle in exact-ish arithmetic: -log(1-u) - u with u = 1/p
    import mpmath
    with mpmath.workdps(40):
        u = mpmath.mpf(1) / p
        ref = float(-mpmath.log(1 - u) - u)
    assert v == pytest.approx(ref, rel=1e-12)


def test_tail_sum(table_1e5):
    t = tail_sum(table_1e5, 1000)
    ps = table_1e5.primes[table_1e5.primes > 1000].astype(float)
    assert t.value == pytest.approx(float(np.sum(inner_tail(ps))), rel=1e-10)
    assert tail_sum_grid(table_1e5, [1000])[0] == pytest.approx(t.value, rel=1e-12)
    with pytest.raises(RangeError):
        tail_sum(table_1e5, 10**5)


def test_elementary_bound(table_1e6):
    ps, margins = elementary_bound_scan(table_1e6)
    assert ps[0] == 3 and np.all(margins >= 0)
    assert elementary_bound_check(table_1e6, 3).holds
    with pytest.raises(DomainError):
        elementary_bound_check(table_1e6, 2)


def test_ap_harmonic_constant_against_digamma():
    import mpmath
    # sum over n = a mod q of 1/n = (log x - log q - digamma(a/q))/q + O(1/x)
    a, q = 1, 4
    c = float(-(mpmath.log(q) + mpmath.digamma(mpmath.mpf(a) / q)) / q)
    s = harmonic_sum(10**6, "ap", a=a, q=q, constant=c)
    assert s.within
