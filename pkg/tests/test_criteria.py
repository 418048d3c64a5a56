from fractions import Fraction
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from abundancy import constants as C
from abundancy.arith import FactoredInteger, factor_int
from abundancy.criteria import (ap_extremes, condition_filters, duncan_scan, dyadic_condition,
                                harmonic_float, lagarias_check, lagarias_scan, nicolas_check_mp,
                                nicolas_scan, primorial_probe, primorial_probe_scan,
                                robin_check, robin_filtered_violations, robin_scan,
                                rs_primorial_scan, rs_totient_check, rs_totient_scan,
                                sfree_margin, smooth_condition, _blocks)
from abundancy.errors import DomainError, PreconditionError, RangeError
from abundancy.primes import build_table

ROBIN_STRICT_VIOLATORS = [3, 4, 5, 6, 8, 9, 10, 12, 16, 18, 20, 24, 30, 36, 48, 60, 72, 84,
                          120, 180, 240, 360, 720, 840, 2520, 5040]


def mp_robin_margin(n):
    """Independent oracle: e^g log log n - sigma(n)/n at 40 digits, sigma by trial division."""
    s = sum(d for d in range(1, n + 1) if n % d == 0)
    with mpmath.workdps(40):
        return mpmath.exp(mpmath.euler) * mpmath.log(mpmath.log(n)) - mpmath.mpf(s) / n


def test_robin_5040_margin():
    r = robin_check(5040)
    assert not r.holds and not r.indeterminate and r.mode == "exact_rational"
    assert r.margin == pytest.approx(float(mp_robin_margin(5040)), abs=1e-12)
    assert r.margin == pytest.approx(-0.021218, abs=1e-6)


def test_robin_5041_holds():
    assert robin_check(5041).holds


def test_robin_strict_violators_to_1e5():
    res = robin_scan(10**5)
    assert res.violators().tolist() == ROBIN_STRICT_VIOLATORS
    assert not res.indeterminate.any()


@pytest.mark.parametrize("n", [3, 12, 60, 5040, 5041, 10**5 - 1])
def test_robin_scan_matches_oracle(n):
    res = robin_scan(10**5)
    assert res.margin[n - 3] == pytest.approx(float(mp_robin_margin(n)), abs=1e-12)


def test_robin_unconditional_at_12():
    # with the constant 0.6482 the bound is below sigma(12)/12 = 7/3 by about 1.5e-5
    r = robin_check(12, "unconditional")
    assert not r.holds and not r.indeterminate
    assert r.margin == pytest.approx(-1.5e-5, abs=1e-6)
    with mpmath.workdps(40):
        ll = mpmath.log(mpmath.log(12))
        rhs = mpmath.exp(mpmath.euler) * ll + mpmath.mpf("0.6482") / ll
        assert rhs < mpmath.mpf(7) / 3
        rhs_pub = mpmath.exp(mpmath.euler) * ll + mpmath.mpf("0.6483") / ll
        assert rhs_pub > mpmath.mpf(7) / 3


def test_robin_unconditional_scan_1e5():
    res = robin_scan(10**5, "unconditional")
    assert res.violators().tolist() == [12]


def test_robin_domain():
    with pytest.raises(DomainError):
        robin_check(2)
    with pytest.raises(ValueError):
        robin_check(12, "other")


def test_robin_log_space_huge():
    ps = build_table(10**5).primes
    F = FactoredInteger.from_dict({int(p): 1 for p in ps[:3000]})
    r = robin_check(F)
    assert r.mode == "log_space" and r.holds and not r.indeterminate


@given(st.integers(3, 10**5))
def test_strict_implies_unconditional(n):
    s, u = robin_check(n), robin_check(n, "unconditional")
    if s.holds:
        assert u.holds
    assert u.margin > s.margin


@given(st.integers(3, 10**5), st.integers(1, 9))
def test_scan_partition_invariance(limit, threads):
    a = robin_scan(limit, threads=1)
    b = robin_scan(limit, threads=threads)
    assert np.array_equal(a.n, b.n) and np.array_equal(a.margin, b.margin)
    assert np.array_equal(a.holds, b.holds)


@given(st.integers(1, 10**6), st.integers(0, 10**6), st.integers(1, 64))
def test_blocks_partition(start, size, k):
    stop = start + size
    bl = _blocks(start, stop, k)
    assert bl[0][0] == start and bl[-1][1] == stop
    assert all(b[1] + 1 == c[0] for b, c in zip(bl, bl[1:]))


def test_lagarias_examples():
    r1 = lagarias_check(1)
    assert r1.holds and "equality" in r1.note
    assert lagarias_check(2).holds
    r = lagarias_check(60)
    H = sum(Fraction(1, k) for k in range(1, 61))
    h = float(H)
    assert r.margin == pytest.approx(h + math.exp(h) * math.log(h) - 168, rel=1e-12)
    assert lagarias_check(10**5).mode == "log_space"


def test_lagarias_scan_1e5():
    res = lagarias_scan(10**5)
    assert res.holds.all() and not res.indeterminate.any()


@given(st.integers(1, 10**6))
def test_harmonic_float_vs_mpmath(n):
    with mpmath.workdps(30):
        ref = float(mpmath.harmonic(n))
    assert float(harmonic_float(n)) == pytest.approx(ref, rel=1e-14)


def test_rs_totient():
    r = rs_totient_check(223092870)
    assert not r.holds and not r.indeterminate
    assert rs_totient_check(223092870 * 29).holds
    assert rs_totient_scan(10**5).violators().tolist() == []


def test_rs_primorials(table_1e5):
    res = rs_primorial_scan(table_1e5)
    assert res.n[0] == 2
    assert res.violators().tolist() == [9]


def test_nicolas_primorials(table_1e5):
    res = nicolas_scan(table_1e5)
    assert res.holds.all() and not res.indeterminate.any()
    for k in (2, 9, 100, len(table_1e5)):
        assert res.margin[k - 1] == pytest.approx(float(nicolas_check_mp(table_1e5, k)), abs=1e-15)


def test_nicolas_first_primorial_trivial(table_1e5):
    res = nicolas_scan(table_1e5, 3)
    assert res.holds[0] and res.margin[0] == math.inf


def test_filters():
    F = factor_int(2**4 * 3**2 * 5 * 7 * 11)
    f = condition_filters(F)
    assert set(f) == {"smooth", "dyadic", "fifth_power", "s_free(2)", "s_free(3)",
                      "s_free(4)", "s_free(5)"}
    assert not f["fifth_power"] and f["s_free(5)"] and not f["s_free(2)"]
    with pytest.raises(DomainError):
        dyadic_condition(factor_int(15))
    with pytest.raises(DomainError):
        smooth_condition(factor_int(8))
    # N = 30030: P(N) = 13 exceeds (1 - 1/(9 log log N)) log N = 9.82
    assert not smooth_condition(factor_int(30030))


def test_sfree_margin():
    r = sfree_margin(factor_int(6), 2)
    assert "report-only" in r.note
    with pytest.raises(PreconditionError):
        sfree_margin(factor_int(12), 2)
    with pytest.raises(DomainError):
        sfree_margin(factor_int(6), 1)
    big = factor_int(2 * 3 * 5 * 7 * 11 * 13 * 17 * 19 * 23 * 29)
    assert sfree_margin(big, 2).note == ""


def test_filtered_robin_small():
    out = robin_filtered_violations(10**5)
    assert out["smooth"].size == 0 and out["dyadic"].size == 0


def test_duncan_scan_small():
    res = duncan_scan(10**4)
    assert res.holds.all()
    assert res.n[0] == 1 and res.margin[0] == pytest.approx(math.pi**2 / 6 - 1)


def test_probe_delta_positive(table_1e5):
    cols = primorial_probe_scan(table_1e5)
    assert np.all(cols["delta"] > 0)
    p = primorial_probe(table_1e5, 100)
    assert p.p_k == 541
    with mpmath.workdps(30):
        theta = mpmath.fsum(mpmath.log(int(q)) for q in table_1e5.primes[:100])
        ref = mpmath.log(mpmath.log(541)) - mpmath.log(mpmath.log(theta))
    assert p.delta == pytest.approx(float(ref), rel=1e-10)
    with pytest.raises(RangeError):
        primorial_probe(table_1e5, 1)


def test_ap_extremes():
    e = ap_extremes(0, 2, 10**5)
    assert e.argmax_sigma % 2 == 0
    o = ap_extremes(1, 2, 10**5)
    assert o.argmax_sigma % 2 == 1 and o.sup_sigma_ratio < e.sup_sigma_ratio
    with pytest.raises(DomainError):
        ap_extremes(3, 2, 100)


def test_filter_examples():
    # N = 30: P = 5 exceeds (1 - 1/(9 * 1.2241)) * 3.4012 = 3.091
    assert not smooth_condition(factor_int(30))
    assert dyadic_condition(factor_int(17 * 19))
    # (log log 2^20)^2 = 6.91 < 2^20
    assert not dyadic_condition(factor_int(2**20))
