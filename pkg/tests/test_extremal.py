from fractions import Fraction
import math

import pytest
from hypothesis import given, strategies as st

from abundancy.arith import sigma, factor_int
from abundancy.errors import DomainError
from abundancy.extremal import (_best_exponent, abundancy_class, ca_grid, ca_oracle,
                                closed_form_exponent, colossally_abundant, hc_exponents_ok,
                                multiple_abundance_check, record_scan)

# OEIS A002182 and A004394
HIGHLY_COMPOSITE = [1, 2, 4, 6, 12, 24, 36, 48, 60, 120, 180, 240, 360, 720, 840, 1260, 1680,
                    2520, 5040, 7560, 10080]
SUPERABUNDANT = [1, 2, 4, 6, 12, 24, 36, 48, 60, 120, 180, 240, 360, 720, 840, 1260, 1680,
                 2520, 5040, 10080]


def test_abundancy_classes():
    assert abundancy_class(12).kind == "abundant"
    assert abundancy_class(28).kind == "perfect"
    assert abundancy_class(10).kind == "deficient"
    c = abundancy_class(120)
    assert c.multiperfect_eq(3) and c.m_abundant_ge(3) and not c.m_abundant_ge(4)


def test_record_scans():
    assert [r.n for r in record_scan(10080, "highly_composite")] == HIGHLY_COMPOSITE
    assert [r.n for r in record_scan(10080, "superabundant")] == SUPERABUNDANT
    recs = record_scan(10080)
    assert all(r.key > r.predecessor_key for r in recs[1:])
    with pytest.raises(ValueError):
        record_scan(100, "other")
    with pytest.raises(DomainError):
        record_scan(0)


def test_records_brute_force():
    best, hc = 0, []
    for n in range(1, 5001):
        d = sum(1 for k in range(1, n + 1) if n % k == 0)
        if d > best:
            best = d
            hc.append(n)
    assert [r.n for r in record_scan(5000, "highly_composite")] == hc


def test_hc_exponent_shape():
    assert all(hc_exponents_ok(n) for n in HIGHLY_COMPOSITE)
    assert not hc_exponents_ok(10) and not hc_exponents_ok(18)


def brute_exponent(p, eps, vmax=40):
    import mpmath
    with mpmath.workdps(50):
        vals = [mpmath.log((p ** (v + 1) - 1) // (p - 1)) - v * (1 + mpmath.mpf(eps)) * mpmath.log(p)
                for v in range(vmax)]
        best = max(vals)
        return max(v for v, x in enumerate(vals) if x >= best - mpmath.mpf(10) ** -30)


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11])
@pytest.mark.parametrize("eps", [0.05, 0.1, 0.3, 1.0])
def test_exponent_argmax_and_closed_form(p, eps):
    assert _best_exponent(p, eps) == brute_exponent(p, eps)
    assert closed_form_exponent(p, eps) == _best_exponent(p, eps)


def test_ca_grid_matches_oracle():
    for eps in ca_grid(20):
        assert colossally_abundant(eps).value == ca_oracle(eps, 10**5), eps


def test_ca_divisibility_chain():
    vals = [colossally_abundant(e).value for e in ca_grid(20)]
    assert all(b % a == 0 for a, b in zip(vals, vals[1:]))
    assert sorted(set(vals)) == [1, 2, 12, 60, 120, 360, 2520]


def test_ca_domain():
    with pytest.raises(DomainError):
        colossally_abundant(0)


def test_ca_values_are_superabundant():
    sa = set(SUPERABUNDANT)
    assert all(colossally_abundant(e).value in sa for e in ca_grid(20))


@given(st.floats(0.05, 2.0))
def test_ca_exponents_nonincreasing(eps):
    es = colossally_abundant(eps).exponents
    assert all(a >= b for a, b in zip(es, es[1:]))


def test_multiple_abundance_readings():
    out = multiple_abundance_check(2000, 10)
    assert out["weak"] == []
    assert out["abundancy"][0] == (2, 12)
    assert out["argument"] and out["argument"][0][0] == 1
