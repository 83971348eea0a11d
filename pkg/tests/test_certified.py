from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fastkhin import ResourceError
from fastkhin.certified import (
    CertifiedReal,
    FloorExp,
    Interval,
    Power,
    as_fraction,
    floor_exp,
    log_interval,
)

small_rationals = st.fractions(min_value=-50, max_value=50, max_denominator=1000)


def oracle_floor_exp(m):
    with mpmath.workdps(60):
        return int(mpmath.floor(mpmath.exp(mpmath.mpf(m.numerator) / m.denominator)))


@pytest.mark.parametrize("m", [Fraction(0), Fraction(1), Fraction(5, 2), Fraction(20), Fraction(101, 3), Fraction(60)])
def test_floor_exp_against_oracle(m):
    assert floor_exp(m) == oracle_floor_exp(m)


def test_floor_exp_near_integer_boundary():
    # log 7 is irrational, so e^(log-approximation) straddles 7 closely
    m = Fraction(mpmath.mpf(mpmath.log(7)).__float__())
    assert floor_exp(m) == oracle_floor_exp(m)


def test_floor_exp_cap():
    with pytest.raises(ResourceError):
        floor_exp(Fraction(10**7))


def test_floor_exp_lazy_log():
    f = FloorExp(Fraction(5000))
    iv = f.log_interval(128)
    assert iv.lo_fraction <= 5000 <= iv.hi_fraction
    assert iv.width_float() < 1e-30


def test_power_log_interval():
    p = Power(2, 2**20)
    iv = p.log_interval(128)
    assert abs(iv.mid_float() - 2**20 * 0.6931471805599453) < 1e-6
    assert p.bit_length() >= 2**20 + 1


def test_log_interval_int():
    iv = log_interval(10**30, 128)
    with mpmath.workdps(50):
        ref = mpmath.nstr(mpmath.log(mpmath.mpf(10) ** 30), 45)
    assert iv.lo_fraction <= Fraction(str(ref)) + Fraction(1, 10**40)
    assert iv.hi_fraction >= Fraction(str(ref)) - Fraction(1, 10**40)


def test_as_fraction_rejects_bool():
    with pytest.raises(TypeError):
        as_fraction(True)


def test_certified_real_bounds():
    c = CertifiedReal.from_bounds(Fraction(1), Fraction(3))
    assert c.value == 2 and c.radius == 1
    assert c.contains(Fraction(5, 2)) and not c.contains(4)


@given(small_rationals, small_rationals)
def test_interval_ops_enclose_exact(a, b):
    ia, ib = Interval.exact(a, 64), Interval.exact(b, 64)
    for iv, exact in [(ia + ib, a + b), (ia - ib, a - b), (ia * ib, a * b)]:
        assert iv.lo_fraction <= exact <= iv.hi_fraction
    if b != 0:
        q = ia / ib
        assert q.lo_fraction <= a / b <= q.hi_fraction


@given(st.fractions(min_value=-30, max_value=30, max_denominator=100))
def test_exp_log_enclose_oracle(x):
    e = Interval.exact(x, 80).exp()
    with mpmath.workdps(50):
        ref = Fraction(mpmath.nstr(mpmath.exp(mpmath.mpf(x.numerator) / x.denominator), 45))
    tol = ref * Fraction(1, 10**40)
    assert e.lo_fraction <= ref + tol and ref - tol <= e.hi_fraction
    back = e.log()
    assert back.lo_fraction <= x <= back.hi_fraction
