import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fastkhin import DomainError
from fastkhin import growth
from fastkhin.constructors import point_in_E
from fastkhin.measures import (
    consistency_check,
    inequality4_check,
    log_mu,
    log_mu_interval,
    mu,
    n_epsilon_threshold,
    pressure,
    zeta_bracket_simple,
    zeta_interval,
)

APERY = Fraction("1.2020569031595942853997381615114499907649862923405")


def test_pressure_two_against_pi():
    p = pressure(2)
    assert abs(float(p) - math.log(math.pi**2 / 6)) <= 1e-15
    assert p.radius <= Fraction(1, 10**15)


def test_zeta_three_against_apery():
    z = zeta_interval(3, 16, 200)
    assert z.lo_fraction <= APERY <= z.hi_fraction
    assert z.width_float() < 1e-12


@pytest.mark.parametrize("t", ["1.25", "1.5", "3", "20"])
def test_pressure_against_mpmath_series(t):
    with mpmath.workdps(40):
        ref = Fraction(mpmath.nstr(mpmath.log(mpmath.zeta(mpmath.mpf(t))), 35))
    p = pressure(t, Fraction(1, 10**18))
    assert abs(p.value - ref) <= p.radius + Fraction(1, 10**30)


def test_pressure_rejects_t_at_most_one():
    with pytest.raises(DomainError):
        pressure(1)


def test_mu_examples():
    assert abs(float(mu(2, (1,))) - 6 / math.pi**2) < 1e-12
    assert abs(float(mu(2, (2,))) - 1.5 / math.pi**2) < 1e-12


def test_consistency_root_contains_one():
    r = consistency_check(2, (), 10**4)
    assert r.contains and r.lower.lo <= 1 <= r.upper.hi
    assert r.gap <= Fraction(1, 10**4)


def test_consistency_first_cylinder():
    r = consistency_check(2, (1,), 10**4)
    assert r.contains and r.lower.lo <= 6 / math.pi**2 <= r.upper.hi


def test_consistency_depth_two():
    assert consistency_check(3, (2, 2), 10**3).contains


def test_threshold_square():
    assert n_epsilon_threshold(growth.polynomial(2), Fraction(1, 2)) == 13


def test_threshold_geometric():
    assert n_epsilon_threshold(growth.geometric(2), Fraction(1, 2)) == 7


def test_inequality4_on_square_point():
    psi = growth.polynomial(2)
    rep = inequality4_check(Fraction(1, 2), point_in_E(psi, 20), psi)
    assert rep.applicable and rep.holds


def test_inequality4_not_applicable_outside_dn():
    rep = inequality4_check(Fraction(1, 2), (1,) * 20, growth.polynomial(2))
    assert not rep.applicable and rep.holds is None


@settings(max_examples=30, deadline=None)
@given(st.fractions(Fraction(11, 10), 6, max_denominator=20), st.integers(2, 60))
def test_integral_bracket_contains_zeta(t, K):
    lo, hi = zeta_bracket_simple(t, K)
    z = zeta_interval(t, 64, 128)
    assert lo.lo_fraction <= z.hi_fraction and z.lo_fraction <= hi.hi_fraction


@settings(max_examples=25, deadline=None)
@given(st.fractions(Fraction(11, 10), 4, max_denominator=10), st.lists(st.integers(1, 50), min_size=1, max_size=4))
def test_children_sum_brackets_parent(t, word):
    assert consistency_check(t, tuple(word), 100).contains


@given(st.lists(st.integers(1, 10**6), min_size=1, max_size=30))
def test_log_mu_additive(word):
    whole = log_mu(2, tuple(word))
    parts = sum(float(log_mu(2, (a,))) for a in word)
    assert abs(float(whole) - parts) <= 1e-9 * max(1.0, abs(parts))


@pytest.mark.parametrize("t", ["1.1", "1.5", 2, 3])
def test_root_normalization(t):
    r = consistency_check(t, (), 1000)
    assert r.contains and r.lower.lo <= 1 <= r.upper.hi


@given(st.lists(st.integers(1, 100), max_size=5), st.integers(1, 10**4))
def test_mu_strictly_decreasing_in_last_quotient(word, a):
    w = tuple(word)
    assert log_mu_interval(2, w + (a + 1,)).certainly_lt(log_mu_interval(2, w + (a,)))


@given(st.fractions(Fraction(101, 100), 50, max_denominator=100))
def test_pressure_positive(t):
    assert pressure(t).lo > 0
