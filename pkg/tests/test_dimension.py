import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fastkhin import DomainError
from fastkhin import growth
from fastkhin.certified import Power
from fastkhin.constructors import lower_bound_sequence
from fastkhin.dimension import (
    DimensionEstimate,
    beta_exponent,
    box_counting,
    cantor_points,
    covering_sum_trace,
    dimension_from_b,
    fast_khintchine_dimension,
    jarnik_bounds,
    lemma31_dimension,
)

DOUBLY_EXP = lambda k: Power(2, 2**k)  # noqa: E731


def test_closed_forms():
    assert fast_khintchine_dimension(growth.polynomial(2)).value == Fraction(1, 2)
    assert fast_khintchine_dimension(growth.geometric(3)).value == Fraction(1, 4)
    assert fast_khintchine_dimension(growth.factorial_block()).value == 0


def test_non_preset_uses_diagnostics():
    est = fast_khintchine_dimension(growth.expression("2**n + n"), horizon=200)
    assert abs(float(est.value) - 1 / 3) < 1e-6 and "source" in est.diagnostics


def test_linear_flagged_not_superlinear():
    est = fast_khintchine_dimension(growth.expression("3*n"), horizon=500)
    assert "not_superlinear" in est.flags


def test_zigzag_flagged_empty():
    psi = growth.table({n: (n * n if n % 2 == 0 else 1) for n in range(1, 1001)})
    assert "empty_set" in fast_khintchine_dimension(psi, horizon=1000).flags


def test_lemma31_doubly_exponential():
    assert abs(float(lemma31_dimension(DOUBLY_EXP, 30).value) - 1 / 3) <= 1e-3


def test_lemma31_square():
    s = lower_bound_sequence(growth.polynomial(2), 201)
    assert abs(float(lemma31_dimension(s, 200).value) - 0.5) <= 1e-2


def test_lemma31_constant_rejected():
    with pytest.raises(DomainError):
        lemma31_dimension(lambda k: 5, 100)


@pytest.mark.parametrize("beta", [Fraction(1, 2), 1, 2, 10])
def test_jarnik_bounds_halving(beta):
    j, js = jarnik_bounds(beta)
    assert j == Fraction(2) / (2 + beta) and js == Fraction(1) / (2 + beta)
    assert j == 2 * js


def test_beta_exponent_positive_for_large_b():
    be = beta_exponent(3, Fraction(1, 10))
    assert be.positive
    assert be.beta == Fraction(9, 10) * (3 * Fraction(81, 100) / Fraction(11, 10) - 1)
    assert be.upper_bound == Fraction(11, 10) / (2 + be.beta)


@given(st.fractions(1, 100, max_denominator=50))
def test_dimension_from_b_in_unit_interval(b):
    d = dimension_from_b(b)
    assert 0 < d <= Fraction(1, 2) and d == 1 / (1 + b)


def test_estimate_bounds_enforced():
    with pytest.raises((DomainError, ValueError)):
        DimensionEstimate(Fraction(3, 2), "theorem11", 10)


def test_covering_dichotomy():
    up = covering_sum_trace(DOUBLY_EXP, 2, Fraction(1, 3) + Fraction(1, 20), 20)
    lo = covering_sum_trace(DOUBLY_EXP, 2, Fraction(1, 3) - Fraction(1, 20), 20)
    assert up.upper_decreasing and lo.lower_increasing


def test_covering_single_choice_family():
    tr = covering_sum_trace(lambda k: 1, 2, Fraction(1, 2), 10)
    assert all(lv.log_count == 0 for lv in tr.levels)
    assert all(lv.lower <= lv.upper for lv in tr.levels)


def test_box_cantor():
    est = box_counting(cantor_points(10), range(2, 15))
    assert abs(est.value - 0.6309) <= 0.05


def test_box_uniform():
    rng = random.Random(3)
    pts = [rng.random() for _ in range(10**4)]
    assert box_counting(pts, range(2, 13)).value >= 0.95


def test_box_preconditions():
    with pytest.raises(DomainError):
        box_counting(cantor_points(5), range(2, 15))
    with pytest.raises(DomainError):
        box_counting(cantor_points(10), [2, 3, 4])


@pytest.mark.parametrize("b", [Fraction(3, 2), 2, 3, 10])
def test_beta_exponent_limit(b):
    target = 1 / (1 + Fraction(b))
    errs = [abs(beta_exponent(b, Fraction(1, 10**k)).upper_bound - target) for k in (2, 4, 6)]
    assert errs[0] > errs[1] > errs[2] and errs[2] < Fraction(1, 10**5)
    # first-order convergence: the error shrinks by about 100 per step
    assert 50 < errs[0] / errs[1] < 200


@given(st.sampled_from(["polynomial:2", "polynomial:5/2", "geometric:2", "geometric:7", "factorial_block"]))
def test_closed_forms_in_unit_interval(spec):
    v = fast_khintchine_dimension(growth.parse_psi(spec)).value
    assert 0 <= v <= 1
