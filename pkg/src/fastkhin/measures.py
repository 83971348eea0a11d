"""Bernoulli measures on cylinders and the pressure function.

mu_t(I_n(a_1..a_n)) = exp(-n P(t) - t sum log a_j) with P(t) = log zeta(t).
Everything is carried in log space with certified enclosures because these
values underflow any float long before n gets interesting.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from mpmath import libmp

from .certified import BigValue, CertifiedReal, FloorExp, Interval, as_fraction
from .cfrac import final_state
from .constructors import dn_membership, log_sum_interval
from .errors import DomainError, ResourceError
from .growth import GrowthFunction

# (B_2, B_4, B_6, B_8)
_BERNOULLI = (Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30))
_FACT = (2, 24, 720, 40320)


def _check_t(t) -> Fraction:
    t = as_fraction(t)
    if t <= 1:
        raise DomainError(f"t = {t} must exceed 1 (zeta diverges)")
    return t


def _rising(t: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for i in range(k):
        out *= t + i
    return out


def _power_neg(k: int, s: Fraction, prec: int) -> Interval:
    """k ** (-s) for a positive integer k and rational s."""
    if k == 1:
        return Interval.exact(1, prec)
    return (Interval.exact(k, prec).log() * (-s)).exp()


def zeta_tail_remainder(t: Fraction, K: int) -> float:
    """Size of the Euler-Maclaurin remainder used by :func:`zeta_interval`."""
    return float(abs(_BERNOULLI[-1]) / _FACT[-1] * _rising(t, 7)) * K ** (-float(t) - 7)


def zeta_interval(t, K: int, prec: int) -> Interval:
    """Certified enclosure of zeta(t): exact head sum plus an Euler-Maclaurin tail.

    sum_{k>=K} k^-t = K^(1-t)/(t-1) + K^-t/2
                      + sum_j B_2j/(2j)! * t(t+1)..(t+2j-2) * K^(-t-2j+1) + R
    with |R| bounded by the magnitude of the last correction term.
    """
    t = _check_t(t)
    if K < 2:
        raise DomainError("K must be at least 2")
    head = Interval.exact(0, prec)
    for k in range(1, K):
        head = head + _power_neg(k, t, prec)
    tail = _power_neg(K, t - 1, prec) / (t - 1) + _power_neg(K, t, prec) / 2
    last = None
    for j, (b, f) in enumerate(zip(_BERNOULLI, _FACT), start=1):
        coef = b / f * _rising(t, 2 * j - 1)
        last = _power_neg(K, t + 2 * j - 1, prec) * abs(coef)
        tail = tail + _power_neg(K, t + 2 * j - 1, prec) * coef
    rem = Interval(libmp.mpf_neg(last.hi), last.hi, prec)
    return head + tail + rem


def zeta_bracket_simple(t, K: int, prec: int = 128) -> tuple[Interval, Interval]:
    """(S_K, S_K + K^(1-t)/(t-1)) with S_K = sum_{k<=K} k^-t: the plain
    integral-test bracket around zeta(t)."""
    t = _check_t(t)
    s = Interval.exact(0, prec)
    for k in range(1, K + 1):
        s = s + _power_neg(k, t, prec)
    return s, s + _power_neg(K, t - 1, prec) / (t - 1)


@lru_cache(maxsize=256)
def _pressure_interval(t: Fraction, target: Fraction) -> Interval:
    prec = max(64, (1 / target).__ceil__().bit_length() + 32)
    K = 8
    while zeta_tail_remainder(t, K) > float(target) / 8:
        K *= 2
    while True:
        p = zeta_interval(t, K, prec).log()
        if p.width_float() <= float(target):
            return p
        prec *= 2
        if prec > 1 << 14:
            raise ResourceError("pressure did not reach the requested accuracy")


def pressure(t, target_error=Fraction(1, 10**15)) -> CertifiedReal:
    """P(t) = log zeta(t) with |error| <= target_error."""
    t = _check_t(t)
    target = as_fraction(target_error)
    if target <= 0:
        raise DomainError("target_error must be positive")
    return _pressure_interval(t, target).certified()


def pressure_interval(t, target_error=Fraction(1, 10**15)) -> Interval:
    return _pressure_interval(_check_t(t), as_fraction(target_error))


def log_mu_interval(t, word: Sequence[BigValue], prec: int = 128, target_error=Fraction(1, 10**15)) -> Interval:
    t = _check_t(t)
    n = len(word)
    p = pressure_interval(t, target_error)
    s = log_sum_interval(word, n, prec)
    return -(p * n) - s * t


def log_mu(t, word: Sequence[BigValue], target_error=Fraction(1, 10**15)) -> CertifiedReal:
    """log mu_t(I_n(word)) with certified error."""
    return log_mu_interval(t, word, target_error=target_error).certified()


def mu(t, word: Sequence[BigValue], target_error=Fraction(1, 10**15)) -> CertifiedReal:
    """mu_t(I_n(word)) itself; refuses values below exp(-10**6)."""
    lg = log_mu_interval(t, word, target_error=target_error)
    if lg.lo_fraction < -(10**6):
        raise ResourceError("measure too small to represent; use log_mu")
    return lg.exp().certified()


@dataclass(frozen=True)
class ConsistencyReport:
    t: Fraction
    word: tuple
    alphabet_cap: int
    children_sum: CertifiedReal
    lower: CertifiedReal
    upper: CertifiedReal
    parent: CertifiedReal
    contains: bool

    @property
    def gap(self) -> Fraction:
        return self.upper.hi - self.lower.lo


def consistency_check(t, word: Sequence[int], alphabet_cap: int, prec: int = 128) -> ConsistencyReport:
    """Bracket mu_t(word) by its first A children plus a certified tail.

    Each child measure mu_t(word + (a,)) is evaluated from scratch. The tail
    sum over a > A is mu_t(word) e^{-P(t)} sum_{a>A} a^-t, and the integral
    test puts that last sum in [(A+1)^(1-t), A^(1-t)] / (t-1).
    """
    t = _check_t(t)
    word = tuple(word)
    A = int(alphabet_cap)
    if A < 1:
        raise DomainError("alphabet_cap must be positive")
    total = Interval.exact(0, prec)
    for a in range(1, A + 1):
        total = total + log_mu_interval(t, word + (a,), prec).exp()
    parent = log_mu_interval(t, word, prec).exp()
    scale = parent * (-pressure_interval(t)).exp() / (t - 1)
    tail_lo = scale * _power_neg(A + 1, t - 1, prec)
    tail_hi = scale * _power_neg(A, t - 1, prec)
    lower = Interval(total.lo, total.hi, prec) + Interval(tail_lo.lo, tail_lo.lo, prec)
    upper = total + Interval(tail_hi.hi, tail_hi.hi, prec)
    contains = not lower.certainly_gt(parent) and not upper.certainly_lt(parent)
    return ConsistencyReport(
        t, word, A, total.certified(), lower.certified(), upper.certified(), parent.certified(), contains
    )


def _threshold_holds(n: int, psi_n: Fraction, p: Interval, rhs_coef: Fraction) -> Optional[bool]:
    lhs = p * n
    rhs = rhs_coef * psi_n
    if lhs.certainly_le(rhs):
        return True
    if lhs.certainly_gt(rhs):
        return False
    return None


def n_epsilon_threshold(psi: GrowthFunction, epsilon, horizon: int = 2000, t=None) -> Optional[int]:
    """Least N with n P(t) <= (eps/2)(1-eps) psi(n) for every n in [N, horizon].

    ``t`` defaults to 1 + eps/2. Returns None when the inequality fails at
    the horizon itself.
    """
    epsilon = as_fraction(epsilon)
    if not 0 < epsilon < 1:
        raise DomainError("epsilon must lie in (0, 1)")
    t = 1 + epsilon / 2 if t is None else _check_t(t)
    coef = epsilon / 2 * (1 - epsilon)
    last_fail = 0
    for n in range(1, horizon + 1):
        target = Fraction(1, 10**12)
        ok = None
        while ok is None:
            ok = _threshold_holds(n, psi(n), pressure_interval(t, target), coef)
            if target < Fraction(1, 10**60):
                raise ResourceError(f"threshold undecided at n={n}")
            target /= 10**6
        if not ok:
            last_fail = n
    if last_fail == horizon:
        return None
    return last_fail + 1


@dataclass(frozen=True)
class Inequality4Report:
    epsilon: Fraction
    t: Fraction
    n: int
    applicable: bool
    holds: Optional[bool]
    lhs: Optional[CertifiedReal]
    rhs: Optional[CertifiedReal]
    reason: str = ""

    def to_json(self) -> dict:
        f = lambda x: None if x is None else repr(float(x))
        return {"t": str(self.t), "n": self.n, "applicable": self.applicable, "holds": self.holds,
                "lhs": f(self.lhs), "rhs": f(self.rhs), "reason": self.reason}


def inequality4_check(epsilon, word: Sequence[int], psi: GrowthFunction, n: Optional[int] = None, t=None) -> Inequality4Report:
    """Compare q_n^-(1+eps) with mu_{1+eps/2}(I_n(word)) in log space.

    Applies only to words in D_n(eps) with n at or past the threshold N(eps).
    ``lhs`` and ``rhs`` are the logarithms of the two sides.
    """
    epsilon = as_fraction(epsilon)
    word = tuple(word)
    n = len(word) if n is None else n
    word = word[:n]
    t = 1 + epsilon / 2 if t is None else _check_t(t)
    if any(isinstance(a, FloorExp) for a in word):
        raise ResourceError("inequality (4) needs q_n, so every quotient must be materialized")
    if not dn_membership(word, psi, epsilon, n).holds:
        return Inequality4Report(epsilon, t, n, False, None, None, None, "word not in D_n(eps)")
    N = n_epsilon_threshold(psi, epsilon, horizon=n)
    if N is None or n < N:
        return Inequality4Report(epsilon, t, n, False, None, None, None, "n below N(eps)")
    q = final_state(word).q_cur
    prec = 128
    while True:
        lhs = -(Interval.exact(q, prec).log() * (1 + epsilon))
        rhs = log_mu_interval(t, word, prec)
        if lhs.certainly_le(rhs):
            holds = True
        elif lhs.certainly_gt(rhs):
            holds = False
        else:
            prec *= 2
            if prec <= 1 << 14:
                continue
            holds = lhs.mid_float() <= rhs.mid_float()
        return Inequality4Report(epsilon, t, n, True, holds, lhs.certified(), rhs.certified())
