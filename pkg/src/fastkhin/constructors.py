"""Explicit points and samplers for the fast Khintchine level sets.

* :func:`point_in_E` builds a_k = floor(e^(psi(k) - psi(k-1) + 1)), whose
  normalized log-sum tends to 1.
* :func:`f_set_sampler` draws words with s_k <= a_k < ell * s_k.
* :func:`khintchine_ratio` and :func:`dn_membership` evaluate
  (1/psi(n)) sum log a_j with certified error.
* :func:`jarnik_check` finds the n with a_{n+1} >= q_n ** beta.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Union

from .certified import (
    DEFAULT_EXPONENT_CAP,
    BigValue,
    CertifiedReal,
    FloorExp,
    Interval,
    as_fraction,
    floor_exp,
    log_interval,
)
from .cfrac import INITIAL_STATE, as_word, step
from .errors import DomainError, ResourceError
from .growth import GrowthFunction

_MAX_PREC = 1 << 16


def _exponents(psi: GrowthFunction, n: int, shift: int) -> list[Fraction]:
    out = []
    for k in range(1, n + 1):
        d = psi(k) - psi(k - 1)
        if d < 0:
            raise DomainError(f"psi decreases at n={k}; the construction needs it increasing")
        out.append(d + shift)
    return out


def _quotients(exponents, cap, lazy: bool) -> tuple:
    out = []
    for m in exponents:
        if m > cap:
            if not lazy:
                raise ResourceError(f"exponent {float(m):.6g} exceeds cap {cap}")
            out.append(FloorExp(m))
        else:
            out.append(floor_exp(m, cap=cap))
    return tuple(out)


def point_in_E(
    psi: GrowthFunction, n: int, cap=DEFAULT_EXPONENT_CAP, lazy: bool = False
) -> tuple[BigValue, ...]:
    """The first n quotients of a point of E(psi).

    With ``lazy=True`` quotients whose exponent exceeds ``cap`` are returned
    as :class:`~fastkhin.certified.FloorExp` placeholders; log-space
    operations accept them, exact continued-fraction ones do not.
    """
    if n < 1:
        raise DomainError("n must be positive")
    return _quotients(_exponents(psi, n, 1), cap, lazy)


def lower_bound_sequence(
    psi: GrowthFunction, n: int, cap=DEFAULT_EXPONENT_CAP, lazy: bool = False
) -> tuple[BigValue, ...]:
    """s_k = floor(e^(psi(k) - psi(k-1))) for k = 1..n."""
    return _quotients(_exponents(psi, n, 0), cap, lazy)


@dataclass(frozen=True)
class LevelSetRatio:
    n: int
    log_sum: CertifiedReal
    ratio: CertifiedReal

    def to_json(self) -> dict:
        return {"n": self.n, "log_sum": repr(float(self.log_sum)), "ratio": repr(float(self.ratio)),
                "err": repr(float(self.ratio.radius))}


def log_sum_interval(word: Sequence[BigValue], n: int, prec: int) -> Interval:
    total = Interval.exact(0, prec)
    for a in word[:n]:
        if not isinstance(a, (FloorExp,)) and int(a) == 1:
            continue
        total = total + log_interval(a, prec)
    return total


def khintchine_ratio(word: Sequence[BigValue], psi: GrowthFunction, n: int, tol=Fraction(1, 10**20)) -> LevelSetRatio:
    """(1/psi(n)) sum_{j<=n} log a_j, certified to absolute error ``tol``."""
    if not 1 <= n <= len(word):
        raise DomainError(f"n={n} outside 1..{len(word)}")
    tol = as_fraction(tol)
    denom = psi(n)
    prec = 96
    while True:
        s = log_sum_interval(word, n, prec)
        r = s / denom
        ratio = r.certified()
        if ratio.radius <= tol or prec >= _MAX_PREC:
            return LevelSetRatio(n, s.certified(), ratio)
        prec *= 2


@dataclass(frozen=True)
class DnMembership:
    epsilon: Fraction
    n: int
    holds: bool
    ratio: CertifiedReal


def dn_membership(word: Sequence[BigValue], psi: GrowthFunction, epsilon, n: int) -> DnMembership:
    """Whether 1 - eps < ratio < 1 + eps, decided on certified enclosures."""
    epsilon = as_fraction(epsilon)
    if not 0 < epsilon < 1:
        raise DomainError("epsilon must lie in (0, 1)")
    if not 1 <= n <= len(word):
        raise DomainError(f"n={n} outside 1..{len(word)}")
    lo_bound, hi_bound = 1 - epsilon, 1 + epsilon
    if all(not isinstance(a, FloorExp) and int(a) == 1 for a in word[:n]):
        return DnMembership(epsilon, n, False, CertifiedReal(Fraction(0)))
    prec = 96
    while prec <= _MAX_PREC:
        r = log_sum_interval(word, n, prec) / psi(n)
        if r.certainly_gt(lo_bound) and r.certainly_lt(hi_bound):
            return DnMembership(epsilon, n, True, r.certified())
        if r.certainly_le(lo_bound) or r.certainly_ge(hi_bound):
            return DnMembership(epsilon, n, False, r.certified())
        prec *= 2
    raise ResourceError("membership undecided at maximum precision")


def extension_quotient(word: Sequence[int], psi: GrowthFunction, epsilon) -> int:
    """A quotient a_{n+1} keeping a word of D_n(eps) inside D_{n+1}(eps).

    If the log-sum already exceeds (1-eps) psi(n+1) the answer is 1; otherwise
    it is floor(e^psi(n+1) / (a_1 ... a_n)).
    """
    epsilon = as_fraction(epsilon)
    word = as_word(word)
    n = len(word)
    target = psi(n + 1)
    prec = 128
    s = log_sum_interval(word, n, prec)
    if s.certainly_gt((1 - epsilon) * target):
        return 1
    prod = 1
    for a in word:
        prod *= a
    a = floor_exp(target) // prod
    assert a >= 1, "extension quotient vanished"
    return a


def f_set_sampler(
    s_seq: Union[Sequence[int], Callable[[int], int]], ell: int, n: int, seed: int
) -> tuple[int, ...]:
    """A word with s_k <= a_k < ell * s_k, each a_k uniform on that range.

    ``s_seq`` is indexed from k = 1, either as a sequence (s_seq[0] is s_1) or
    as a callable k -> s_k.
    """
    if ell < 2:
        raise DomainError("ell must be at least 2")
    rng = random.Random(seed)
    out = []
    for k in range(1, n + 1):
        s = s_seq(k) if callable(s_seq) else s_seq[k - 1]
        s = int(s)
        assert s >= 1, f"s_{k} must be positive"
        out.append(rng.randint(s, ell * s - 1))
    return tuple(out)


def _exact_power_ge(a: int, q: int, beta: Fraction) -> bool:
    # a >= q**(r/s)  <=>  a**s >= q**r
    return a**beta.denominator >= q**beta.numerator


def jarnik_check(word: Sequence[int], beta) -> list[int]:
    """All n (1-based) with a_{n+1} >= q_n ** beta.

    beta = 0 is accepted as the limiting case where every index qualifies.
    Small-denominator rational beta is decided by exact integer powers,
    anything else by certified logarithms with increasing precision.
    """
    word = as_word(word)
    if len(word) < 2:
        raise DomainError("need at least two quotients")
    beta = as_fraction(beta)
    if beta < 0:
        raise DomainError("beta must be non-negative")
    hits = []
    state = INITIAL_STATE
    for n in range(1, len(word)):
        state = step(state, word[n - 1])
        a, q = word[n], state.q_cur
        if _compare_power(a, q, beta):
            hits.append(n)
    return hits


def _compare_power(a: int, q: int, beta: Fraction) -> bool:
    if beta == 0 or q == 1:
        return a >= 1
    exact_cost = beta.denominator * a.bit_length() + beta.numerator * q.bit_length()
    if beta.denominator <= 64 and exact_cost <= 1 << 22:
        return _exact_power_ge(a, q, beta)
    prec = 128
    while prec <= _MAX_PREC:
        lhs = Interval.exact(a, prec).log()
        rhs = Interval.exact(q, prec).log() * beta
        if lhs.certainly_ge(rhs):
            return True
        if lhs.certainly_lt(rhs):
            return False
        prec *= 2
    return _exact_power_ge(a, q, beta)


def ratio_trace_lines(word: Sequence[BigValue], psi: GrowthFunction, ns: Optional[Iterable[int]] = None) -> list[str]:
    """JSON lines {"n", "a_n", "log_sum", "ratio"} for each prefix length."""
    ns = range(1, len(word) + 1) if ns is None else ns
    lines = []
    for n in ns:
        r = khintchine_ratio(word, psi, n)
        lines.append(json.dumps({
            "n": n,
            "a_n": str(word[n - 1]),
            "log_sum": repr(float(r.log_sum)),
            "ratio": repr(float(r.ratio)),
        }))
    return lines
