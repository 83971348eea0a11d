"""Exact continued-fraction arithmetic: expansion, convergents and cylinders.

Words of partial quotients are plain tuples of Python ints, so they never
overflow. Convergents follow the recursion

    p_n = a_n p_{n-1} + p_{n-2},   q_n = a_n q_{n-1} + q_{n-2}

with p_0 = q_{-1} = 0 and p_{-1} = q_0 = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple, Sequence, Union

from .certified import CertifiedReal, as_fraction
from .errors import DomainError

Word = tuple[int, ...]


def as_word(seq: Iterable) -> Word:
    """Validate and freeze a sequence of partial quotients.

    Lazy quotients (see :mod:`fastkhin.certified`) are materialized, which may
    raise :class:`~fastkhin.errors.ResourceError`.
    """
    out = []
    for a in seq:
        if isinstance(a, bool):
            raise DomainError("partial quotients must be integers")
        if isinstance(a, str):
            a = int(a)
        a = int(a)
        if a < 1:
            raise DomainError(f"partial quotient {a} is not positive")
        out.append(a)
    return tuple(out)


class ConvergentState(NamedTuple):
    """(p_{n-1}, q_{n-1}, p_n, q_n) after consuming n quotients."""

    n: int
    p_prev: int
    q_prev: int
    p_cur: int
    q_cur: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.p_cur, self.q_cur)

    def determinant(self) -> int:
        """p_{n-1} q_n - p_n q_{n-1}; always (-1)**n."""
        return self.p_prev * self.q_cur - self.p_cur * self.q_prev


INITIAL_STATE = ConvergentState(0, 1, 0, 0, 1)


def step(state: ConvergentState, a: int) -> ConvergentState:
    return ConvergentState(
        state.n + 1,
        state.p_cur,
        state.q_cur,
        a * state.p_cur + state.p_prev,
        a * state.q_cur + state.q_prev,
    )


def convergents(word: Sequence[int]) -> Iterator[ConvergentState]:
    """Yield the state after each quotient of ``word`` (orders 1..n)."""
    word = as_word(word)
    if not word:
        raise DomainError("convergents of an empty word")
    state = INITIAL_STATE
    for a in word:
        state = step(state, a)
        yield state


def final_state(word: Sequence[int]) -> ConvergentState:
    """State after the whole word; the empty word gives the initial state."""
    state = INITIAL_STATE
    for a in as_word(word):
        state = step(state, a)
    return state


def evaluate(word: Sequence[int]) -> Fraction:
    """The finite continued fraction [a_1, ..., a_n] = p_n / q_n."""
    word = as_word(word)
    if not word:
        raise DomainError("cannot evaluate an empty word")
    s = final_state(word)
    return Fraction(s.p_cur, s.q_cur)


def gauss_expand(x: Union[Fraction, int, float, str, CertifiedReal], max_n: int) -> Word:
    """Partial quotients of x in [0, 1) produced by the Gauss map.

    Rationals terminate with a last quotient >= 2. A :class:`CertifiedReal`
    is pushed through the Gauss map as an exact interval; expansion stops as
    soon as the interval is no longer inside a single first-level cylinder,
    so every emitted quotient is correct for every point of the interval.
    """
    if max_n < 1:
        raise DomainError("max_n must be positive")
    if isinstance(x, CertifiedReal):
        return _expand_interval(x.lo, x.hi, max_n)
    x = as_fraction(x)
    if not 0 <= x < 1:
        raise DomainError(f"{x} is outside [0, 1)")
    out = []
    while x and len(out) < max_n:
        a, r = divmod(1 / x, 1)
        out.append(int(a))
        x = r
    return tuple(out)


def _expand_interval(lo: Fraction, hi: Fraction, max_n: int) -> Word:
    if lo < 0 or hi >= 1:
        raise DomainError("certified input is not inside [0, 1)")
    out = []
    while len(out) < max_n and lo > 0:
        a = (1 / hi).__floor__()
        if (1 / lo).__floor__() != a:
            break
        # x -> 1/x - a is decreasing, so the endpoints swap
        lo, hi = 1 / hi - a, 1 / lo - a
        out.append(int(a))
    return tuple(out)


@dataclass(frozen=True)
class Cylinder:
    """The order-n cylinder I_n(a_1..a_n) as the interval [left, right).

    The endpoints are p_n/q_n and (p_n + p_{n-1})/(q_n + q_{n-1}); which one is
    on the left depends on the parity of n. Half-openness is a convention:
    the rational endpoints are where neighbouring cylinders touch.
    """

    word: Word
    left: Fraction
    right: Fraction
    diameter: Fraction

    @property
    def order(self) -> int:
        return len(self.word)

    def contains(self, x) -> bool:
        x = as_fraction(x)
        return self.left <= x < self.right


def cylinder(word: Sequence[int]) -> Cylinder:
    word = as_word(word)
    if not word:
        raise DomainError("cylinder of an empty word")
    s = final_state(word)
    a = Fraction(s.p_cur, s.q_cur)
    b = Fraction(s.p_cur + s.p_prev, s.q_cur + s.q_prev)
    left, right = (a, b) if len(word) % 2 == 0 else (b, a)
    return Cylinder(word, left, right, Fraction(1, s.q_cur * (s.q_cur + s.q_prev)))


def tail_union_diameter(word: Sequence[int], a_min: int) -> Fraction:
    """Diameter of the union of I_{n+1}(word, a) over all a >= a_min.

    The union runs from p_n/q_n to the endpoint at a = a_min, so by the
    determinant identity its length is 1 / (q_n (a_min q_n + q_{n-1})).
    """
    word = as_word(word)
    if not word:
        raise DomainError("tail union of an empty word")
    if a_min < 1:
        raise DomainError("a_min must be >= 1")
    s = final_state(word)
    return Fraction(1, s.q_cur * (a_min * s.q_cur + s.q_prev))


def is_canonical(word: Sequence[int]) -> bool:
    """True for words that gauss_expand can return: empty or last quotient >= 2."""
    return not word or word[-1] >= 2


def serialize_word(word: Iterable) -> list[str]:
    return [str(a) for a in word]


def serialize_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"
