"""Certified real arithmetic on top of mpmath's directed-rounding primitives.

Everything here is stateless: precision is an explicit argument, so no global
mpmath context is touched. Intervals carry binary floating endpoints rounded
outward; :class:`CertifiedReal` is the exact-rational midpoint/radius view
handed to callers.

Two lazy integer types stand in for integers too large to materialize:
:class:`FloorExp` is ``floor(e**m)`` and :class:`Power` is ``base**exponent``.
Both expose a certified logarithm, which is all the log-space code needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Union

from mpmath import libmp

from .errors import DomainError, ResourceError

#: Largest exponent m for which floor(e**m) is ever materialized (about
#: 434 thousand decimal digits).
DEFAULT_EXPONENT_CAP = 10**6

_MAX_PREC = 1 << 23
_SPECIAL = (libmp.finf, libmp.fninf, libmp.fnan)

Exact = Union[int, Fraction]


def as_fraction(x) -> Fraction:
    """Exact rational value of an int, Fraction, float or decimal string."""
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(int(x.numerator), int(x.denominator))
    if isinstance(x, float):
        if not math.isfinite(x):
            raise DomainError(f"non-finite value {x!r}")
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def mpf_to_fraction(x) -> Fraction:
    if x in _SPECIAL:
        raise ResourceError("interval endpoint overflowed")
    sign, man, exp, _ = x
    if abs(exp) > 10**7:
        raise ResourceError("endpoint exponent too large for an exact rational")
    man = int(man)
    v = Fraction(man << exp) if exp >= 0 else Fraction(man, 1 << -exp)
    return -v if sign else v


def _from_exact(x: Exact, prec: int, rnd: str):
    x = as_fraction(x)
    if x.denominator == 1:
        return libmp.from_int(x.numerator, prec, rnd)
    return libmp.from_rational(x.numerator, x.denominator, prec, rnd)


def _min(*xs):
    best = xs[0]
    for x in xs[1:]:
        if libmp.mpf_cmp(x, best) < 0:
            best = x
    return best


def _max(*xs):
    best = xs[0]
    for x in xs[1:]:
        if libmp.mpf_cmp(x, best) > 0:
            best = x
    return best


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi] with outward-rounded binary endpoints."""

    lo: tuple
    hi: tuple
    prec: int

    @classmethod
    def exact(cls, x: Exact, prec: int) -> "Interval":
        return cls(_from_exact(x, prec, "f"), _from_exact(x, prec, "c"), prec)

    @classmethod
    def hull(cls, lo: Exact, hi: Exact, prec: int) -> "Interval":
        return cls(_from_exact(lo, prec, "f"), _from_exact(hi, prec, "c"), prec)

    def _coerce(self, other) -> "Interval":
        if isinstance(other, Interval):
            return other
        return Interval.exact(other, self.prec)

    def __add__(self, other) -> "Interval":
        o = self._coerce(other)
        p = max(self.prec, o.prec)
        return Interval(libmp.mpf_add(self.lo, o.lo, p, "f"), libmp.mpf_add(self.hi, o.hi, p, "c"), p)

    __radd__ = __add__

    def __neg__(self) -> "Interval":
        return Interval(libmp.mpf_neg(self.hi), libmp.mpf_neg(self.lo), self.prec)

    def __sub__(self, other) -> "Interval":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Interval":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Interval":
        o = self._coerce(other)
        p = max(self.prec, o.prec)
        pairs = [(a, b) for a in (self.lo, self.hi) for b in (o.lo, o.hi)]
        lows = [libmp.mpf_mul(a, b, p, "f") for a, b in pairs]
        highs = [libmp.mpf_mul(a, b, p, "c") for a, b in pairs]
        return Interval(_min(*lows), _max(*highs), p)

    __rmul__ = __mul__

    def reciprocal(self) -> "Interval":
        if self.contains_zero():
            raise ZeroDivisionError("interval contains zero")
        one = libmp.fone
        return Interval(
            libmp.mpf_div(one, self.hi, self.prec, "f"),
            libmp.mpf_div(one, self.lo, self.prec, "c"),
            self.prec,
        )

    def __truediv__(self, other) -> "Interval":
        return self * self._coerce(other).reciprocal()

    def __rtruediv__(self, other) -> "Interval":
        return self._coerce(other) * self.reciprocal()

    def exp(self) -> "Interval":
        return Interval(libmp.mpf_exp(self.lo, self.prec, "f"), libmp.mpf_exp(self.hi, self.prec, "c"), self.prec)

    def log(self) -> "Interval":
        if libmp.mpf_cmp(self.lo, libmp.fzero) <= 0:
            raise DomainError("logarithm of a non-positive interval")
        return Interval(libmp.mpf_log(self.lo, self.prec, "f"), libmp.mpf_log(self.hi, self.prec, "c"), self.prec)

    def contains_zero(self) -> bool:
        return libmp.mpf_cmp(self.lo, libmp.fzero) <= 0 <= libmp.mpf_cmp(self.hi, libmp.fzero)

    def certainly_lt(self, other) -> bool:
        return libmp.mpf_cmp(self.hi, self._coerce(other).lo) < 0

    def certainly_le(self, other) -> bool:
        return libmp.mpf_cmp(self.hi, self._coerce(other).lo) <= 0

    def certainly_gt(self, other) -> bool:
        return self._coerce(other).certainly_lt(self)

    def certainly_ge(self, other) -> bool:
        return self._coerce(other).certainly_le(self)

    @property
    def lo_fraction(self) -> Fraction:
        return mpf_to_fraction(self.lo)

    @property
    def hi_fraction(self) -> Fraction:
        return mpf_to_fraction(self.hi)

    def width_float(self) -> float:
        return libmp.to_float(libmp.mpf_sub(self.hi, self.lo, 53, "c"))

    def mid_float(self) -> float:
        return libmp.to_float(libmp.mpf_add(self.lo, self.hi, 53)) / 2

    def certified(self) -> "CertifiedReal":
        return CertifiedReal.from_bounds(self.lo_fraction, self.hi_fraction)


@dataclass(frozen=True)
class CertifiedReal:
    """A real number known to lie in [value - radius, value + radius]."""

    value: Fraction
    radius: Fraction = Fraction(0)

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be non-negative")

    @classmethod
    def from_bounds(cls, lo: Exact, hi: Exact) -> "CertifiedReal":
        lo, hi = as_fraction(lo), as_fraction(hi)
        if lo > hi:
            raise ValueError("empty interval")
        return cls((lo + hi) / 2, (hi - lo) / 2)

    @property
    def lo(self) -> Fraction:
        return self.value - self.radius

    @property
    def hi(self) -> Fraction:
        return self.value + self.radius

    def contains(self, x) -> bool:
        return self.lo <= as_fraction(x) <= self.hi

    def interval(self, prec: int = 128) -> Interval:
        return Interval.hull(self.lo, self.hi, prec)

    def __float__(self) -> float:
        return float(self.value)

    def to_json(self) -> dict:
        return {"value": repr(float(self.value)), "err": repr(float(self.radius))}


# -- lazily represented huge integers ---------------------------------------


@dataclass(frozen=True)
class FloorExp:
    """The integer floor(e**exponent), kept symbolic until asked for."""

    exponent: Fraction

    def __post_init__(self):
        object.__setattr__(self, "exponent", as_fraction(self.exponent))
        if self.exponent < 0:
            raise DomainError("floor(e**m) needs m >= 0 to be a positive integer")

    def materialize(self, cap: Exact = DEFAULT_EXPONENT_CAP) -> int:
        if self.exponent > cap:
            raise ResourceError(f"floor(e**{float(self.exponent):.6g}) exceeds the exponent cap {cap}")
        return floor_exp(self.exponent, cap=cap)

    __int__ = materialize

    def log_interval(self, prec: int) -> Interval:
        m = self.exponent
        if m <= 64:
            return Interval.exact(self.materialize(), prec).log()
        # e**m - 1 < floor(e**m) <= e**m, and log(1 - u) >= -2u for u <= 1/2
        small = (-Interval.exact(m, prec)).exp()
        upper = Interval.exact(m, prec)
        lower = upper - small * 2
        return Interval(lower.lo, upper.hi, prec)

    def __str__(self):
        return f"floor(exp({self.exponent}))"


@dataclass(frozen=True)
class Power:
    """The integer base**exponent, kept symbolic until asked for."""

    base: int
    exponent: int

    def __post_init__(self):
        if self.base < 1 or self.exponent < 0:
            raise DomainError("Power needs base >= 1 and exponent >= 0")

    def bit_length(self) -> int:
        # upper bound on the true bit length
        return (self.base.bit_length()) * self.exponent

    def materialize(self, max_bits: int = 4 * DEFAULT_EXPONENT_CAP) -> int:
        if self.bit_length() > max_bits:
            raise ResourceError(f"{self.base}**{self.exponent} exceeds {max_bits} bits")
        return self.base**self.exponent

    __int__ = materialize

    def log_interval(self, prec: int) -> Interval:
        if self.base == 1:
            return Interval.exact(0, prec)
        return Interval.exact(self.base, prec).log() * self.exponent

    def __str__(self):
        return f"{self.base}**{self.exponent}"


BigValue = Union[int, FloorExp, Power]


def log_interval(x: BigValue, prec: int) -> Interval:
    """Certified enclosure of log(x) for a positive integer or lazy integer."""
    if isinstance(x, (FloorExp, Power)):
        return x.log_interval(prec)
    if x <= 0:
        raise DomainError(f"log of non-positive integer {x}")
    return Interval.exact(int(x), prec).log()


def exp_interval(x: Exact, prec: int) -> Interval:
    return Interval.exact(x, prec).exp()


def floor_exp(m: Exact, cap: Exact = DEFAULT_EXPONENT_CAP) -> int:
    """Exact floor(e**m) for rational m >= 0, certified by interval refinement.

    Precision doubles until the enclosure of e**m contains no integer
    boundary. For m != 0, e**m is irrational so this terminates.
    """
    m = as_fraction(m)
    if m < 0:
        raise DomainError("floor_exp needs m >= 0")
    if m > cap:
        raise ResourceError(f"exponent {float(m):.6g} exceeds cap {cap}")
    if m == 0:
        return 1
    prec = int(m * Fraction(14427, 10000)) + 64
    while prec <= _MAX_PREC:
        enc = exp_interval(m, prec)
        lo = libmp.to_int(enc.lo, "f")
        hi = libmp.to_int(enc.hi, "f")
        if lo == hi:
            return int(lo)
        prec *= 2
    raise ResourceError(f"could not certify floor(e**{m}) within {_MAX_PREC} bits")
