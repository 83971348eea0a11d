"""Growth functions psi and finite-horizon diagnostics for them.

The asymptotic quantities that decide the dimension of E(psi) (the limsup
of psi(n+1)/psi(n), superlinearity and equivalence to an increasing function)
cannot be computed from finitely many values. The functions below report
windowed extrema over explicit horizons and are labelled as heuristics.

All presets evaluate to exact rationals; psi(0) = 0 by convention.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Callable, Mapping, Optional, Sequence, Union

from .certified import Interval, as_fraction
from .errors import DomainError

Number = Union[int, Fraction]

#: Default divergence threshold for :func:`limsup_ratio`.
DIVERGENCE_FACTOR = Fraction(11, 10)


@dataclass(frozen=True, eq=False)
class GrowthFunction:
    """psi: N -> positive rationals, with psi(0) = 0.

    ``kind`` is one of ``polynomial``, ``geometric``, ``factorial_block``,
    ``table`` or ``expression``; ``params`` records the preset parameters
    (used by closed-form dimension formulas and for serialization).
    """

    kind: str
    params: tuple
    evaluator: Callable[[int], Number] = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_cached", lru_cache(maxsize=None)(self._eval))

    def _eval(self, n: int) -> Fraction:
        if n == 0:
            return Fraction(0)
        v = as_fraction(self.evaluator(n))
        if v <= 0:
            raise DomainError(f"psi({n}) = {v} is not positive")
        return v

    def __call__(self, n: int) -> Fraction:
        if n < 0:
            raise DomainError("psi is defined on non-negative integers")
        return self._cached(n)

    def param(self, name: str, default=None):
        return dict(self.params).get(name, default)

    def describe(self) -> str:
        if not self.params:
            return self.kind
        return self.kind + ":" + ",".join(f"{k}={v}" for k, v in self.params)


def polynomial(gamma: Number = 2, c: Number = 1) -> GrowthFunction:
    """psi(n) = c * n**gamma (gamma a non-negative integer keeps it exact)."""
    gamma, c = as_fraction(gamma), as_fraction(c)
    if c <= 0:
        raise DomainError("coefficient must be positive")
    if gamma.denominator != 1:
        # defined as the 128-bit rounding of n**gamma, stored exactly
        def ev(n):
            return c * Interval.exact(n, 128).log().__mul__(gamma).exp().lo_fraction
    else:
        g = gamma.numerator

        def ev(n):
            return c * n**g

    return GrowthFunction("polynomial", (("gamma", gamma), ("c", c)), ev)


def geometric(base: Number = 2, c: Number = 1) -> GrowthFunction:
    """psi(n) = c * base**n."""
    base, c = as_fraction(base), as_fraction(c)
    if base <= 0 or c <= 0:
        raise DomainError("base and coefficient must be positive")
    return GrowthFunction("geometric", (("base", base), ("c", c)), lambda n: c * base**n)


def factorial_block() -> GrowthFunction:
    """psi(n) = (k+2)! for k! <= n < (k+1)!.

    The ratio psi(n+1)/psi(n) equals k+3 at n = (k+1)! - 1, so the limsup is
    infinite while psi stays increasing.
    """

    def ev(n):
        k, fk = 1, 1
        while fk * (k + 1) <= n:
            k += 1
            fk *= k
        return math.factorial(k + 2)

    return GrowthFunction("factorial_block", (), ev)


def table(values: Union[Mapping[int, Number], Sequence[Number]]) -> GrowthFunction:
    """psi from explicit values; a sequence is read as psi(1), psi(2), ..."""
    if isinstance(values, Mapping):
        data = {int(k): as_fraction(v) for k, v in values.items()}
    else:
        data = {i + 1: as_fraction(v) for i, v in enumerate(values)}

    def ev(n):
        try:
            return data[n]
        except KeyError:
            raise DomainError(f"table has no value for n={n}") from None

    return GrowthFunction("table", (("size", len(data)),), ev)


def table_from_csv(path) -> GrowthFunction:
    """Read ``n,psi(n)`` rows; a non-numeric first row is taken as a header."""
    data = {}
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                data[int(row[0])] = as_fraction(row[1])
            except ValueError:
                if data:
                    raise
    psi = table(data)
    return GrowthFunction("table", (("path", str(Path(path))), ("size", len(data))), psi.evaluator)


def expression(expr: Union[str, Callable[[int], Number]]) -> GrowthFunction:
    """psi from a callable or a sympy expression in ``n``.

    Rational-valued expressions are evaluated exactly; anything else is
    rounded to 60 significant digits and then stored exactly.
    """
    if callable(expr):
        return GrowthFunction("expression", (("expr", getattr(expr, "__name__", "callable")),), expr)
    import sympy

    n_sym = sympy.Symbol("n", integer=True, positive=True)
    parsed = sympy.sympify(expr, locals={"n": n_sym})

    def ev(n):
        v = parsed.subs(n_sym, n)
        if v.is_Rational:
            return Fraction(int(v.p), int(v.q))
        return Fraction(str(sympy.N(v, 60)))

    return GrowthFunction("expression", (("expr", str(expr)),), ev)


def parse_psi(spec: str) -> GrowthFunction:
    """Parse ``kind:params`` as used on the command line.

    Examples: ``polynomial:2``, ``polynomial:gamma=3,c=2``, ``geometric:3``,
    ``factorial_block``, ``table:psi.csv``, ``expression:n*ceiling(log(n+1))``.
    """
    kind, _, rest = spec.partition(":")
    kind = kind.strip().replace("-", "_")
    if kind == "expression" or kind == "expr":
        return expression(rest)
    if kind == "table":
        path = rest.split("=", 1)[1] if rest.startswith("path=") else rest
        return table_from_csv(path)
    if kind == "factorial_block":
        return factorial_block()
    args, kwargs = [], {}
    for tok in filter(None, (t.strip() for t in rest.split(","))):
        if "=" in tok:
            k, v = tok.split("=", 1)
            kwargs[k.strip()] = as_fraction(v)
        else:
            args.append(as_fraction(tok))
    if kind == "polynomial":
        return polynomial(*args, **kwargs)
    if kind == "geometric":
        return geometric(*args, **kwargs)
    raise DomainError(f"unknown psi kind {kind!r}")


# -- diagnostics -------------------------------------------------------------


@dataclass
class LimsupDiagnostic:
    """Finite-horizon proxy for limsup psi(n+1)/psi(n).

    ``window_maxima[i]`` is the maximum ratio over ``tail_starts[i] <= n <
    horizon``; ``records`` are the successive strict running maxima of the
    ratio from the first tail start, used for the divergence heuristic.
    """

    horizon: int
    tail_starts: list[int]
    window_maxima: list[Fraction]
    records: list[tuple[int, Fraction]]
    divergence_flag: bool
    b_hat: Union[Fraction, float]

    @property
    def b_tail(self) -> Fraction:
        return self.window_maxima[-1]


def limsup_ratio(
    psi: GrowthFunction,
    horizon: int,
    tail_starts: Optional[Sequence[int]] = None,
    growth_factor: Number = DIVERGENCE_FACTOR,
) -> LimsupDiagnostic:
    """Tail maxima of psi(n+1)/psi(n) and a divergence heuristic.

    The divergence flag is raised when the last three record ratios each
    exceed the previous record by at least ``growth_factor`` and the last
    record is recent on a log scale (its index squared reaches the horizon),
    so sparse spikes such as factorial blocks still count. ``b_hat`` is the
    tail maximum at the largest tail start, or ``math.inf`` when flagged.
    """
    if tail_starts is None:
        tail_starts = sorted({1, max(1, horizon // 8), max(1, horizon // 4), max(1, horizon // 2)})
    tail_starts = sorted(int(t) for t in tail_starts)
    if not tail_starts or tail_starts[0] < 1:
        raise DomainError("tail starts must be positive")
    if horizon < tail_starts[-1] + 2:
        raise DomainError("horizon must be at least max(tail_starts) + 2")
    growth_factor = as_fraction(growth_factor)

    start = tail_starts[0]
    ratios = {}
    for n in range(start, horizon):
        lo, hi = psi(n), psi(n + 1)
        ratios[n] = hi / lo

    # suffix maxima give every window maximum in one pass
    suffix, best = {}, None
    for n in range(horizon - 1, start - 1, -1):
        best = ratios[n] if best is None or ratios[n] > best else best
        suffix[n] = best
    maxima = [suffix[t] for t in tail_starts]

    records = []
    for n in range(start, horizon):
        if not records or ratios[n] > records[-1][1]:
            records.append((n, ratios[n]))

    divergent = False
    if len(records) >= 3:
        r = [v for _, v in records[-3:]]
        recent = records[-1][0] ** 2 >= horizon
        divergent = recent and r[1] >= growth_factor * r[0] and r[2] >= growth_factor * r[1]
    b_hat = math.inf if divergent else maxima[-1]
    return LimsupDiagnostic(horizon, list(tail_starts), maxima, records, divergent, b_hat)


@dataclass
class SuperlinearityReport:
    horizon: int
    last_half_min: Fraction
    decile_minima: list[Fraction]
    passed: bool


def superlinearity_check(psi: GrowthFunction, horizon: int) -> SuperlinearityReport:
    """Heuristic check that psi(n)/n keeps growing.

    Passes when the minimum of psi(n)/n over the last half of [1, horizon]
    strictly exceeds the minimum of every decile in the first half.
    """
    if horizon < 10:
        raise DomainError("horizon must be at least 10")
    vals = [psi(n) / n for n in range(1, horizon + 1)]
    last_half_min = min(vals[horizon // 2 :])
    edges = [round(i * horizon / 10) for i in range(11)]
    deciles = [min(vals[edges[i] : edges[i + 1]]) for i in range(10)]
    first_half = deciles[:5]
    passed = all(last_half_min > d for d in first_half)
    return SuperlinearityReport(horizon, last_half_min, deciles, passed)


@dataclass
class EquivalenceReport:
    horizon: int
    tolerance: Fraction
    sup_deviation: Fraction
    worst_n: int
    passed: bool

    def __bool__(self):
        return self.passed


def increasing_equivalence_check(psi: GrowthFunction, horizon: int, tolerance: Number) -> EquivalenceReport:
    """Compare psi with its running maximum on the tail [horizon/2, horizon].

    psi is increasing-equivalent exactly when psi(n) / max_{k<=n} psi(k) -> 1;
    this reports the largest deviation from 1 seen on the tail.
    """
    if horizon < 10:
        raise DomainError("horizon must be at least 10")
    tolerance = as_fraction(tolerance)
    if tolerance <= 0:
        raise DomainError("tolerance must be positive")
    envelope = Fraction(0)
    sup, worst = Fraction(0), horizon // 2
    for n in range(1, horizon + 1):
        v = psi(n)
        envelope = max(envelope, v)
        if n >= horizon // 2:
            dev = abs(v / envelope - 1)
            if dev > sup:
                sup, worst = dev, n
    return EquivalenceReport(horizon, tolerance, sup, worst, sup <= tolerance)


def subsequence_candidates(psi: GrowthFunction, b: Number, epsilon: Number, horizon: int) -> list[int]:
    """Indices n < horizon with psi(n+1) >= psi(n) b (1-eps) and n <= eps psi(n).

    A best-effort search for the subsequence used in the upper-bound
    argument; diagnostic only, nothing is claimed about its infinitude.
    """
    b, epsilon = as_fraction(b), as_fraction(epsilon)
    return [
        n
        for n in range(1, horizon)
        if psi(n + 1) >= psi(n) * b * (1 - epsilon) and n <= epsilon * psi(n)
    ]


def is_nondecreasing(psi: GrowthFunction, n: int) -> bool:
    return all(psi(k) >= psi(k - 1) for k in range(1, n + 1))
