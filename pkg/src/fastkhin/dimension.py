"""Dimension formulas and finite-horizon estimators.

Closed forms:

* E(psi): 1 / (1 + b), b = limsup psi(n+1)/psi(n); empty unless psi is
  equivalent to an increasing function.
* F({s_n}; ell): liminf log(s_1..s_n) / (2 log(s_1..s_n) + log s_{n+1}).
* Jarnik sets: dim J_beta <= 2/(2+beta), dim J*_beta = 1/(2+beta).

Limits are replaced by tail-window extrema over stated horizons; none of the
estimators claim to compute a limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .certified import BigValue, CertifiedReal, Interval, as_fraction, log_interval
from .errors import DomainError
from .growth import (
    GrowthFunction,
    increasing_equivalence_check,
    limsup_ratio,
    superlinearity_check,
)

Value = Union[Fraction, float]
SSeq = Union[Sequence[BigValue], Callable[[int], BigValue]]

_PREC = 192


@dataclass
class DimensionEstimate:
    value: Value
    method: str
    horizon: Optional[int] = None
    diagnostics: dict = field(default_factory=dict)
    flags: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not 0 <= self.value <= 1:
            raise ValueError(f"dimension {self.value} outside [0, 1]")

    @property
    def exact(self) -> bool:
        return isinstance(self.value, Fraction)

    def value_str(self) -> str:
        if isinstance(self.value, Fraction):
            return f"{self.value.numerator}/{self.value.denominator}"
        return repr(float(self.value))


def _s(s_seq: SSeq, k: int) -> BigValue:
    return s_seq(k) if callable(s_seq) else s_seq[k - 1]


def _log_s(s_seq: SSeq, k: int) -> Interval:
    return log_interval(_s(s_seq, k), _PREC)


# -- ratio formula for F({s_n}; ell) -------------------------------------------


def _mean_grows(logs: list[float], horizon: int) -> bool:
    # log of (1/n) sum_{k<=n} s_k at n = h/4, h/2, h
    def log_mean(n):
        xs = np.array(logs[:n])
        m = xs.max()
        return m + math.log(np.exp(xs - m).sum()) - math.log(n)

    pts = [max(1, horizon // 4), max(2, horizon // 2), horizon]
    vals = [log_mean(n) for n in pts]
    return vals[0] < vals[1] < vals[2]


def lemma31_dimension(s_seq: SSeq, horizon: int) -> DimensionEstimate:
    """Tail minimum over [horizon/2, horizon] of the finite log-product ratios.

    ``s_seq`` holds s_1, s_2, ... (a sequence or a callable k -> s_k) and must
    reach index horizon + 1. Entries may be lazy integers. Raises
    :class:`DomainError` unless the running mean of s_k grows over the
    sampled range.
    """
    if horizon < 4:
        raise DomainError("horizon must be at least 4")
    logs = [_log_s(s_seq, k) for k in range(1, horizon + 2)]
    mids = [x.mid_float() for x in logs]
    if not _mean_grows(mids[:horizon], horizon):
        raise DomainError("(1/n) sum s_k does not grow over the sampled range")
    trace = []
    total = Interval.exact(0, _PREC)
    for n in range(1, horizon + 1):
        total = total + logs[n - 1]
        denom = total * 2 + logs[n]
        r = 0.0 if denom.mid_float() == 0 else (total / denom).mid_float()
        trace.append(r)
    tail = trace[horizon // 2 - 1 :]
    value = min(tail)
    return DimensionEstimate(
        value,
        "lemma31",
        horizon,
        {"trace": trace, "tail_start": horizon // 2, "argmin": horizon // 2 + tail.index(value)},
    )


# -- fast Khintchine spectrum ---------------------------------------------------


def dimension_from_b(b) -> Value:
    """1 / (1 + b); b = inf gives exactly 0."""
    if b == math.inf:
        return Fraction(0)
    if isinstance(b, (int, Fraction)):
        return Fraction(1) / (1 + as_fraction(b))
    return 1.0 / (1.0 + float(b))


def _preset_b(psi: GrowthFunction):
    """Known limsup for presets, or None. Returns (b, superlinear)."""
    if psi.kind == "geometric":
        base = psi.param("base")
        return base, base > 1
    if psi.kind == "polynomial":
        return Fraction(1), psi.param("gamma") > 1
    if psi.kind == "factorial_block":
        return math.inf, True
    return None


def fast_khintchine_dimension(psi: GrowthFunction, horizon: int = 1000, tolerance=Fraction(1, 100)) -> DimensionEstimate:
    """dim_H E(psi) = 1 / (1 + b).

    Presets with a known limsup return exact values (geometric base b gives
    1/(1+b), polynomial 1/2, factorial-block 0). Other psi go through the
    finite-horizon diagnostics; a failed equivalence check means E(psi) is
    empty and the value 0 is returned with an ``empty_set`` flag.
    """
    preset = _preset_b(psi)
    diagnostics: dict = {}
    flags: list[str] = []
    if preset is not None:
        b, superlinear = preset
        diagnostics["b"] = "inf" if b == math.inf else str(b)
        diagnostics["source"] = "closed_form"
        if not superlinear:
            flags.append("not_superlinear")
        if b == math.inf:
            flags.append("b_infinite")
        return DimensionEstimate(dimension_from_b(b), "theorem11", horizon, diagnostics, flags)

    eq = increasing_equivalence_check(psi, horizon, tolerance)
    sl = superlinearity_check(psi, horizon)
    diagnostics.update(
        source="finite_horizon",
        equivalence_sup=float(eq.sup_deviation),
        superlinear_last_half_min=float(sl.last_half_min),
    )
    if not sl.passed:
        flags.append("not_superlinear")
    if not eq.passed:
        flags.append("empty_set")
        return DimensionEstimate(Fraction(0), "theorem11", horizon, diagnostics, flags)
    lim = limsup_ratio(psi, horizon)
    diagnostics["b"] = "inf" if lim.divergence_flag else str(lim.b_hat)
    diagnostics["window_maxima"] = [float(m) for m in lim.window_maxima]
    if lim.divergence_flag:
        flags.append("b_infinite")
    return DimensionEstimate(dimension_from_b(lim.b_hat), "theorem11", horizon, diagnostics, flags)


# -- Jarnik sets and the beta exponent -----------------------------------------


def _num(x):
    return as_fraction(x) if isinstance(x, (int, Fraction, str)) else float(x)


def jarnik_bounds(beta) -> tuple[Value, Value]:
    """(upper bound 2/(2+beta) for dim J_beta, exact dim J*_beta = 1/(2+beta))."""
    beta = _num(beta)
    if beta <= 0:
        raise DomainError("beta must be positive")
    return 2 / (2 + beta), 1 / (2 + beta)


@dataclass(frozen=True)
class BetaExponent:
    epsilon: Value
    b: Value
    beta: Value
    upper_bound: Optional[Value]

    @property
    def positive(self) -> bool:
        return self.beta > 0


def beta_exponent(b, epsilon) -> BetaExponent:
    """beta = (1-eps)(b(1-eps)^2/(1+eps) - 1) and the bound (1+eps)/(2+beta).

    The bound is only meaningful for positive beta and is None otherwise.
    """
    b, eps = _num(b), _num(epsilon)
    if b < 1:
        raise DomainError("b must be at least 1")
    if not 0 < eps < 1:
        raise DomainError("epsilon must lie in (0, 1)")
    beta = (1 - eps) * (b * (1 - eps) ** 2 / (1 + eps) - 1)
    bound = (1 + eps) / (2 + beta) if beta > 0 else None
    return BetaExponent(eps, b, beta, bound)


# -- covering sums over the F-family -------------------------------------------


@dataclass(frozen=True)
class CoveringLevel:
    n: int
    log_count: float
    lower: float
    upper: float


@dataclass
class CoveringTrace:
    s_exponent: float
    levels: list[CoveringLevel]
    upper_decreasing: bool
    lower_increasing: bool

    def csv_rows(self) -> list[list]:
        return [[lv.n, repr(lv.lower), repr(lv.upper), repr(lv.log_count)] for lv in self.levels]


def _strictly_monotone(xs: list[float], decreasing: bool, window: int) -> bool:
    tail = xs[-window:]
    if len(tail) < 2:
        return False
    pairs = zip(tail, tail[1:])
    return all(b < a for a, b in pairs) if decreasing else all(b > a for a, b in pairs)


def covering_sum_trace(s_seq: SSeq, ell: int, s_exponent, depth: int, window: int = 5) -> CoveringTrace:
    """Bracket log sum |J_n|^s over the fundamental intervals of F({s_k}; ell).

    J_n(a_1..a_n) is the union of I_{n+1}(a_1..a_n, a) over s_{n+1} <= a <
    ell s_{n+1}; there are prod (ell-1) s_k of them at level n. Its length is
    (ell-1) s / ((s q_n + q_{n-1})(ell s q_n + q_{n-1})) with s = s_{n+1},
    which with prod a_k <= q_n <= 2^n prod a_k gives

        log|J_n| <= log((ell-1)/ell) - log s_{n+1} - 2 sum log s_k
        log|J_n| >= log((ell-1)/(2(ell+1))) - log s_{n+1} - 2n log 2 - 2 sum log(ell s_k)

    ``s_seq`` must reach index depth + 1.
    """
    if ell < 2:
        raise DomainError("ell must be at least 2")
    s = _num(s_exponent)
    if not 0 < s < 1:
        raise DomainError("s_exponent must lie in (0, 1)")
    p = _PREC
    s_iv = Interval.exact(as_fraction(s), p)
    log2 = Interval.exact(2, p).log()
    log_ell = Interval.exact(ell, p).log()
    log_ell1 = Interval.exact(ell - 1, p).log()
    c_hi = log_ell1 - log_ell
    c_lo = log_ell1 - log2 - Interval.exact(ell + 1, p).log()
    levels = []
    sum_log = Interval.exact(0, p)
    for n in range(1, depth + 1):
        sum_log = sum_log + _log_s(s_seq, n)
        nxt = _log_s(s_seq, n + 1)
        log_count = sum_log + log_ell1 * n
        up = log_count + s_iv * (c_hi - nxt - sum_log * 2)
        lo = log_count + s_iv * (c_lo - nxt - log2 * (2 * n) - (sum_log + log_ell * n) * 2)
        levels.append(CoveringLevel(n, log_count.mid_float(), lo.lo_fraction.__float__(), up.hi_fraction.__float__()))
    uppers = [lv.upper for lv in levels]
    lowers = [lv.lower for lv in levels]
    return CoveringTrace(
        float(s),
        levels,
        _strictly_monotone(uppers, True, window),
        _strictly_monotone(lowers, False, window),
    )


# -- empirical box counting ----------------------------------------------------


def _bin(x, k: int) -> int:
    if isinstance(x, CertifiedReal):
        x = x.value
    if isinstance(x, Fraction):
        return (x.numerator << k) // x.denominator
    return math.floor(x * (1 << k))


def box_counting(points: Sequence, scales: Sequence[int]) -> DimensionEstimate:
    """Least-squares slope of log N(2^-k) against k log 2.

    ``scales`` are dyadic exponents k, i.e. bins [j 2^-k, (j+1) 2^-k); a point
    on a bin boundary goes to the right-hand bin. Needs at least 10^3 points
    and 4 scales covering a factor of 10^3.
    """
    ks = sorted(set(int(k) for k in scales))
    if len(points) < 1000:
        raise DomainError("box counting needs at least 1000 points")
    if len(ks) < 4 or (1 << (ks[-1] - ks[0])) < 1000:
        raise DomainError("need at least 4 scales spanning 3 orders of magnitude")
    counts = [len({_bin(x, k) for x in points}) for k in ks]
    xs = np.array(ks, dtype=float) * math.log(2)
    ys = np.log(np.array(counts, dtype=float))
    (slope, intercept), res, *_ = np.polyfit(xs, ys, 1, full=True)
    residual = float(res[0]) if len(res) else 0.0
    value = min(max(float(slope), 0.0), 1.0)
    return DimensionEstimate(
        value,
        "box_counting",
        None,
        {"scales": ks, "counts": counts, "slope": float(slope), "residual": residual},
    )


def cantor_points(depth: int) -> list[Fraction]:
    """Left endpoints of the 2**depth middle-third intervals at that depth."""
    pts = [Fraction(0)]
    for i in range(1, depth + 1):
        step = Fraction(2, 3**i)
        pts = pts + [x + step for x in pts]
    return sorted(pts)
