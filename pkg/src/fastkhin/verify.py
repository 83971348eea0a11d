"""Randomized verification harness for the exact identities and inequalities.

Each suite returns a :class:`SuiteReport` with pass/fail counts; the CLI
``verify`` subcommand prints them and exits non-zero on any failure.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .certified import Interval
from .cfrac import convergents, cylinder, evaluate, gauss_expand, tail_union_diameter
from .measures import consistency_check, log_mu_interval, pressure_interval


@dataclass
class SuiteReport:
    suite: str
    trials: int
    checks: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, ok: bool, what: str):
        self.checks += 1
        if not ok and len(self.failures) < 20:
            self.failures.append(what)
        elif not ok:
            self.failures.append("...")

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "trials": self.trials,
            "checks": self.checks,
            "failed": len(self.failures),
            "passed": self.passed,
            "failures": self.failures[:20],
        }


def random_word(rng: random.Random, max_len: int, max_entry: int) -> tuple[int, ...]:
    n = rng.randint(1, max_len)
    return tuple(rng.randint(1, max_entry) for _ in range(n))


def identity_suite(depth: int = 200, trials: int = 1000, seed: int = 0, max_entry: int = 10**6) -> SuiteReport:
    """Determinant identity, cylinder diameter and the q_n bounds at every prefix."""
    rng = random.Random(seed)
    rep = SuiteReport("identities", trials)
    for _ in range(trials):
        word = random_word(rng, depth, max_entry)
        prod = 1
        ok = True
        for st in convergents(word):
            n = st.n
            prod *= word[n - 1]
            q, qp = st.q_cur, st.q_prev
            ok &= st.determinant() == (-1) ** n
            ok &= prod <= q <= (prod << n)
            ok &= q * q >= 1 << (n - 1)
        cyl = cylinder(word)
        diam = Fraction(1, q * (q + qp))
        ok &= cyl.diameter == diam == cyl.right - cyl.left
        ok &= Fraction(1, 2 * q * q) <= diam <= Fraction(1, q * q)
        rep.check(ok, f"word of length {len(word)} starting {word[:3]}")
    return rep


def roundtrip_suite(trials: int = 1000, seed: int = 0, max_len: int = 60, max_q: int = 10**9) -> SuiteReport:
    rng = random.Random(seed)
    rep = SuiteReport("roundtrip", trials)
    for _ in range(trials):
        w = list(random_word(rng, max_len, 1000))
        if w[-1] == 1:
            w[-1] = 2
        w = tuple(w)
        rep.check(gauss_expand(evaluate(w), len(w) + 1) == w, f"word {w[:4]}...")
        q = rng.randint(2, max_q)
        x = Fraction(rng.randint(1, q - 1), q)
        rep.check(evaluate(gauss_expand(x, 10**4)) == x, f"rational {x}")
    return rep


def tail_suite(trials: int = 100, seed: int = 0, terms: int = 2000) -> SuiteReport:
    """Truncated telescoping sum of cylinder gaps plus the exact remainder."""
    rng = random.Random(seed)
    rep = SuiteReport("tail", trials)
    for _ in range(trials):
        word = random_word(rng, 12, 50)
        a_min = rng.randint(1, 100)
        total = sum(cylinder(word + (a,)).diameter for a in range(a_min, a_min + terms))
        st = list(convergents(word))[-1]
        top = a_min + terms
        remainder = Fraction(1, st.q_cur * (top * st.q_cur + st.q_prev))
        rep.check(total + remainder == tail_union_diameter(word, a_min), f"word {word} a_min {a_min}")
    return rep


def measure_suite(trials: int = 50, seed: int = 0, alphabet_cap: int = 200) -> SuiteReport:
    """Child-sum brackets and the product law for Bernoulli measures."""
    rng = random.Random(seed)
    rep = SuiteReport("measures", trials)
    for _ in range(trials):
        t = Fraction(rng.randint(11, 40), 10)
        word = random_word(rng, 4, 20)
        r = consistency_check(t, word, alphabet_cap)
        rep.check(r.contains, f"bracket t={t} word={word}")
        a = rng.randint(1, 1000)
        child = log_mu_interval(t, word + (a,))
        law = log_mu_interval(t, word) - pressure_interval(t) - Interval.exact(a, 128).log() * t
        overlap = not child.certainly_lt(law) and not child.certainly_gt(law)
        rep.check(overlap, f"product law t={t} word={word} a={a}")
    return rep


SUITES = {
    "identities": lambda depth, trials, seed: identity_suite(depth, trials, seed),
    "roundtrip": lambda depth, trials, seed: roundtrip_suite(trials, seed),
    "tail": lambda depth, trials, seed: tail_suite(min(trials, 100), seed),
    "measures": lambda depth, trials, seed: measure_suite(min(trials, 50), seed),
}


def run_suites(name: str, depth: int, trials: int, seed: int) -> list[SuiteReport]:
    names = list(SUITES) if name == "all" else [name]
    return [SUITES[n](depth, trials, seed) for n in names]
