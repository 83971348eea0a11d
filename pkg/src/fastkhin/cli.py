"""Command-line front end.

    fastkhin expand --rational 5/7
    fastkhin dimension --method theorem11 --psi geometric:3
    fastkhin verify --suite identities --depth 200 --trials 1000 --seed 7

Output is JSON (one object per line) or CSV with a header row. Exit status:
0 success, 2 domain error, 3 resource error, 4 diagnostic failure, 64 usage.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import random
import sys
from fractions import Fraction
from typing import Callable, Optional

from . import cfrac, constructors, dimension, growth, measures, verify
from .certified import CertifiedReal, FloorExp, Power, as_fraction
from .errors import DiagnosticFailure, DomainError, ResourceError

DEFAULT_SEED = 20120101
EXIT_DOMAIN, EXIT_RESOURCE, EXIT_DIAGNOSTIC, EXIT_USAGE = 2, 3, 4, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- value parsing and serialization -----------------------------------------


def parse_word(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    if text.startswith("["):
        return cfrac.as_word(json.loads(text))
    return cfrac.as_word(tok for tok in text.split(",") if tok.strip())


def parse_s_seq(text: str, psi: Optional[growth.GrowthFunction], length: int):
    """``doubly_exponential``, ``from_psi``, ``const:5`` or ``list:1,2,3``."""
    kind, _, rest = text.partition(":")
    if kind == "doubly_exponential":
        return lambda k: Power(2, 2**k)
    if kind == "from_psi":
        if psi is None:
            raise DomainError("--s-seq from_psi needs --psi")
        return constructors.lower_bound_sequence(psi, length, lazy=True)
    if kind == "const":
        c = int(rest)
        return lambda k: c
    if kind == "list":
        return [int(x) for x in rest.split(",")]
    raise DomainError(f"unknown s-sequence {text!r}")


def _jsonable(x):
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, Fraction):
        return cfrac.serialize_fraction(x)
    if isinstance(x, int):
        return x if abs(x) < 2**53 else str(x)
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, CertifiedReal):
        return x.to_json()
    if isinstance(x, (FloorExp, Power)):
        return str(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return str(x)


def render(records: list[dict], fmt: str) -> str:
    if fmt == "json":
        return "".join(json.dumps(_jsonable(r)) + "\n" for r in records)
    buf = io.StringIO()
    fields: list[str] = []
    for r in records:
        fields += [k for k in r if k not in fields]
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in records:
        w.writerow({k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in _jsonable(r).items()})
    return buf.getvalue()


# -- handlers ---------------------------------------------------------------
# Each returns (records, ok); ok=False means exit status 4.


def _psi(args) -> growth.GrowthFunction:
    if not args.psi:
        raise DomainError("--psi is required")
    return growth.parse_psi(args.psi)


def _tol(args) -> Fraction:
    return Fraction(1, 1 << args.precision_bits)


def cmd_expand(args):
    if args.rational is not None:
        q = cfrac.gauss_expand(as_fraction(args.rational), args.max_n)
    elif args.certified is not None:
        x = CertifiedReal(as_fraction(args.certified), as_fraction(args.radius))
        q = cfrac.gauss_expand(x, args.max_n)
    else:
        raise DomainError("give --rational or --certified")
    return [{"quotients": cfrac.serialize_word(q)}], True


def cmd_evaluate(args):
    return [{"value": cfrac.evaluate(parse_word(args.word))}], True


def cmd_convergents(args):
    rows = [
        {"n": s.n, "p": str(s.p_cur), "q": str(s.q_cur), "determinant": s.determinant()}
        for s in cfrac.convergents(parse_word(args.word))
    ]
    return rows, True


def cmd_cylinder(args):
    word = parse_word(args.word)
    c = cfrac.cylinder(word)
    rec = {"word": cfrac.serialize_word(word), "left": c.left, "right": c.right, "diameter": c.diameter}
    if args.a_min is not None:
        rec["a_min"] = args.a_min
        rec["tail_union_diameter"] = cfrac.tail_union_diameter(word, args.a_min)
    return [rec], True


def cmd_construct(args):
    psi = growth.parse_psi(args.psi) if args.psi else None
    if args.kind == "point":
        word = constructors.point_in_E(_psi(args), args.n, lazy=args.lazy)
    else:
        s = parse_s_seq(args.s_seq, psi, args.n)
        word = constructors.f_set_sampler(s, args.ell, args.n, args.seed)
    if psi is None:
        return [{"n": i + 1, "a_n": str(a)} for i, a in enumerate(word)], True
    return [json.loads(line) for line in constructors.ratio_trace_lines(word, psi)], True


def cmd_ratio(args):
    word = parse_word(args.word)
    if args.beta is not None:
        return [{"beta": str(as_fraction(args.beta)), "indices": constructors.jarnik_check(word, args.beta)}], True
    psi = _psi(args)
    n = args.n or len(word)
    if args.epsilon is not None:
        m = constructors.dn_membership(word, psi, args.epsilon, n)
        return [{"n": n, "epsilon": m.epsilon, "holds": m.holds, "ratio": m.ratio}], True
    r = constructors.khintchine_ratio(word, psi, n, tol=_tol(args))
    return [{"n": n, "log_sum": r.log_sum, "ratio": r.ratio}], True


def cmd_measure(args):
    t = as_fraction(args.t) if args.t is not None else None
    what = args.what
    if what == "pressure":
        p = measures.pressure(t, _tol(args))
        return [{"t": t, "pressure": p}], True
    word = parse_word(args.word or "")
    if what == "mu":
        lg = measures.log_mu(t, word, _tol(args))
        return [{"t": t, "word": cfrac.serialize_word(word), "log_mu": repr(float(lg.value)),
                 "err": repr(float(lg.radius))}], True
    if what == "consistency":
        r = measures.consistency_check(t, word, args.alphabet_cap)
        return [{"t": t, "word": cfrac.serialize_word(word), "lower": r.lower, "upper": r.upper,
                 "parent": r.parent, "gap": repr(float(r.gap)), "holds": r.contains}], r.contains
    r = measures.inequality4_check(args.epsilon, word, _psi(args), t=t)
    rec = {"word_length": len(word), **r.to_json()}
    return [rec], r.holds is not False


def cmd_threshold(args):
    n = measures.n_epsilon_threshold(_psi(args), args.epsilon, args.horizon)
    return [{"psi": args.psi, "epsilon": as_fraction(args.epsilon), "horizon": args.horizon, "N": n}], n is not None


def cmd_diagnose(args):
    psi = _psi(args)
    if args.check == "limsup":
        starts = [int(x) for x in args.tail_starts.split(",")] if args.tail_starts else None
        d = growth.limsup_ratio(psi, args.horizon, starts)
        rec = {"horizon": d.horizon, "tail_starts": d.tail_starts, "window_maxima": d.window_maxima,
               "b_hat": "inf" if d.divergence_flag else d.b_hat, "divergence_flag": d.divergence_flag,
               "heuristic": True}
        return [rec], True
    if args.check == "superlinear":
        r = growth.superlinearity_check(psi, args.horizon)
        return [{"horizon": r.horizon, "last_half_min": r.last_half_min, "passed": r.passed,
                 "heuristic": True}], r.passed
    r = growth.increasing_equivalence_check(psi, args.horizon, args.tolerance)
    return [{"horizon": r.horizon, "sup_deviation": r.sup_deviation, "worst_n": r.worst_n,
             "passed": r.passed, "heuristic": True}], r.passed


def _box_points(args):
    if args.generator == "cantor":
        return dimension.cantor_points(args.depth)
    rng = random.Random(args.seed)
    if args.generator == "uniform":
        return [Fraction(rng.getrandbits(53), 1 << 53) for _ in range(args.samples)]
    s = parse_s_seq(args.s_seq, None, args.depth)
    return [cfrac.evaluate(constructors.f_set_sampler(s, args.ell, args.depth, rng.getrandbits(64)))
            for _ in range(args.samples)]


def cmd_dimension(args):
    m = args.method
    if m == "theorem11":
        est = dimension.fast_khintchine_dimension(_psi(args), args.horizon)
        rec = {"value": est.value_str(), "method": est.method, "horizon": est.horizon,
               "flags": est.flags, "diagnostics": est.diagnostics}
        return [rec], not ({"empty_set", "not_superlinear"} & set(est.flags))
    if m == "lemma31":
        psi = growth.parse_psi(args.psi) if args.psi else None
        s = parse_s_seq(args.s_seq, psi, args.horizon + 1)
        est = dimension.lemma31_dimension(s, args.horizon)
        return [{"value": est.value_str(), "method": est.method, "horizon": est.horizon}], True
    if m == "jarnik":
        j, js = dimension.jarnik_bounds(as_fraction(args.beta))
        return [{"method": "jarnik", "beta": as_fraction(args.beta), "upper_J": j, "value_J_star": js}], True
    if m == "beta":
        be = dimension.beta_exponent(as_fraction(args.b), as_fraction(args.epsilon))
        return [{"method": "beta", "b": be.b, "epsilon": be.epsilon, "beta": be.beta,
                 "positive": be.positive, "upper_bound": be.upper_bound}], True
    if m == "covering":
        psi = growth.parse_psi(args.psi) if args.psi else None
        s = parse_s_seq(args.s_seq, psi, args.depth + 1)
        tr = dimension.covering_sum_trace(s, args.ell, as_fraction(args.s_exponent), args.depth)
        return [{"level": lv.n, "lower": repr(lv.lower), "upper": repr(lv.upper),
                 "log_count": repr(lv.log_count)} for lv in tr.levels], True
    est = dimension.box_counting(_box_points(args), range(args.min_scale, args.max_scale + 1))
    rows = [{"scale": k, "count": c} for k, c in zip(est.diagnostics["scales"], est.diagnostics["counts"])]
    rows.append({"method": "box_counting", "value": est.value_str(), "residual": repr(est.diagnostics["residual"])})
    return rows, True


def cmd_verify(args):
    reports = verify.run_suites(args.suite, args.depth, args.trials, args.seed)
    return [r.to_json() for r in reports], all(r.passed for r in reports)


#: subcommand -> (handler, library operations reachable through it)
COMMANDS: dict[str, tuple[Callable, tuple[str, ...]]] = {
    "expand": (cmd_expand, ("cfrac.gauss_expand",)),
    "evaluate": (cmd_evaluate, ("cfrac.evaluate",)),
    "convergents": (cmd_convergents, ("cfrac.convergents",)),
    "cylinder": (cmd_cylinder, ("cfrac.cylinder", "cfrac.tail_union_diameter")),
    "construct": (cmd_construct, ("constructors.point_in_E", "constructors.f_set_sampler")),
    "ratio": (cmd_ratio, ("constructors.khintchine_ratio", "constructors.dn_membership",
                          "constructors.jarnik_check")),
    "measure": (cmd_measure, ("measures.pressure", "measures.log_mu", "measures.consistency_check",
                              "measures.inequality4_check")),
    "threshold": (cmd_threshold, ("measures.n_epsilon_threshold",)),
    "diagnose": (cmd_diagnose, ("growth.limsup_ratio", "growth.superlinearity_check",
                                "growth.increasing_equivalence_check")),
    "dimension": (cmd_dimension, ("dimension.lemma31_dimension", "dimension.fast_khintchine_dimension",
                                  "dimension.jarnik_bounds", "dimension.beta_exponent",
                                  "dimension.covering_sum_trace", "dimension.box_counting")),
    "verify": (cmd_verify, ("verify.run_suites",)),
}


def build_parser(defaults: Optional[dict] = None) -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key = value file; explicit flags win")
    common.add_argument("--psi", help="growth function kind:params, e.g. polynomial:2")
    common.add_argument("--horizon", type=int, default=1000)
    common.add_argument("--epsilon", type=str)
    common.add_argument("--t", type=str)
    common.add_argument("--beta", type=str)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--precision-bits", type=int, default=64)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="output path (default stdout)")

    parser = _Parser(prog="fastkhin", description="Continued fractions and fast Khintchine spectra.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        return p

    p = add("expand", "Gauss-map expansion of a rational or certified real")
    p.add_argument("--rational")
    p.add_argument("--certified")
    p.add_argument("--radius", default="0")
    p.add_argument("--max-n", type=int, default=50)

    p = add("evaluate", "value of a finite continued fraction")
    p.add_argument("--word", required=True)

    p = add("convergents", "p_n, q_n for every prefix")
    p.add_argument("--word", required=True)

    p = add("cylinder", "cylinder endpoints and diameter")
    p.add_argument("--word", required=True)
    p.add_argument("--a-min", type=int)

    p = add("construct", "points of E(psi) or samples of F({s_n}; ell)")
    p.add_argument("--kind", choices=("point", "f-sample"), default="point")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--lazy", action="store_true")
    p.add_argument("--s-seq", default="from_psi")
    p.add_argument("--ell", type=int, default=2)

    p = add("ratio", "Khintchine ratio, D_n membership (--epsilon) or Jarnik indices (--beta)")
    p.add_argument("--word", required=True)
    p.add_argument("--n", type=int)

    p = add("measure", "pressure, Bernoulli measures and their checks")
    p.add_argument("--what", choices=("pressure", "mu", "consistency", "inequality4"), default="pressure")
    p.add_argument("--word")
    p.add_argument("--alphabet-cap", type=int, default=1000)

    add("threshold", "least N(eps) for the pressure inequality")

    p = add("diagnose", "finite-horizon diagnostics of psi")
    p.add_argument("--check", choices=("limsup", "superlinear", "equivalence"), default="limsup")
    p.add_argument("--tail-starts")
    p.add_argument("--tolerance", default="1/100")

    p = add("dimension", "dimension formulas and estimators")
    p.add_argument("--method", choices=("theorem11", "lemma31", "jarnik", "beta", "covering", "box"),
                   default="theorem11")
    p.add_argument("--s-seq", default="from_psi")
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--b")
    p.add_argument("--s-exponent")
    p.add_argument("--depth", type=int, default=20)
    p.add_argument("--generator", choices=("cantor", "uniform", "f-family"), default="cantor")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--min-scale", type=int, default=2)
    p.add_argument("--max-scale", type=int, default=14)

    p = add("verify", "randomized identity and inequality checks")
    p.add_argument("--suite", choices=("identities", "roundtrip", "tail", "measures", "all"), default="all")
    p.add_argument("--depth", type=int, default=200)
    p.add_argument("--trials", type=int, default=1000)

    if defaults:
        for sp in sub.choices.values():
            known = {a.dest for a in sp._actions}
            sp.set_defaults(**{k: v for k, v in defaults.items() if k in known})
    return parser


def load_config(path: str) -> dict:
    """Read ``key = value`` lines. ``kind`` plus preset keys assemble --psi."""
    cp = configparser.ConfigParser()
    with open(path) as fh:
        cp.read_string("[run]\n" + fh.read())
    raw = {k.replace("-", "_"): v for k, v in cp["run"].items()}
    kind = raw.pop("kind", None)
    if kind is not None:
        params = [f"{k}={raw.pop(k)}" for k in ("gamma", "base", "c") if k in raw]
        if "path" in raw:
            params = [raw.pop("path")]
        raw["psi"] = kind + (":" + ",".join(params) if params else "")
    out = {}
    for k, v in raw.items():
        out[k] = int(v) if k in {"horizon", "seed", "precision_bits", "n", "depth", "trials", "ell",
                                 "samples", "alphabet_cap", "max_n", "a_min"} else v
    return out


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        pre = argparse.ArgumentParser(add_help=False)
        pre.add_argument("--config")
        known, _ = pre.parse_known_args(argv)
        defaults = load_config(known.config) if known.config else None
        args = build_parser(defaults).parse_args(argv)
    except UsageError as e:
        print(f"fastkhin: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as e:
        print(f"fastkhin: bad config: {e}", file=sys.stderr)
        return EXIT_USAGE

    handler, _ = COMMANDS[args.command]
    try:
        records, ok = handler(args)
    except DomainError as e:
        print(f"fastkhin: domain error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except ResourceError as e:
        print(f"fastkhin: resource error: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except DiagnosticFailure as e:
        print(f"fastkhin: diagnostic failure: {e}", file=sys.stderr)
        return EXIT_DIAGNOSTIC
    except (ValueError, ZeroDivisionError) as e:
        print(f"fastkhin: domain error: {e}", file=sys.stderr)
        return EXIT_DOMAIN

    text = render(records, args.format)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else EXIT_DIAGNOSTIC


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
