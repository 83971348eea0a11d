import importlib
import inspect
import json

import pytest

from fastkhin import cli


def run(capsys, *argv):
    code = cli.run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_expand_json(capsys):
    code, out, _ = run(capsys, "expand", "--rational", "5/7")
    assert code == 0 and json.loads(out) == {"quotients": ["1", "2", "2"]}


def test_dimension_theorem11(capsys):
    code, out, _ = run(capsys, "dimension", "--psi", "geometric:3", "--horizon", "100")
    rec = json.loads(out)
    assert code == 0 and rec["value"] == "1/4" and rec["method"] == "theorem11"


def test_convergents_csv_header(capsys):
    code, out, _ = run(capsys, "convergents", "--word", "1,2,2", "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "n,p,q,determinant" and lines[-1] == "3,5,7,-1"


def test_cylinder_tail(capsys):
    code, out, _ = run(capsys, "cylinder", "--word", "2", "--a-min", "3")
    rec = json.loads(out)
    assert rec["diameter"] == "1/6" and rec["tail_union_diameter"] == "1/14"


def test_exit_codes(capsys):
    assert run(capsys, "expand", "--rational", "3/2")[0] == cli.EXIT_DOMAIN
    assert run(capsys, "construct", "--psi", "geometric:2", "--n", "30")[0] == cli.EXIT_RESOURCE
    assert run(capsys, "frobnicate")[0] == cli.EXIT_USAGE
    assert run(capsys, "expand", "--bogus-flag")[0] == cli.EXIT_USAGE
    assert run(capsys, "diagnose", "--psi", "expression:3*n", "--check", "superlinear")[0] == cli.EXIT_DIAGNOSTIC


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("kind = geometric\nbase = 3\nhorizon = 100\n")
    _, out, _ = run(capsys, "dimension", "--config", str(cfg))
    assert json.loads(out)["value"] == "1/4"
    _, out, _ = run(capsys, "dimension", "--config", str(cfg), "--psi", "geometric:2")
    assert json.loads(out)["value"] == "1/3"


def test_out_files_byte_identical(tmp_path, capsys):
    argv = ["dimension", "--method", "box", "--generator", "f-family", "--s-seq", "doubly_exponential",
            "--depth", "4", "--max-scale", "30", "--format", "csv"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.run(argv + ["--out", str(a)]) == 0
    assert cli.run(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes() and a.stat().st_size > 0


def test_big_integers_are_strings(capsys):
    _, out, _ = run(capsys, "construct", "--psi", "polynomial:2", "--n", "12")
    recs = [json.loads(line) for line in out.splitlines()]
    assert all(isinstance(r["a_n"], str) for r in recs)


def test_dispatch_covers_public_operations():
    """Every public library operation is reachable from exactly one subcommand."""
    public = {
        "cfrac": ["gauss_expand", "evaluate", "convergents", "cylinder", "tail_union_diameter"],
        "constructors": ["point_in_E", "f_set_sampler", "khintchine_ratio", "dn_membership", "jarnik_check"],
        "measures": ["pressure", "log_mu", "consistency_check", "inequality4_check", "n_epsilon_threshold"],
        "growth": ["limsup_ratio", "superlinearity_check", "increasing_equivalence_check"],
        "dimension": ["lemma31_dimension", "fast_khintchine_dimension", "jarnik_bounds", "beta_exponent",
                      "covering_sum_trace", "box_counting"],
        "verify": ["run_suites"],
    }
    mapped = [op for _, ops in cli.COMMANDS.values() for op in ops]
    assert len(mapped) == len(set(mapped))
    for mod, names in public.items():
        m = importlib.import_module(f"fastkhin.{mod}")
        for name in names:
            assert callable(getattr(m, name))
            assert f"{mod}.{name}" in mapped, f"{mod}.{name} has no subcommand"
    for op in mapped:
        mod, name = op.split(".")
        assert callable(getattr(importlib.import_module(f"fastkhin.{mod}"), name))
    parser_cmds = set(cli.build_parser()._subparsers._group_actions[0].choices)
    assert parser_cmds == set(cli.COMMANDS)


@pytest.mark.parametrize("cmd", sorted(cli.COMMANDS))
def test_handlers_are_functions(cmd):
    handler, _ = cli.COMMANDS[cmd]
    assert inspect.isfunction(handler)


def test_verify_subcommand(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "identities", "--depth", "50", "--trials", "50", "--seed", "7")
    assert code == 0 and json.loads(out)["failed"] == 0
