"""Command-line behavior: exit codes, determinism, dot and figure output.

Determinism is checked across separate processes, not just repeated
calls, so ordering that leans on hash iteration would be caught here.
"""

import json
import os
import subprocess
import sys

import pytest

from nct import cli
from nct.model import parse_model

FIXDIR = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def fix(name):
    return os.path.join(FIXDIR, name)


def run_cli(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def run_proc(args):
    return subprocess.run([sys.executable, "-m", "nct.cli"] + args,
                          capture_output=True, text=True)


def test_reports_are_byte_identical_across_processes():
    jobs = [["check", fix("m3.nct")],
            ["moment", fix("dyn_collapse.nct"), "--at", "t0"],
            ["spectralfam", fix("sf_b2.nct")],
            ["theorem34", fix("dyn_collapse.nct"), "--at", "t1"]]
    for args in jobs:
        a, b = run_proc(args), run_proc(args)
        assert a.stdout == b.stdout and a.stdout, args
        assert a.returncode == b.returncode


def test_validation_exit_codes(capsys):
    code, out, _ = run_cli(["check", fix("ch3.nct")], capsys)
    assert code == 0 and json.loads(out)["command"] == "check"
    # the diamond passes the core axioms but fails the cover axiom
    code, _, _ = run_cli(["check", fix("m3.nct")], capsys)
    assert code == 0
    code, out, _ = run_cli(["check", fix("m3.nct"), "--strict"], capsys)
    assert code == 1
    block = json.loads(out)["M3"]
    assert block["valid"] is False
    axioms = dict((k, v) for k, v in block["axioms"]["axioms"])
    assert axioms["v"]["holds"] is False
    assert axioms["v"]["witness"] == ["v", 3, [1, 2]]


def test_failure_reports_still_carry_witnesses(capsys):
    code, out, _ = run_cli(["separated", fix("psh_b2_ns.nct")], capsys)
    assert code == 1
    assert json.loads(out)["PSH_B2_NS"]["separated"]["witness"]
    code, out, _ = run_cli(["theorem34", fix("dyn_blocked.nct"),
                            "--at", "t1"], capsys)
    assert code == 1
    assert json.loads(out)["DPSH_BLOCKED"]["precondition_failed"]


def test_malformed_input_exits_two(capsys):
    code, _, err = run_cli(["check", fix("nope.nct")], capsys)
    assert code == 2 and "error" in err
    # a document without a system cannot answer a dynamics question
    code, _, err = run_cli(["stalks", fix("m3.nct")], capsys)
    assert code == 2
    code, _, err = run_cli(["observe", fix("dyn_const.nct"),
                            "--predicate", "no-such-statement"], capsys)
    assert code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate", fix("m3.nct")])
    assert exc.value.code == 2
    capsys.readouterr()

def test_syntax_errors_carry_the_line_number(capsys):
    bad = os.path.join(FIXDIR, "..", "test_bad_tmp.nct")
    with open(bad, "w") as fh:
        fh.write("poset P {\n  elements: 0 1\n  order: 0-1\n}\n")
    try:
        code, _, err = run_cli(["check", bad], capsys)
        assert code == 2
        assert "line 3" in err
    finally:
        os.unlink(bad)


def test_dot_output_only_where_a_graph_exists(capsys):
    code, out, _ = run_cli(["check", fix("m3.nct"), "--format", "dot"],
                           capsys)
    assert code == 0 and out.startswith("digraph")
    code, _, err = run_cli(["observable", fix("sf_ch.nct"),
                            "--format", "dot"], capsys)
    assert code == 2 and "no dot rendering" in err


def test_figures_are_written_and_listed(tmp_path, capsys):
    figdir = str(tmp_path / "figs")
    code, out, _ = run_cli(["spectralfam", fix("sf_b2.nct"),
                            "--figures", figdir], capsys)
    assert code == 0
    listed = json.loads(out)["figures"]
    assert listed
    for path in listed:
        assert os.path.dirname(path) == figdir
        assert os.path.getsize(path) > 0
    # the payload is stable when rendering figures to the same directory
    code, out2, _ = run_cli(["spectralfam", fix("sf_b2.nct"),
                             "--figures", figdir], capsys)
    assert out2 == out


def test_export_text_is_the_canonical_serialization(capsys):
    text = open(fix("dyn_collapse.nct")).read()
    code, out, _ = run_cli(["export", fix("dyn_collapse.nct"),
                            "--format", "text"], capsys)
    assert code == 0 and out == text


def test_named_block_selection(capsys):
    code, out, _ = run_cli(["check", fix("dyn_const.nct"), "--name", "M3"],
                           capsys)
    assert code == 0
    keys = set(json.loads(out)) - {"schema", "command"}
    assert keys == {"M3"}
    code, _, err = run_cli(["check", fix("dyn_const.nct"),
                            "--name", "ZZZ"], capsys)
    assert code == 2


def test_instant_accepts_label_or_index(capsys):
    a = run_cli(["moment", fix("dyn_collapse.nct"), "--at", "t0"], capsys)
    b = run_cli(["moment", fix("dyn_collapse.nct"), "--at", "0"], capsys)
    assert a == b and a[0] == 0


def test_every_command_answers_on_some_shipped_fixture(capsys):
    smoke = [("check", "m3.nct"), ("shadow", "nc4.nct"),
             ("complete", "ch3.nct"), ("spectrum", "b2.nct"),
             ("dnt", "dyn_collapse.nct"), ("observe", "dyn_const.nct"),
             ("moment", "dyn_const.nct"), ("stalks", "psh_proj.nct"),
             ("separated", "psh_proj.nct"), ("sheafify", "dyn_collapse.nct"),
             ("ltf", "dyn_collapse.nct"), ("theorem34", "dyn_collapse.nct"),
             ("spectralfam", "sf_ch.nct"), ("observable", "sf_m3.nct"),
             ("hilbert", "hilb_diag.nct"), ("export", "sf_b2.nct")]
    assert sorted(c for c, _ in smoke) == sorted(cli.COMMANDS)
    for command, doc in smoke:
        code, out, err = run_cli([command, doc if os.sep in doc else fix(doc)],
                                 capsys)
        assert code in (0, 1), (command, err)
        assert json.loads(out)["command"] == command
