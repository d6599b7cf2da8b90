import json
import os
from pathlib import Path

import pytest

from valtree import dualgraph as DG
from valtree.acceptance import GOLDEN_COMMANDS
from valtree.cli import main

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("name,argv", GOLDEN_COMMANDS)
def test_goldens(capsys, name, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert out == (GOLDEN / f"{name}.out").read_text()


def test_spec_examples(capsys):
    _, out, _ = run(capsys, "invariants", "--branch", "n=2; y=t^3")
    assert "alpha=inf" in out and "m=2" in out and "semigroup 2,3" in out
    _, out, _ = run(capsys, "desing", "--branch", "n=2; y=t^3", "--dot")
    assert all(f"({w})" in out for w in ("2,1", "3,1", "5,2"))
    assert run(capsys, "mult", "--ideal", "x^2, y^3")[1] == "6\n"


def test_exit_codes(capsys):
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "eval", "--poly", "x")[0] == 2
    assert run(capsys, "skp", "--branch", "n=2; y=t^4")[0] == 1
    assert run(capsys, "mult", "--ideal", "x")[0] == 1
    code, _, err = run(capsys, "eval", "--branch", "n=1; y=t", "--poly", "x + ")
    assert code == 1 and "offset 4" in err
    assert run(capsys, "skp", "--branch", "n=1; y=t", "--dot")[0] == 2


def test_json_roundtrips(capsys, tmp_path):
    _, out, _ = run(capsys, "skp", "--branch", "n=3; y=t^4", "--json")
    p = tmp_path / "s.json"
    p.write_text(out)
    _, out2, _ = run(capsys, "skp", "--skp", str(p), "--json")
    assert json.loads(out2) == json.loads(out)
    _, out, _ = run(capsys, "desing-equi", "--branch", "A: n=2; y=t^3",
                    "--branch", "B: n=2; x=t^2+t^4; y=t^3+2*t^5+t^7", "--emit-equi")
    e = tmp_path / "e.json"
    e.write_text(out)
    _, g1, _ = run(capsys, "desing-equi", "--equi", str(e), "--json")
    _, g2, _ = run(capsys, "desing", "--branch", "A: n=2; y=t^3",
                   "--branch", "B: n=2; x=t^2+t^4; y=t^3+2*t^5+t^7", "--json")
    G1, G2 = (DG.graph_from_json(json.loads(g)) for g in (g1, g2))
    assert DG.isomorphic(G1, G2)
    assert DG.graph_from_json(DG.graph_to_json(G2)) == G2
    _, out, _ = run(capsys, "desing", "--branch", "n=2; y=t^3", "--json")
    gfile = tmp_path / "g.json"
    gfile.write_text(out)
    code, out, _ = run(capsys, "classmeasure", "--graph", str(gfile))
    assert code == 0 and "-omega.omega = 6" in out


def test_jobs_do_not_change_output(capsys):
    args = ["classical", "--branch", "n=2; y=t^3", "--branch", "n=3; y=t^5",
            "--branch", "n=4; y=t^6+t^7"]
    assert run(capsys, *args)[1] == run(capsys, *args, "--jobs", "3")[1]


def test_trunc_flag(capsys):
    a = run(capsys, "skp", "--branch", "n=2; y=t^3+t^5", "--trunc", "12")[1]
    b = run(capsys, "skp", "--branch", "n=2; y=t^3+t^5")[1]
    assert a == b
    assert "VALTREE_TRUNC" not in os.environ


def test_selftest_is_byte_stable():
    from valtree.acceptance import run_cli

    argv = ("selftest", "--only", "1,2,3,4,5,6,7,8")
    c1, o1 = run_cli(argv, "11")
    c2, o2 = run_cli(argv, "22")
    assert c1 == c2 == 0 and o1 == o2
    assert o1.decode().endswith("8/8 criteria passed\n")
