import json
import subprocess
import sys

import pytest

from sosbench import fixtures
from sosbench.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_ready_trace_priority(capsys):
    code, out, _ = run(capsys, "check", "--format", "ready-trace", "fixtures/priority.tss")
    assert code == 0 and out.startswith("ready-trace: yes")


def test_check_readiness_priority(capsys):
    code, out, _ = run(capsys, "check", "--format", "readiness", "fixtures/priority.tss")
    assert code == 1
    assert "pri[v=c]: propagated-and-polled" in out


def test_decompose_example(capsys):
    code, out, _ = run(capsys, "decompose", "--term", "f(f(x))", "--formula", "<b><a>tt",
                       "fixtures/inverse.tss")
    assert code == 0 and out.strip() == "x := <b><b>tt"


def test_check_accepts_real_path(capsys, tmp_path):
    f = tmp_path / "p.tss"
    f.write_text(fixtures.text("priority"))
    assert run(capsys, "check", "--format", "ready-trace", str(f))[0] == 0


def test_json_output(capsys):
    code, out, _ = run(capsys, "check", "--format", "readiness", "priority", "--out", "json")
    data = json.loads(out)
    assert code == 1 and data["verdict"] is False and data["violations"]


def test_compare(capsys):
    args = ("compare", "ex2", "--notion", "RT", "--depth", "4")
    assert run(capsys, *args, "--left", "a.(b.c+b.d)", "--right", "a.b.c+a.b.d")[0] == 0
    assert run(capsys, *args, "--left", "f(a.(b.c+b.d))", "--right", "f(a.b.c+a.b.d)")[0] == 1


def test_sat(capsys):
    code, out, _ = run(capsys, "sat", "bpa", "--term", "(a+b).c", "--formula", "<a>tt")
    assert code == 0 and out.strip() == "yes"
    code, out, _ = run(capsys, "sat", "bpa", "--term", "(a+b).c", "--formula", "<c>tt", "--out", "json")
    assert code == 1 and json.loads(out)["satisfied"] is False


def test_lts_and_ruloids(capsys):
    code, out, _ = run(capsys, "lts", "bpa", "--root", "a.b", "--depth", "3")
    assert code == 0 and "a.b -a-> eps.b" in out
    code, out, _ = run(capsys, "ruloids", "inverse", "--term", "f(f(x))", "--action", "b")
    assert code == 0 and len(out.strip().splitlines()) == 1


def test_transform_and_conservative(capsys):
    assert run(capsys, "transform", "bpa", "--stage", "rplus")[0] == 0
    assert run(capsys, "conservative", "bpa", "priority", "--syntactic")[0] == 0
    assert run(capsys, "conservative", "bpa", "priority", "--semantic", "--depth", "3")[0] == 0


def test_fuzz(capsys):
    code, out, _ = run(capsys, "fuzz-precongruence", "priority", "--notion", "T", "--seed", "31")
    assert code == 1 and "context" in out


def test_fixtures_commands(capsys):
    code, out, _ = run(capsys, "fixtures", "list")
    assert code == 0 and "priority" in out.split()
    code, out, _ = run(capsys, "fixtures", "show", "inverse")
    assert code == 0 and "rule fb" in out
    code, out, _ = run(capsys, "fixtures", "run", "--criterion", "3")
    assert code == 0 and out.startswith("[PASS] criterion 3")


def test_deterministic_output(capsys):
    argv = ("transform", "priority", "--stage", "rplus", "--out", "json")
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


@pytest.mark.parametrize("argv", [
    ("check", "--format", "no-such-format", "priority"),
    ("check", "--format", "ready-trace", "missing.tss"),
    ("sat", "bpa", "--term", "(a+", "--formula", "tt"),
    ("sat", "bpa", "--term", "a", "--formula", "<a"),
    ("fixtures", "show", "nope"),
    ("fixtures", "run", "--criterion", "9"),
    (),
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "sosbench.cli", "check", "--format", "ready-trace",
                        "priority"], capture_output=True, text=True)
    assert p.returncode == 0 and "yes" in p.stdout
