import subprocess
import sys

import pytest

from submp.cli import main
from submp.fileio import parse_result

STAR = """\
n: 4
names: c s1 s2 s3
terminals: s1 s2 s3
function: graph_cut
edge: c s1 1
edge: c s2 1
edge: c s3 1
"""
ASYM = "n: 2\nterminals: 0 1\nfunction: table\nvalues: 0 1 2 0\n"


@pytest.fixture
def files(tmp_path):
    (tmp_path / "star.txt").write_text(STAR)
    (tmp_path / "asym.txt").write_text(ASYM)
    (tmp_path / "mc.txt").write_text("n: 2\nterminals: 0 1\nfunction: hypergraph_mc\nhyperedge: 1 0 1\n")
    (tmp_path / "nw.txt").write_text(
        "n: 3\nterminals: 0 2\nfunction: node_weighted\nweights: 0 5 0\nedge: 0 1\nedge: 1 2\n"
    )
    return tmp_path


def run(*argv):
    return main([str(a) for a in argv])


def test_solve_and_verify(files, capsys):
    out = files / "r.txt"
    assert run("solve", files / "star.txt", "--out", out, "--trace", files / "t.csv") == 0
    res = parse_result(out.read_text())
    assert res.objective == pytest.approx(4.0, abs=1e-3)
    assert res.allocation.shape == (4, 3)
    assert (files / "t.csv").read_text().startswith("iteration,objective,best\n")
    code = run("verify", files / "star.txt", "--alloc", out, "--delta", "0.5", "1", "--out", files / "v.txt")
    assert code == 0
    v = parse_result((files / "v.txt").read_text())
    names = {n for n, _, _ in v.residuals}
    assert {"main@0.5", "main@1"} <= names
    assert all(ok for _, _, ok in v.residuals)
    main1 = dict((n, r) for n, r, _ in v.residuals)["main@1"]
    assert abs(main1) < 1e-9


def test_verify_failure_exit(files, monkeypatch):
    from submp import cli
    from submp.analysis import VerificationReport

    monkeypatch.setattr(cli, "verify_all", lambda x, d: [VerificationReport("main", 0.0, 1.0, -1.0)])
    assert run("verify", files / "star.txt", "--iters", "10", "--out", files / "v.txt") == 5


def test_round(files):
    out = files / "r.txt"
    assert run("round", files / "star.txt", "--scheme", "half", "--out", out) == 0
    res = parse_result(out.read_text())
    assert res.cost == 4 and res.partition == [2, 0, 1, 2]
    assert run("round", files / "star.txt", "--scheme", "sym", "--out", out) == 0
    assert run("round", files / "star.txt", "--scheme", "sym-isolate", "--out", out) == 0


def test_scheme_mismatch(files):
    assert run("round", files / "asym.txt", "--scheme", "sym") == 4
    assert run("round", files / "asym.txt", "--scheme", "sym-isolate") == 4


def test_exact(files):
    out = files / "e.txt"
    assert run("exact", files / "star.txt", "--out", out) == 0
    assert parse_result(out.read_text()).cost == 4


def test_exact_capability(files):
    big = "n: 20\nterminals: 0 1 2\nfunction: graph_cut\nedge: 0 5 1\n"
    (files / "big.txt").write_text(big)
    assert run("exact", files / "big.txt") == 3


def test_parse_error_code(files):
    (files / "bad.txt").write_text("n: 2\nterminals: 0 0\nfunction: graph_cut\n")
    assert run("solve", files / "bad.txt") == 2


def test_unknown_flag(files):
    assert run("solve", files / "star.txt", "--bogus") == 2
    assert run("frobnicate") == 2


def test_bad_params(files):
    assert run("solve", files / "star.txt", "--iters", "0") == 2


def test_infeasible_alloc(files):
    (files / "x.txt").write_text("0.5 0.5 0.5\n1 0 0\n0 1 0\n0 0 1\n")
    assert run("round", files / "star.txt", "--alloc", files / "x.txt") == 4


def test_codes_distinct():
    from submp import errors

    codes = {
        errors.ParseError("x").exit_code,
        errors.CapabilityError().exit_code,
        errors.FeasibilityError().exit_code,
        errors.VerificationError().exit_code,
    }
    assert len(codes) == 4 and 0 not in codes


def test_gap_and_kway(files):
    out = files / "g.txt"
    assert run("gap", "--count", "3", "--n", "6", "--k", "3", "--seed", "7", "--out", out,
               "--csv", files / "g.csv") == 0
    res = parse_result(out.read_text())
    assert res.ratios["gap_max"] >= 1 - 1e-6
    assert len((files / "g.csv").read_text().splitlines()) == 4
    assert run("kway", files / "star.txt", "--k", "2", "--out", out) == 0
    assert parse_result(out.read_text()).cost == 2


def test_reduce(files, capsys):
    assert run("reduce", files / "nw.txt") == 0
    text = capsys.readouterr().out
    assert "function: hypergraph_mc" in text
    assert "hyperedge: 5 0 1 2" in text
    assert run("reduce", files / "mc.txt", "--out", files / "t.txt") == 0
    from submp import parse_instance

    t = parse_instance(files / "t.txt")
    m = parse_instance(files / "mc.txt")
    assert t.oracle.table.tolist() == m.oracle.table.tolist()
    assert run("reduce", files / "star.txt") == 4


def test_deterministic_output(files):
    out = files / "a.txt"
    for argv in (("solve", files / "star.txt", "--seed", "9"), ("gap", "--count", "2", "--seed", "4")):
        seen = []
        for _ in range(2):
            assert run(*argv, "--out", out) == 0
            seen.append(out.read_bytes())
        assert seen[0] == seen[1]


def test_module_entry(files):
    out = subprocess.run(
        [sys.executable, "-m", "submp", "exact", str(files / "star.txt")], capture_output=True, text=True
    )
    assert out.returncode == 0
    assert "cost: 4" in out.stdout
