from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ewpm.cli import run_cli
from ewpm.errors import BoundsError, ParseError
from ewpm.geometry import PointSetInstance, random_instance
from ewpm.io import (
    format_number,
    format_record,
    instance_hash,
    parse_instance,
    parse_record,
    read_instance,
    save_instance,
    strip_timing,
    write_instance,
)
from ewpm.lowerbound import close_pair, construction1, unroll
from ewpm.verification import gap_scan


def test_minimal_file():
    inst = parse_instance("1 5\nA\n0 0\nB\n3 4\n")
    assert inst.n == 1 and inst.grid_bound == 5
    assert inst.a_points == ((0, 0),) and inst.b_points == ((3, 4),)


def test_comments_and_signed_box():
    inst = parse_instance("# made by hand\n1 box 0 -3 2 1\nA\n0 -3\n# between\nB\n2 1\n")
    assert inst.signed_box == (0, -3, 2, 1)
    assert write_instance(inst) == "1 box 0 -3 2 1\nA\n0 -3\nB\n2 1\n"


@pytest.mark.parametrize("text, line, column", [
    ("2 5\nA\n0 0\nB\n3 4\n", 4, 1),
    ("1 5\nA\n0 x\nB\n3 4\n", 3, 3),
    ("1 5\nB\n0 0\nA\n3 4\n", 2, 1),
    ("", 1, 1),
    ("1 5\nA\n0 0\nB\n3 4\n1 1\n", 6, 1),
])
def test_parse_errors(text, line, column):
    with pytest.raises(ParseError) as exc:
        parse_instance(text)
    assert (exc.value.line, exc.value.column) == (line, column)


def test_bounds_error():
    with pytest.raises(BoundsError) as exc:
        parse_instance("1 5\nA\n6 0\nB\n3 4\n")
    assert "6" in str(exc.value)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 7), st.integers(1, 50), st.integers(0, 2**32 - 1))
def test_round_trip(n, N, seed):
    inst = random_instance(n, N, np.random.default_rng(seed), distinct=False)
    text = write_instance(inst)
    assert parse_instance(text) == inst
    assert write_instance(parse_instance(text)) == text


def test_round_trip_unrolled(tmp_path):
    c = construction1(3)
    inst = unroll(c, close_pair(c)).instance
    path = tmp_path / "c2.txt"
    save_instance(inst, path)
    assert read_instance(path) == inst
    assert path.read_bytes() == write_instance(inst).encode()


def test_format_number():
    assert format_number(Fraction(5, 8)) == "0.625"
    assert format_number(Fraction(-3, 2)) == "-1.5"
    assert format_number(Fraction(7)) == "7"
    assert format_number(Fraction(1, 3)) == "1/3"
    assert format_number(Fraction(1, 2**70)) == "0." + str(5**70).rjust(70, "0")
    assert format_number(True) == "pass" and format_number(None) == "-"


def test_format_number_exact_decimal():
    for x in (Fraction(1, 1024), Fraction(12345, 2**40), Fraction(-7, 2**5)):
        assert Fraction(format_number(x)) == x


def test_record_layout():
    line = format_record({"command": "solve", "matching": "0,1", "extra": 3, "wall_ms": 1.5})
    keys = [p.split("=")[0] for p in line.split("\t")]
    assert keys[:11] == ["command", "instance", "engine", "ell", "K", "matching",
                         "weight_lower", "weight_upper", "pass", "witness", "wall_ms"]
    assert keys[-1] == "extra"
    rec = parse_record(line)
    assert rec["matching"] == "0,1" and rec["engine"] == "-"
    assert "wall_ms" not in strip_timing(line)


def _run(capsys, *argv):
    code = run_cli(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_solve(tmp_path, capsys):
    path = tmp_path / "i.txt"
    path.write_text("1 5\nA\n0 0\nB\n3 4\n")
    code, out, _ = _run(capsys, "solve", "--input", str(path), "--delta", "1/100", "--engine", "hungarian")
    assert code == 0
    rec = parse_record(out.strip())
    assert rec["command"] == "solve" and rec["matching"] == "0" and rec["engine"] == "hungarian"
    assert Fraction(rec["weight_lower"]) <= 5 <= Fraction(rec["weight_upper"])


def test_cli_solve_certify_mvv(tmp_path, capsys):
    path = tmp_path / "i.txt"
    save_instance(PointSetInstance(((0, 0), (1, 3)), ((4, 1), (2, 4)), 4), path)
    code, out, _ = _run(capsys, "solve", "--input", str(path), "--delta", "1/4", "--certify")
    assert code == 0 and parse_record(out)["pass"] == "pass"


def test_cli_verify_gap(capsys):
    code, out, _ = _run(capsys, "verify", "gap", "--grid", "4", "--bits", "128")
    assert code == 0
    rec = parse_record(out.strip())
    rep = gap_scan(4, bits=128)
    assert rec["pass"] == "pass"
    assert Fraction(rec["min_gap_lower"]) == rep.details["min_gap_lower"]
    assert Fraction(rec["min_gap_lower"]) >= Fraction(1, 1024)


def test_cli_gen_c1(tmp_path, capsys):
    path = tmp_path / "c1.txt"
    code, _, _ = _run(capsys, "gen", "c1", "--n", "3", "--out", str(path))
    assert code == 0
    assert path.read_text() == write_instance(construction1(3).instance)
    assert path.read_text().splitlines()[:5] == ["3 81", "A", "0 0", "0 1", "0 2"]


def test_cli_gen_c2_and_verify(tmp_path, capsys):
    path = tmp_path / "c2.txt"
    assert _run(capsys, "gen", "c2", "--n", "2", "--out", str(path))[0] == 0
    assert read_instance(path).signed_box is not None
    code, out, _ = _run(capsys, "verify", "theorem1", "--n", "3")
    assert code == 0 and parse_record(out)["pass"] == "pass"
    code, out, _ = _run(capsys, "verify", "distinct", "--n", "3")
    assert code == 0 and parse_record(out)["instance"] == instance_hash(construction1(3).instance)


def test_cli_verify_isolation_exit_codes(tmp_path, capsys):
    # a unit square: the two matchings tie in length but W_TV separates them
    path = tmp_path / "sq.txt"
    save_instance(PointSetInstance(((0, 0), (1, 1)), ((1, 0), (0, 1)), 1), path)
    for check in ("isolation", "planarity", "wtv"):
        code, out, _ = _run(capsys, "verify", check, "--input", str(path), "--ell", "1")
        assert code == 0 and parse_record(out)["pass"] == "pass"
    # two B points stacked on one spot: every weight scheme ties
    path = tmp_path / "tie.txt"
    save_instance(PointSetInstance(((0, 0), (2, 0)), ((1, 0), (1, 0)), 2), path)
    code, out, _ = _run(capsys, "verify", "isolation", "--input", str(path))
    rec = parse_record(out)
    assert code == 1 and rec["pass"] == "fail" and rec["witness"] == "0,1|1,0"


@pytest.mark.parametrize("argv", [
    ["solve", "--input", "x", "--delta", "0.01"],
    ["solve"],
    ["frobnicate"],
    ["verify", "gap"],
    ["solve", "--input", "/nonexistent/file"],
    ["gen", "c1", "--n", "1"],
])
def test_cli_usage_errors(argv, capsys):
    assert run_cli(argv) == 2


def test_cli_parse_error_exit(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("2 5\nA\n0 0\nB\n3 4\n")
    code, _, err = _run(capsys, "solve", "--input", str(path))
    assert code == 2 and "line 4" in err


def test_cli_feasibility_exit(tmp_path, capsys):
    path = tmp_path / "col.txt"
    save_instance(PointSetInstance(((0, 0), (0, 1)), ((0, 2), (3, 3)), 4), path)
    code, _, err = _run(capsys, "solve", "--input", str(path), "--delta", "1/10", "--engine", "mvv")
    assert code == 3 and "bits" in err
    code, _, _ = _run(capsys, "gen", "c1", "--n", "9")
    assert code == 3


def test_cli_determinism(tmp_path, capsys):
    path = tmp_path / "i.txt"
    save_instance(random_instance(4, 16, np.random.default_rng(3)), path)
    outs = []
    for threads in ("1", "2", "0"):
        code, out, _ = _run(capsys, "solve", "--input", str(path), "--engine", "brute",
                            "--threads", threads, "--certify")
        assert code == 0
        outs.append(strip_timing(out))
    assert outs[0] == outs[1] == outs[2]


def test_cli_bench(capsys):
    code, out, _ = _run(capsys, "bench", "equivalence", "--count", "5", "--seed", "2")
    assert code == 0 and len(out.strip().splitlines()) == 5
