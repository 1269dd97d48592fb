from __future__ import annotations

import pytest

from toroidal_pls.cli import _fixture_texts, main
from toroidal_pls.exactla import Subspace
from toroidal_pls.isofy import SubSheaf
from toroidal_pls.report import format_report, parse_report
from toroidal_pls.sheafcore import parse_objects


def run(capsys, *argv, **hooks):
    code = main(list(argv), **hooks)
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, text):
    f = tmp_path / name
    f.write_text(text)
    return str(f)


@pytest.mark.parametrize("name", sorted(_fixture_texts()))
def test_every_fixture_runs(capsys, name):
    cmd = "isofy" if name.endswith("bisheaf") or name.startswith(("torsion", "schwarz")) else "analyze"
    code, out, _ = run(capsys, cmd, f"fixture:{name}")
    assert code == 0
    assert parse_report(out).command == cmd


def test_running_report(capsys):
    code, out, _ = run(capsys, "analyze", "fixture:running")
    assert code == 0
    sec = parse_report(out).find("direction", index="1")[0]
    assert sec.get("pls-rank") == "1"
    assert sec.get("eigenspace-dim") == "1"
    assert sec.get("lifted-cycles") == "1"
    assert sec.get("cycle-pls") == "1"


def test_torsion_k_fold(capsys):
    code, out, _ = run(capsys, "analyze", "fixture:torsion", "--k-fold", "1,2")
    assert code == 0
    sec = parse_report(out).find("block", degree="2")[0]
    assert sec.get("power-ranks") == "1:1 2:2"
    assert sec.get("cover-ranks") == "1:1 2:2"
    assert sec.get("order") == "2"


def test_empty_complex_report_is_all_zero(capsys):
    code, out, _ = run(capsys, "analyze", "fixture:empty")
    assert code == 0
    r = parse_report(out)
    assert r.header.get("homology-rank") == "0"
    sec = r.find("direction", index="1")[0]
    assert set(sec.get("pls-stalks").split()) == {"0"}
    assert sec.get("lifted-cycles") == "0"


@pytest.mark.parametrize("argv", [
    ("analyze", "fixture:running", "--seed", "5"),
    ("analyze", "fixture:torus", "--degree", "2", "--k-fold", "1,2"),
    ("isofy", "fixture:running-bisheaf", "--seed", "3"),
    ("oracle", "--count", "15", "--seed", "9"),
])
def test_reruns_are_byte_identical(capsys, argv):
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second
    assert format_report(parse_report(first[1])) == first[1]


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "analyze", "fixture:nope")[0] == 2
    assert run(capsys, "analyze", str(tmp_path / "missing.txt"))[0] == 2
    assert run(capsys, "analyze", "fixture:running", "--degree", "0")[0] == 2
    assert run(capsys, "analyze", "fixture:running", "--direction", "2")[0] == 2
    assert run(capsys, "analyze", "fixture:running", "--field", "3")[0] == 0
    assert run(capsys, "isofy", "fixture:running")[0] == 2
    torus = write(tmp_path, "t.txt", "format: simplicial\nfield 2\nperiodic-dims 2\nvertex 0 0 0\n"
                                     "vertex 1 1/2 1/2\nsimplex 0@0,0 1@0,0\n")
    code, out, _ = run(capsys, "analyze", torus)
    assert code == 3
    assert parse_report(out).find("direction", index="1")[0].get("status") == "unsupported"
    assert run(capsys, "oracle", "--count", "1", "--max-vertices", "6")[0] == 4
    assert run(capsys, "analyze", "fixture:torsion", "--oracle")[0] == 4


def test_parse_error_location(capsys, tmp_path):
    bad = write(tmp_path, "bad.txt", "format: cubical\nfield 2\nextent 2 2\nperiodic 1 x\n")
    code, _, err = run(capsys, "analyze", bad)
    assert code == 2
    assert "line 4" in err


def test_corrupted_algorithm_is_caught(capsys):
    def lazy(s):
        return SubSheaf(s, [Subspace.full(d, s.p) for d in s.stalk_dims])

    code, out, _ = run(capsys, "oracle", "--count", "30", "--seed", "1", epify_impl=lazy)
    assert code == 1
    sec = parse_report(out).find("summary")[0]
    assert sec.get("result") == "fail"
    assert sec.get("sheaf-mismatches") != "none"
    code, out, _ = run(capsys, "oracle", "--count", "30", "--seed", "1")
    assert code == 0


def test_isofy_objects_round_trip(capsys, tmp_path):
    dest = tmp_path / "iso.txt"
    code, out, _ = run(capsys, "isofy", "fixture:running-bisheaf", "--objects", str(dest))
    assert code == 0
    sec = parse_report(out).find("block")[0]
    assert sec.get("unchanged") == "yes"
    assert sec.get("monocosheaf-stalks") == " ".join(["1"] * 8)
    kind, p, base, objs = parse_objects(dest.read_text())
    assert kind == "bisheaf" and len(objs) == 1
    assert list(objs[0][1].cosheaf.stalk_dims) == [1] * 8


def test_fixture_command_and_out(capsys, tmp_path):
    code, out, _ = run(capsys, "fixture", "torus")
    assert code == 0 and out.startswith("format: cubical")
    dest = tmp_path / "r.txt"
    assert run(capsys, "analyze", "fixture:ring", "--out", str(dest))[0] == 0
    assert parse_report(dest.read_text()).find("direction", index="1")[0].get("pls-identity-maps") == "yes"


def test_oracle_small_and_vacuous_runs(capsys):
    code, out, _ = run(capsys, "oracle", "--count", "10")
    assert code == 0
    assert parse_report(out).find("summary")[0].get("sheaf-agree") == "10/10"
    code, out, _ = run(capsys, "oracle", "--count", "0")
    assert code == 0
    assert parse_report(out).find("summary")[0].get("result") == "pass"
