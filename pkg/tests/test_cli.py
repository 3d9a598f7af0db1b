import json
import subprocess
import sys
from pathlib import Path

import pytest

from curvetop.cli import main

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        import io
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_mult_cusp(capsys):
    code, out, _ = run(capsys, "mult", "-i", str(DATA / "cusp.json"))
    assert code == 0 and out == "E1:2 E2:3 E3:6\n"


def test_hj_unit(capsys):
    code, out, _ = run(capsys, "hj", "--from", "1,0", "--to", "0,1")
    assert code == 0 and out == "(1,0) (0,1)\n"


def test_hj_with_oracle(capsys):
    code, out, _ = run(capsys, "hj", "--from", "2,1", "--to", "1,2", "--check")
    assert out == "(2,1) (1,1) (1,2)\noracle: agrees\n"


def test_verify_example(capsys):
    code, out, _ = run(capsys, "verify-example")
    assert code == 0
    assert "FAIL" not in out
    for needle in ("-1", "4 6 12 13 26", "E3 E5", "b2 c1 c2 d", "a1 b1"):
        assert needle in out


def test_verify_example_json(capsys):
    code, out, _ = run(capsys, "verify-example", "--format", "json")
    rows = json.loads(out)
    assert code == 0 and all(r["ok"] for r in rows)


def test_resolve_from_stdin(capsys, monkeypatch):
    text = (DATA / "tacnode.json").read_text()
    code, out, _ = run(capsys, "resolve", stdin=text, monkeypatch=monkeypatch)
    doc = json.loads(out)
    assert code == 0
    assert {v["id"]: v.get("self_intersection") for v in doc["vertices"]} == {
        "E1": -2, "E2": -1, "S1": None, "S2": None}


def test_graph_input_file(capsys):
    code, out, _ = run(capsys, "classify", "-i", str(DATA / "reference_graph.json"))
    assert code == 0 and out.startswith("rupture: E3 E5\n")


def test_matrix_json_uses_strings(capsys):
    code, out, _ = run(capsys, "matrix", "--example", "reference", "--format", "json")
    doc = json.loads(out)
    assert doc["determinant"] == "-1" and doc["negative_definite"] is True
    assert doc["ee"][0] == ["-3", "0", "1", "0", "0"]


def test_dot_output(capsys):
    code, out, _ = run(capsys, "resolve", "--example", "reference", "--format", "dot")
    assert out.count("[dir=forward]") == 1


def test_twist_table(capsys):
    code, out, _ = run(capsys, "twist", "--example", "reference", "--chain", "C1",
                       "-p", "2", "-q", "3", "--compare-inner")
    assert code == 0
    assert "b2  ->  c1^2 b2 c1^-2    [equal_syntactic]" in out
    assert "a1  ->  a1    [equal_abelianized]" in out


def test_output_file(capsys, tmp_path):
    target = tmp_path / "out.txt"
    code, out, _ = run(capsys, "mult", "--example", "cusp", "-o", str(target))
    assert code == 0 and out == "" and target.read_text() == "E1:2 E2:3 E3:6\n"


def test_meridians_custom(capsys):
    code, out, _ = run(capsys, "meridians", "--self-intersections=-2,-3")
    assert "(1,0) (0,1) (-1,2) (-3,5)" in out


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest", "--seed", "3", "--count", "20")
    assert code == 0 and "20/20" in out


@pytest.mark.parametrize("argv", [
    ["twist", "--example", "cusp", "--chain", "C1"],
    ["mult", "-i", "/nonexistent/file.json"],
    ["hj", "--from", "1,0", "--to", "3,0"],
    ["resolve", "--example", "nosuch"],
])
def test_data_errors_exit_1(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1 and err


def test_invalid_graph_exit_1(capsys, tmp_path):
    bad = tmp_path / "g.json"
    bad.write_text(json.dumps({"vertices": [
        {"id": "E1", "kind": "exceptional", "self_intersection": -2},
        {"id": "S", "kind": "strict_transform"}], "edges": [["E1", "S"]]}))
    code, _, err = run(capsys, "classify", "-i", str(bad))
    assert code == 1 and "det" in err


def test_bad_json_reports_position(capsys, tmp_path):
    bad = tmp_path / "g.json"
    bad.write_text('{"vertices": [\n ,]}')
    code, _, err = run(capsys, "classify", "-i", str(bad))
    assert code == 1 and "line 2" in err


@pytest.mark.parametrize("argv", [
    ["nope"],
    [],
    ["h1", "--example", "cusp", "--format", "dot"],
    ["hj", "--from", "1,0"],
])
def test_usage_errors_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as info:
        code = main(argv)
        raise SystemExit(code)
    assert info.value.code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "curvetop", "hj", "--from", "1,0",
                           "--to", "1,2"], capture_output=True, text=True, check=True)
    assert proc.stdout == "(1,0) (1,1) (1,2)\n"
