import json
import subprocess
import sys
from pathlib import Path

import pytest

from algebroidkit.cli import run

FIXTURES = Path(__file__).parent / "fixtures"


def write(tmp_path, doc, name="doc.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_so3_action_passes(capsys):
    assert run(["check", "algebroid", str(FIXTURES / "so3_action.json")]) == 0
    assert "PASS" in capsys.readouterr().out


def test_broken_constant_fails_with_witness(capsys, tmp_path):
    out = tmp_path / "report.json"
    assert run(["check", "algebroid", str(FIXTURES / "so3_broken.json"), "--out", str(out)]) == 1
    assert "residual -1*x2" in capsys.readouterr().out
    report = json.loads(out.read_text())
    assert report["status"] == "fail"
    failed = [c for c in report["checks"] if c["status"] == "fail"]
    assert failed[0]["witness"]["residual"] == "-1*x2"
    assert failed[0]["witness"]["variables"] == ["x1", "x2", "x3"]


def test_nonsense_is_malformed(capsys):
    assert run(["check", "algebroid", str(FIXTURES / "nonsense.txt")]) == 2
    assert "error:" in capsys.readouterr().err


def test_missing_field_is_named(capsys, tmp_path):
    doc = {"kind": "algebroid", "base_dim": 1, "rank": 1}
    assert run(["check", "algebroid", write(tmp_path, doc)]) == 2
    assert "anchor" in capsys.readouterr().err


def test_bad_polynomial_is_located(capsys, tmp_path):
    doc = {"kind": "algebroid", "base_dim": 1, "rank": 1, "anchor": [["x1 +"]]}
    assert run(["check", "algebroid", write(tmp_path, doc)]) == 2
    assert "$.anchor" in capsys.readouterr().err


def test_wrong_kind(capsys, tmp_path):
    assert run(["check", "drep", str(FIXTURES / "so3_action.json")]) == 2
    assert "kind" in capsys.readouterr().err


def test_unknown_subcommand():
    assert run(["check", "nothing", str(FIXTURES / "so3_action.json")]) == 2


def test_check_action_and_drep():
    assert run(["check", "action", str(FIXTURES / "so3_action.json")]) == 0
    assert run(["check", "drep", str(FIXTURES / "so3_drep.json")]) == 0


def test_drep_round_trip_through_files(tmp_path, capsys):
    rep = tmp_path / "rep.json"
    assert run(["transform", "drep-to-rep", str(FIXTURES / "so3_drep.json"), "--out", str(rep)]) == 0
    assert json.loads(rep.read_text())["kind"] == "rep"
    assert run(["check", "rep", str(rep)]) == 0
    back = tmp_path / "back.json"
    assert run(["transform", "rep-to-drep", str(rep), "--out", str(back)]) == 0
    assert run(["check", "drep", str(back)]) == 0
    capsys.readouterr()


def test_build_action_algebroid(capsys):
    assert run(["build", "action-algebroid", str(FIXTURES / "so3_action.json")]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["kind"] == "algebroid" and doc["rank"] == 3 and doc["base_dim"] == 3


def test_build_doe_and_check_it(tmp_path, capsys):
    out = tmp_path / "doe.json"
    assert run(["build", "doe", write(tmp_path, {"kind": "bundle", "base_dim": 1, "rank": 2}), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["rank"] == 5
    assert run(["check", "algebroid", str(out)]) == 0
    capsys.readouterr()


def test_build_trivial_rejects_curvature(tmp_path, capsys):
    doc = {
        "kind": "connection",
        "field": "gaussian",
        "bundle": {"base_dim": 2, "rank": 1},
        "gammas": [[["0"]], [["i*x1"]]],
    }
    assert run(["build", "trivial", write(tmp_path, doc)]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_semilinear_checks(tmp_path):
    auto = {
        "kind": "automorphism",
        "bundle": {"base_dim": 2, "rank": 2},
        "A": [[1, 1], [0, 1]],
        "b": [1, 0],
        "g": [["1", "x2"], ["0", "1"]],
    }
    assert run(["check", "semilinear", write(tmp_path, auto), "--degree-bound", "3"]) == 0
    rep = {
        "kind": "semilinear_rep",
        "group": {"generators": ["a", "b"], "relators": ["a b a^-1 b^-1"]},
        "bundle": {"base_dim": 2, "rank": 2},
        "action": [{"A": [[1, 0], [0, 1]], "b": [1, 0]}, {"A": [[1, 0], [0, 1]], "b": [0, 1]}],
        "assignment": [
            {"A": [[1, 0], [0, 1]], "b": [1, 0], "g": [["1", "1"], ["0", "1"]]},
            {"A": [[1, 0], [0, 1]], "b": [0, 1], "g": [["1", "0"], ["1", "1"]]},
        ],
    }
    assert run(["check", "semilinear", write(tmp_path, rep)]) == 1


def test_groupoid_action_check(tmp_path, capsys):
    doc = {
        "kind": "groupoid_action",
        "group": {"generators": ["s"], "relators": ["s s"]},
        "base_dim": 2,
        "fiber_dim": 1,
        "action": [{"A": [[-1, 0], [0, -1]]}],
        "lift": [{"T": [["1"]], "t": ["x1"]}],
        "rep": {"rank": 2, "assignment": [[["-1", "2*y1 + x1"], ["0", "1"]]]},
        "max_length": 2,
    }
    assert run(["check", "groupoid-action", write(tmp_path, doc)]) == 0
    doc["lift"] = [{"T": [["1"]], "t": ["1"]}]
    assert run(["check", "groupoid-action", write(tmp_path, doc)]) == 1
    capsys.readouterr()


def test_pseudolinear_modes(tmp_path, capsys):
    shift = {"A": [[1]], "b": [1]}
    doc = {
        "kind": "pseudolinear",
        "base_dim": 1,
        "rank": 1,
        "u": [{"coeff": [["1"]], "pullback": shift}, {"coeff": [["-1"]]}],
        "upper": [{"coeff": "1", "pullback": shift}],
        "lower": [{"coeff": "1", "pullback": shift}, {"coeff": "-1"}],
    }
    assert run(["check", "pseudolinear", write(tmp_path, doc)]) == 0
    doc["mode"] = "twisted"
    assert run(["check", "pseudolinear", write(tmp_path, doc)]) == 0
    doc["mode"] = "sideways"
    assert run(["check", "pseudolinear", write(tmp_path, doc)]) == 2
    capsys.readouterr()


def test_transforms_on_operators(tmp_path, capsys):
    fam = {"kind": "dual_family", "bundle": {"base_dim": 1, "rank": 1}, "A1": [[0]], "b1": [1], "B": [["0"]]}
    assert run(["transform", "differentiate", write(tmp_path, fam)]) == 0
    D = json.loads(capsys.readouterr().out)
    assert D["anchor"] == ["-1"] and D["matrix"] == [["0"]]
    op = {"kind": "derivative_op", "bundle": {"base_dim": 1, "rank": 1}, "anchor": ["x1"], "matrix": [["2"]]}
    lvf = tmp_path / "lvf.json"
    assert run(["transform", "linear-field", write(tmp_path, op), "--out", str(lvf)]) == 0
    capsys.readouterr()
    assert run(["transform", "lieder", str(lvf)]) == 0
    back = json.loads(capsys.readouterr().out)
    assert back["anchor"] == ["1*x1"] and back["matrix"] == [["2"]]


def test_prequantize(tmp_path, capsys):
    doc = {
        "kind": "prequantization",
        "coordinates": ["x", "y"],
        "omega": [[0, 1], [-1, 0]],
        "alpha": ["0", "i*x"],
        "functions": ["x", "y"],
    }
    assert run(["prequantize", write(tmp_path, doc)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["kind"] == "prequantized"
    assert out["operators"][1]["anchor"] == ["1", "0"]
    assert out["operators"][1]["matrix"] == [["1*i*y"]]
    doc["alpha"] = ["0", "x"]
    assert run(["prequantize", write(tmp_path, doc)]) == 1


def test_output_is_byte_stable(tmp_path, capsys):
    path = str(FIXTURES / "so3_action.json")
    run(["build", "action-algebroid", path])
    first = capsys.readouterr().out
    run(["build", "action-algebroid", path])
    assert capsys.readouterr().out == first


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "algebroidkit", "check", "algebroid", str(FIXTURES / "so3_broken.json")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 1
    assert "FAIL" in proc.stdout


@pytest.mark.parametrize("argv", [["--version"], ["check", "--help"]])
def test_informational_flags(argv, capsys):
    assert run(argv) == 0
