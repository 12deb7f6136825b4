import json
import subprocess
import sys

import pytest

from lutkit.cli import main
from lutkit.formula import parse
from lutkit.kripke import load_model
from lutkit.semantics import eval_formula


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_false_with_witness(capsys, data_dir):
    code, out, _ = run(capsys, "check", "--model", str(data_dir / "moore.json"), "--state", "s",
                       "--formula", "U_i p")
    assert code == 1
    lines = out.splitlines()
    assert lines[0] == "false"
    assert lines[1] == "witness:"
    assert lines[2] == "  states: s"
    psi = parse(lines[3].split(": ", 1)[1])
    model = load_model((data_dir / "moore.json").read_text())
    assert eval_formula(model, "s", parse(f"<{lines[3].split(': ', 1)[1]}> K_i p"))
    assert eval_formula(model, "s", psi)


def test_check_true(capsys, data_dir):
    code, out, _ = run(capsys, "check", "--model", str(data_dir / "moore.json"), "--state", "s",
                       "--formula", "B_i p")
    assert (code, out) == (0, "true\n")


def test_check_json(capsys, data_dir):
    code, out, _ = run(capsys, "check", "--model", str(data_dir / "three_state.json"),
                       "--state", "s", "--formula", "U_i ~K_i p", "--format", "json")
    doc = json.loads(out)
    assert code == 1
    assert doc["value"] is False
    assert doc["witness"]["states"] == ["s", "u"]
    parse(doc["witness"]["announcement"])


def test_valid_reports_enumerator_count(capsys):
    from lutkit.kripke import count_models
    code, out, _ = run(capsys, "valid", "--formula", "U_a p -> p", "--max-states", "3")
    assert code == 0
    assert out.strip() == f"valid up to bound ({count_models(3, 1, 1)} models checked)"


def test_valid_countermodel(capsys):
    code, out, _ = run(capsys, "valid", "--formula", "B_a p -> U_a p", "--max-states", "2",
                       "--format", "json")
    doc = json.loads(out)
    assert code == 1 and not doc["valid"]
    model = load_model(doc["countermodel"])
    assert not eval_formula(model, doc["state"], parse("B_a p -> U_a p"))


def test_valid_with_frame_class_and_bounds(capsys):
    four = "K_i p -> K_i K_i p"
    code, out, _ = run(capsys, "valid", "--formula", four, "--frame-class", "transitive",
                       "--agents", "i", "--atoms", "p,q", "--max-states", "3", "--jobs", "2")
    assert code == 0
    assert run(capsys, "valid", "--formula", four, "--max-states", "3")[0] == 1


def test_complexity(capsys):
    assert run(capsys, "complexity", "--formula", "[p]K_a q") == (0, "udepth=0 size=12\n", "")
    code, out, _ = run(capsys, "complexity", "--formula", "U_a p", "--format", "json")
    assert json.loads(out) == {"formula": "U_a p", "udepth": 1, "size": 2}


def test_rewrite(capsys):
    code, out, _ = run(capsys, "rewrite", "--formula", "[p] K_a q")
    assert code == 0
    assert out.splitlines() == [
        "--  [p] K_a q  (0, 12)",
        "AK  p -> K_a [p] q  (0, 11)",
        "AP  p -> K_a (p -> q)  (0, 10)",
    ]


def test_bisim(capsys, tmp_path):
    doc = {"states": ["a", "b", "c"], "agents": ["i"], "relations": {"i": [["a", "b"]]},
           "reflexive_closure": True, "valuation": {"p": ["b"]}}
    path = tmp_path / "m.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "bisim", "--model", str(path))
    assert code == 0
    assert out.splitlines() == ["a", "b", "c"]
    doc["valuation"] = {}
    path.write_text(json.dumps(doc))
    assert run(capsys, "bisim", "--model", str(path))[1] == "a, b, c\n"


def test_prove(capsys, data_dir):
    code, out, _ = run(capsys, "prove", "--proof", str(data_dir / "u_factive.json"))
    assert code == 0 and out.splitlines()[-1] == "accepted"
    code, out, _ = run(capsys, "prove", "--proof", str(data_dir / "u_factive_corrupted.json"),
                       "--format", "json")
    doc = json.loads(out)
    assert code == 1 and not doc["accepted"]
    assert doc["steps"][0]["error"] == "AxiomMismatch"


def test_props_single_entry(capsys):
    code, out, _ = run(capsys, "props", "--entry", "fitch-instance")
    assert code == 0
    assert out.startswith("fitch-instance  interactions  PASS  ")


@pytest.mark.parametrize("argv", [
    ["check", "--model", "missing.json", "--state", "s", "--formula", "p"],
    ["complexity", "--formula", "p &"],
    ["valid", "--formula", "K_ p"],
])
def test_input_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and err.startswith("error:")


def test_bad_model_and_state(capsys, data_dir, tmp_path):
    code, _, err = run(capsys, "check", "--model", str(data_dir / "moore.json"), "--state", "x",
                       "--formula", "p")
    assert code == 2 and "UnknownState(x)" in err
    bad = tmp_path / "bad.json"
    bad.write_text('{"states": ["s"], "agents": ["i"], "relations": {"i": [["s", "u"]]}}')
    assert run(capsys, "check", "--model", str(bad), "--state", "s", "--formula", "p")[0] == 2
    bad.write_text('{"steps": 3}')
    assert run(capsys, "prove", "--proof", str(bad))[0] == 2


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["check", "--formula", "p"],
    ["valid", "--formula", "p", "--max-states", "zero"],
    ["valid", "--formula", "p", "--max-states", "0"],
    ["valid", "--formula", "p", "--frame-class", "serial"],
    ["props", "--entry", "no-such-entry"],
    ["complexity", "--formula", "p", "--format", "xml"],
])
def test_usage_errors_exit_64(capsys, argv):
    assert run(capsys, *argv)[0] == 64


def test_module_entry_point(data_dir):
    proc = subprocess.run([sys.executable, "-m", "lutkit", "complexity", "--formula", "U_a U_a p"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == "udepth=2 size=3\n"
