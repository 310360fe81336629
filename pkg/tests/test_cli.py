import json
import subprocess
import sys

import jsonschema
import pytest

from conftest import DATA
from ilkit.cli import EX_NOINPUT, EX_USAGE, report_schema, run


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr().out
    report = json.loads(out) if out.startswith("{") else out
    if isinstance(report, dict):
        jsonschema.validate(report, report_schema())
    return code, report


def test_parse(capsys):
    code, rep = call(capsys, "parse", "--formula", "p|>q", "--phi")
    assert code == 0
    assert rep["formula"] == "p |> q" and rep["variables"] == ["p", "q"]
    assert "false |> false" in rep["adequate_set"]


def test_parse_error_is_usage(capsys):
    assert run(["parse", "--formula", "p |> q |> r"]) == EX_USAGE
    assert "not associative" in capsys.readouterr().err


def test_eval_incomparable_labels_model(capsys):
    code, rep = call(capsys, "eval", "--model", "fig_no_maximum.json", "--world", "w", "--formula", "r |> (~p | ~q)")
    assert code == 0 and rep["value"] is True
    code, rep = call(capsys, "eval", "--model", "fig_no_maximum.json", "--world", "w", "--formula", "r |> ~p")
    assert rep["value"] is False


def test_eval_unknown_world(capsys):
    assert run(["eval", "--model", "fig_no_maximum.json", "--world", "nowhere", "--formula", "p"]) == EX_USAGE


def test_missing_file(capsys, tmp_path):
    assert run(["validate", "--model", str(tmp_path / "absent.json")]) == EX_NOINPUT
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["validate", "--model", str(bad)]) == EX_NOINPUT


@pytest.mark.parametrize("name", ["fig_no_maximum.json", "gen_P_bad.json", "gen_qt_ok.json"])
def test_validate_ok(capsys, name):
    assert call(capsys, "validate", "--model", name) == (0, {"schema_version": 1, "command": "validate", "ok": True})


def test_validate_reports_clause(capsys):
    code, rep = call(capsys, "validate", "--model", "gen_qt_bad.json")
    assert code == 1 and rep["clause"] == "quasi-transitive"


def test_conditions_table(capsys):
    code, rep = call(capsys, "conditions", "--model", "control_P.json")
    assert code == 0
    assert rep["conditions"]["P"]["ok"] is False
    assert set(rep["conditions"]) == {"P", "M", "M0", "R", "W"}
    code, rep = call(capsys, "conditions", "--model", "gen_W_bad.json", "--strict")
    assert rep["conditions"]["W"]["ok"] is False


def test_decide_exit_codes(capsys, tmp_path):
    code, rep = call(capsys, "decide", "--formula", "[]([]p -> p) -> []p")
    assert code == 0 and rep["verdict"] == "provable-up-to-bound"
    emit, dot = tmp_path / "m.json", tmp_path / "m.dot"
    code, rep = call(capsys, "decide", "--formula", "<>true", "--emit", str(emit), "--dot", str(dot))
    assert code == 1 and rep["verdict"] == "countermodel"
    assert json.loads(emit.read_text())["worlds"] == ["w0"]
    assert dot.read_text().startswith("digraph")
    code, rep = call(capsys, "decide", "--formula", "p", "--logic", "IL", "--bound", "99")
    assert code == 2 and rep["verdict"] == "error"


def test_decide_other_logics(capsys):
    code, rep = call(capsys, "decide", "--formula", "p |> q -> [](p |> q)", "--logic", "ILP", "--bound", "3")
    assert code == 0
    code, rep = call(capsys, "decide", "--formula", "p |> q -> [](p |> q)", "--logic", "IL", "--bound", "3")
    assert code == 1 and rep["model"]["type"] == "ordinary"


def test_labels_command(capsys):
    code, rep = call(capsys, "labels", "--model", "box_vs_assuringness.json", "--x", "x", "--y", "y", "--label", "")
    assert rep["semantic_assuring"] is True
    code, rep = call(capsys, "labels", "--model", "box_vs_assuringness.json", "--x", "x", "--y", "y")
    assert rep["label"] == ["p"] and rep["semantic_assuring"] is False and rep["assures"] is False


def test_closure_command(capsys):
    code, rep = call(capsys, "closure", "--formula", "~(p |> q)", "--label", "q")
    assert code == 0
    assert "q" in rep["closure"] and set(rep["label"]) <= set(rep["closure"])
    assert run(["closure", "--formula", "p", "--label", "r"]) == EX_USAGE


def test_qlabels_command(capsys):
    code, rep = call(
        capsys, "qlabels", "--model", "control_R.json", "--chain", "z,y,x", "--label", "p", "--label", "", "--pivot", "q"
    )
    assert code == 0 and rep["agree"] is True
    assert all("[]~q" in q for q in rep["Q"])
    assert run(["qlabels", "--model", "control_R.json", "--chain", "y,x", "--pivot", "q"]) == EX_USAGE


def test_harness_command(capsys):
    code, rep = call(capsys, "harness", "--principle", "P", "--trials", "200", "--seed", "7")
    assert code == 0 and rep["violations"] == []
    code, rep = call(capsys, "harness", "--principle", "R", "--model", "control_R.json", "--allow-violating")
    assert code == 1 and rep["violations"]
    assert run(["harness", "--principle", "R", "--model", "control_R.json"]) == EX_USAGE


def test_seed_position_and_determinism(capsys):
    run(["--seed", "3", "harness", "--principle", "M", "--trials", "30"])
    first = capsys.readouterr().out
    run(["harness", "--principle", "M", "--trials", "30", "--seed", "3"])
    assert capsys.readouterr().out == first
    run(["harness", "--principle", "M", "--trials", "30", "--seed", "3"])
    assert capsys.readouterr().out == first


def test_proof_check(capsys, tmp_path):
    script = DATA / "proofs" / "item1_box_transitive.txt"
    code, rep = call(capsys, "proof-check", "--script", str(script))
    assert code == 0 and rep["conclusion"] == "[]p -> [][]p"
    lines = script.read_text().splitlines()
    k = max(i for i, line in enumerate(lines) if ";" in line)
    formula, just = lines[k].split(";", 1)
    lines[k] = f"~({formula.strip()}) ;{just}"
    bad = tmp_path / "bad.txt"
    bad.write_text("\n".join(lines) + "\n")
    code, rep = call(capsys, "proof-check", "--script", str(bad))
    assert code == 1 and rep["line"] == k + 1
    assert run(["proof-check", "--script", str(tmp_path / "none.txt")]) == EX_NOINPUT


def test_export_dot_is_stable(capsys, tmp_path):
    assert run(["export-dot", "--model", "gen_W_bad.json"]) == 0
    first = capsys.readouterr().out
    out = tmp_path / "g.dot"
    assert run(["export-dot", "--model", "gen_W_bad.json", "--out", str(out)]) == 0
    assert out.read_text().rstrip("\n") == first.rstrip("\n")


@pytest.mark.parametrize("argv", [[], ["frobnicate"], ["parse"], ["parse", "--formula", "p", "--bogus"]])
def test_usage_errors(capsys, argv):
    assert run(argv) == EX_USAGE


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "ilkit", "eval", "--model", "fig_no_maximum.json", "--world", "w", "--formula", "r |> ~q"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["value"] is False
