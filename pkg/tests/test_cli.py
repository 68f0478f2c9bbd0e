import json
import subprocess
import sys
from pathlib import Path

import pytest

from univalent.cli import main

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, "--format", "json", *argv)
    return code, json.loads(out)


# -- check ----------------------------------------------------------------------------


def test_check_passes_on_samples(capsys):
    code, out, _ = run(capsys, "check", SAMPLES / "univalence.tt")
    assert code == 0
    assert "verdict: pass (14 declarations)" in out


def test_check_reports_type_errors_with_exit_one(tmp_path, capsys):
    f = tmp_path / "bad.tt"
    f.write_text("axiom A : U0\naxiom B : U0\naxiom a : A\ndef b : B := a\n")
    code, report = run_json(capsys, "check", f)
    assert code == 1
    assert report["error"]["declaration"] == "b"
    assert report["error"]["line"] == 4
    assert report["checked"] == ["A", "B", "a"]


def test_check_parse_error_is_a_usage_error(tmp_path, capsys):
    f = tmp_path / "bad.tt"
    f.write_text("def oops : U0 := (\n")
    code, out, err = run(capsys, "check", f)
    assert code == 2
    assert "bad.tt" in err


def test_missing_file_is_a_usage_error(capsys):
    code, _, err = run(capsys, "check", "/nonexistent/file.tt")
    assert code == 2
    assert "cannot read" in err


# -- library ----------------------------------------------------------------------


def test_library_lists_entries(capsys):
    code, report = run_json(capsys, "library")
    assert code == 0
    kinds = {e["name"]: e["kind"] for e in report["entries"]}
    assert kinds["univalence"] == "axiom" and kinds["idweq"] == "def"
    assert "source" not in report


def test_library_emit_prints_source(capsys):
    code, out, _ = run(capsys, "library", "--emit")
    assert code == 0
    assert "axiom univalence" in out


# -- models -------------------------------------------------------------------------


def test_cc_axioms_pass_on_sample(capsys):
    code, report = run_json(capsys, "cc-axioms", SAMPLES / "sets2.model", "--depth", "2")
    assert code == 0
    assert report["verdict"] == "pass"


def test_cc_axioms_reject_bad_model(tmp_path, capsys):
    f = tmp_path / "bad.model"
    f.write_text("objects a\nbogus\n")
    code, _, err = run(capsys, "cc-axioms", f)
    assert code == 2
    assert "unknown directive" in err


def test_interpret_sample(capsys):
    code, report = run_json(capsys, "interpret", SAMPLES / "bool.tt", "--model", SAMPLES / "setmodel5.model")
    assert code == 0
    status = {r["name"]: r["status"] for r in report["results"]}
    assert status["beta"] == "sound"
    assert status["transport"] == "sound"
    assert status["tt"] == "model value"
    fiber = {r["name"]: r.get("fiber_size") for r in report["results"]}
    # (Two -> Two) -> Two -> Two has 4 ** 4 elements
    assert fiber["eta"] == {"*": 256}


def test_interpret_rejects_unknown_model_constants(tmp_path, capsys):
    f = tmp_path / "a.tt"
    f.write_text("axiom Two : U0\n")
    code, _, err = run(capsys, "interpret", f, "--model", SAMPLES / "setmodel5.model")
    assert code == 2
    assert "is not an axiom" in err


def test_interpret_needs_a_structured_model(capsys):
    code, _, err = run(capsys, "interpret", SAMPLES / "bool.tt", "--model", SAMPLES / "sets2.model")
    assert code == 2
    assert "setmodel" in err


def test_interpret_blocks_axioms_without_values(tmp_path, capsys):
    f = tmp_path / "a.tt"
    f.write_text(
        "axiom Two : U0\naxiom tt : Two\naxiom ff : Two\naxiom Three : U0\naxiom c0 : Three\n"
        "axiom odd : Two\ndef x : Two := odd\n"
    )
    code, report = run_json(capsys, "interpret", f, "--model", SAMPLES / "setmodel5.model")
    assert code == 0
    status = {r["name"]: r["status"] for r in report["results"]}
    assert status["x"] == "blocked"


# -- simplicial -------------------------------------------------------------------------


def test_kan_pass_and_fail(capsys):
    assert run(capsys, "kan", SAMPLES / "z2.ss", "--dim", "3")[0] == 0
    code, out, _ = run(capsys, "kan", SAMPLES / "horn21.ss", "--dim", "2")
    assert code == 1
    assert "witness horn" in out


def test_kan_dimension_beyond_truncation(capsys):
    code, _, err = run(capsys, "kan", SAMPLES / "horn21.ss", "--dim", "5")
    assert code == 2
    assert "truncation" in err


def test_univalence_commands(capsys):
    code, report = run_json(capsys, "univalence", "--fiber-bound", "2", "--trunc", "2")
    assert code == 0
    code, report = run_json(capsys, "univalence", "--counterexample", "--trunc", "2")
    assert code == 1
    assert report["pi0_witness"]


def test_univalence_rejects_low_truncation(capsys):
    assert run(capsys, "univalence", "--trunc", "1")[0] == 2


# -- global behaviour ------------------------------------------------------------------


def test_usage_errors_exit_two(capsys):
    assert run(capsys)[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "kan", SAMPLES / "z2.ss", "--dim", "0")[0] == 2
    assert run(capsys, "--format", "yaml", "library")[0] == 2


def test_environment_sets_format(monkeypatch, capsys):
    monkeypatch.setenv("UNIVALENT_FORMAT", "json")
    code, out, _ = run(capsys, "library")
    assert json.loads(out)["command"] == "library"
    code, out, _ = run(capsys, "--format", "text", "library")
    assert out.startswith("axiom") or out.startswith("def")


def test_bad_environment_format_is_a_usage_error(monkeypatch, capsys):
    monkeypatch.setenv("UNIVALENT_FORMAT", "xml")
    assert run(capsys, "library")[0] == 2


def test_json_output_is_deterministic(capsys):
    args = ("kan", SAMPLES / "horn21.ss", "--dim", "2")
    first = run(capsys, "--format", "json", *args)[1]
    second = run(capsys, "--format", "json", *args)[1]
    assert first == second
    assert json.loads(first)["exit"] == 1


@pytest.mark.parametrize("argv, code", [(["library"], 0), (["kan", str(SAMPLES / "horn21.ss")], 1)])
def test_module_entry_point(argv, code):
    proc = subprocess.run([sys.executable, "-m", "univalent.cli", *argv], capture_output=True, text=True)
    assert proc.returncode == code
