"""Command-line behavior: exit codes, stream separation, determinism."""

from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from tmkit.cli import run
from tmkit.corpus import corpus_dir, mentcare_path

SIMPLE = (
    "machine A { create; process; }\n"
    "flow f1: A.create -> A.process;\n"
    'event E1 { time "t1"; region { A.create A.process } }\n'
    'event E2 { time "t2"; region { A.process } }\n'
    "behavior { E1 -> E2; }\n"
)


@pytest.fixture()
def simple_file(tmp_path: Path) -> Path:
    path = tmp_path / "simple.tm"
    path.write_text(SIMPLE, encoding="utf-8")
    return path


def test_check_clean_corpus_exits_zero(capsys):
    status = run(["check", str(mentcare_path())])
    out = capsys.readouterr().out
    assert status == 0
    assert "0 errors, 0 warnings" in out


def test_check_reports_errors_on_stdout(tmp_path, capsys):
    bad = tmp_path / "bad.tm"
    bad.write_text("machine A { create; receive; }\nflow A.create -> A.receive;\n")
    status = run(["check", str(bad)])
    out = capsys.readouterr().out
    assert status == 1
    assert "ERROR V2 f1" in out


def test_check_missing_file_argument_is_usage_error(capsys):
    assert run(["check"]) == 2


def test_unknown_subcommand_is_usage_error(capsys):
    assert run(["frobnicate", "x.tm"]) == 2


def test_unreadable_file_is_status_two(capsys):
    status = run(["check", "no/such/file.tm"])
    assert status == 2
    assert "cannot read" in capsys.readouterr().err


def test_parse_failure_is_status_one(tmp_path, capsys):
    bad = tmp_path / "broken.tm"
    bad.write_text("machine {", encoding="utf-8")
    status = run(["check", str(bad)])
    err = capsys.readouterr().err
    assert status == 1
    assert "syntax" in err


def test_fmt_is_idempotent_via_cli(simple_file, tmp_path, capsys):
    out1 = tmp_path / "once.tm"
    assert run(["fmt", str(simple_file), "-o", str(out1)]) == 0
    out2 = tmp_path / "twice.tm"
    assert run(["fmt", str(out1), "-o", str(out2)]) == 0
    assert out1.read_text() == out2.read_text()


def test_fmt_corpus_is_byte_stable(capsys):
    assert run(["fmt", str(mentcare_path())]) == 0
    out = capsys.readouterr().out
    assert out == mentcare_path().read_text(encoding="utf-8")


def test_trace_conforming(capsys):
    status = run(["trace", str(mentcare_path()), "--trace", "E1,E2,E3,E4,E5,E8"])
    out = capsys.readouterr().out
    assert status == 0
    assert out.startswith("conforms")


def test_trace_violation_names_index(capsys):
    status = run(["trace", str(mentcare_path()), "--trace", "E1,E2,E3,E4,E7"])
    out = capsys.readouterr().out
    assert status == 1
    assert "violation at index 4" in out


def test_trace_accepts_json_file(capsys):
    trace_file = corpus_dir() / "traces" / "ok_not_dangerous.json"
    status = run(["trace", str(mentcare_path()), "--trace", f"@{trace_file}"])
    assert status == 0


def test_empty_trace_is_usage_error(capsys):
    status = run(["trace", str(mentcare_path()), "--trace", ""])
    assert status == 2
    assert "at least one event id" in capsys.readouterr().err


def test_trace_with_unknown_event_is_diagnostic_error(capsys):
    status = run(["trace", str(mentcare_path()), "--trace", "E1,Nope"])
    assert status == 1
    assert "Nope" in capsys.readouterr().err


def test_events_prints_uncovered(capsys):
    status = run(["events", str(mentcare_path())])
    out = capsys.readouterr().out
    assert status == 0
    assert out.splitlines() == [
        "InfoSystem.PatientFile.release",
        "InfoSystem.PatientFile.transfer",
    ]


def test_simplify_expand_round_trip_via_files(simple_file, tmp_path, capsys):
    simplified = tmp_path / "s.tm"
    assert run(["simplify", str(simple_file), "-o", str(simplified)]) == 0
    expanded = tmp_path / "e.tm"
    assert run(["expand", str(simplified), "-o", str(expanded)]) == 0
    text = expanded.read_text()
    assert "release" not in text  # intra-machine flow needs no gates
    assert "create" in text


def test_render_static_and_behavior(simple_file, capsys):
    assert run(["render", str(simple_file)]) == 0
    static_out = capsys.readouterr().out
    assert static_out.startswith("digraph static {")
    assert run(["render", str(simple_file), "--behavior"]) == 0
    behavior_out = capsys.readouterr().out
    assert '"E1" -> "E2";' in behavior_out


def test_render_highlight_event(simple_file, capsys):
    assert run(["render", str(simple_file), "--highlight", "E1"]) == 0
    out = capsys.readouterr().out
    assert "style=filled" in out


def test_render_highlight_unknown_event(simple_file, capsys):
    assert run(["render", str(simple_file), "--highlight", "E99"]) == 2


def test_json_mode_round_trip(simple_file, tmp_path, capsys):
    as_json = tmp_path / "doc.json"
    assert run(["fmt", str(simple_file), "--json", "-o", str(as_json)]) == 0
    doc = json.loads(as_json.read_text())
    assert set(doc) == {"machines", "flows", "triggers", "events", "behavior"}
    back = tmp_path / "back.tm"
    # JSON in, text out: load document, then reprint canonically
    assert run(["check", str(as_json), "--json"]) == 0
    capsys.readouterr()
    assert run(["render", str(as_json), "--json"]) == 0
    assert capsys.readouterr().out.startswith("digraph")


def test_import_export_uml_via_files(tmp_path, capsys):
    act = corpus_dir() / "mentcare.act.json"
    model_file = tmp_path / "imported.tm"
    assert run(["import-uml", str(act), "-o", str(model_file)]) == 0
    assert run(["check", str(model_file), "--simplified"]) == 0
    capsys.readouterr()
    exported = tmp_path / "round.act.json"
    assert run(["export-uml", str(model_file), "-o", str(exported)]) == 0
    from tmkit import activity_from_json, activity_isomorphic

    original = activity_from_json(act.read_text())
    back = activity_from_json(exported.read_text())
    assert activity_isomorphic(original, back)


def test_import_uml_full_form(tmp_path, capsys):
    act = corpus_dir() / "mentcare.act.json"
    assert run(["import-uml", str(act), "--full"]) == 0
    out = capsys.readouterr().out
    assert "release" in out and "transfer" in out
    full = tmp_path / "full.tm"
    full.write_text(out, encoding="utf-8")
    assert run(["check", str(full)]) == 0


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "tmkit.cli", "check", str(mentcare_path())],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "0 errors" in proc.stdout
