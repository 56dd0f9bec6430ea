"""Case-study fixture integrity."""

from __future__ import annotations

import json

import pytest

from tmkit import (
    ActionKind,
    conform,
    coverage,
    eventize,
    expand,
    export_activity,
    find_stage,
    model_isomorphic,
    print_model,
    simplify,
)
from tmkit.corpus import (
    CONSTRAINT_GUARD,
    RECEPTIONIST_FUNCTIONS,
    corpus_dir,
    corpus_integrity,
    load_mentcare,
    mentcare_path,
)
from tmkit.model import CORE_KINDS


@pytest.fixture(scope="module")
def mentcare():
    return load_mentcare()


def test_integrity_report_is_clean():
    report = corpus_integrity()
    assert report.ok, str(report)


def test_event_names_match_the_narrative(mentcare):
    names = {e.id: e.name for e in mentcare.events}
    assert names["E1"] == "A person is brought to the Mentcare center."
    assert names["E5"].startswith("The detainee is transferred to the police")
    assert len(names) == 19


def test_e5_carries_the_dated_time(mentcare):
    e5 = next(e for e in mentcare.events if e.id == "E5")
    assert e5.time == "1/1/2021"
    region_machines = {sid.split(".")[0] for sid in e5.region.stage_ids}
    assert region_machines == {"DangerAssessment", "PoliceStation"}


def test_find_stage_locates_the_receptionists_create(mentcare):
    stage = find_stage(mentcare.model, ["MedicalReceptionist"], ActionKind.CREATE)
    assert stage is not None
    assert stage.id == "MedicalReceptionist.create"


def test_receptionist_function_machines(mentcare):
    receptionist = mentcare.model.machines_by_id["MedicalReceptionist"]
    names = {m.id.split(".")[-1] for m in receptionist.submachines}
    assert names == set(RECEPTIONIST_FUNCTIONS)


def test_constraint_guard_is_verbatim(mentcare):
    guards = [t.guard for t in mentcare.model.triggers if t.source.startswith("InfoSystem.RecordConstraint")]
    assert guards == [CONSTRAINT_GUARD]


def test_corpus_is_a_fmt_fixpoint(mentcare):
    text = mentcare_path().read_text(encoding="utf-8")
    printed = print_model(mentcare.model, mentcare.events, mentcare.behavior, mentcare.comments)
    assert printed == text


def test_activity_fixture_is_canonical_json():
    from tmkit import activity_from_json, activity_to_json

    path = corpus_dir() / "mentcare.act.json"
    text = path.read_text(encoding="utf-8")
    assert activity_to_json(activity_from_json(text)) == text


def test_simplified_corpus_has_only_core_stages(mentcare):
    simplified = simplify(mentcare.model)
    assert all(s.kind in CORE_KINDS for s in simplified.all_stages())
    core_count = sum(1 for s in mentcare.model.all_stages() if s.kind in CORE_KINDS)
    assert len(list(simplified.all_stages())) == core_count


def test_expand_of_simplified_corpus_restores_it(mentcare):
    simplified = simplify(mentcare.model)
    assert model_isomorphic(expand(simplified), mentcare.model)


def test_all_trace_fixtures_produce_recorded_verdicts(mentcare):
    traces_dir = corpus_dir() / "traces"
    expected = json.loads((traces_dir / "expected.json").read_text())
    assert expected, "no recorded verdicts"
    for name, record in expected.items():
        trace = json.loads((traces_dir / name).read_text())
        verdict = conform(trace, mentcare.behavior)
        assert verdict.conforms == record["conforms"], name
        assert verdict.violation_index == record["violation_index"], name


def test_uncovered_stages_golden(mentcare):
    closed = [eventize(mentcare.model, e) for e in mentcare.events]
    uncovered = coverage(mentcare.model, closed)
    golden = (corpus_dir() / "golden" / "uncovered.txt").read_text().split()
    assert list(uncovered) == golden
    # independent set-difference check
    union = set().union(*(e.region.stage_ids for e in closed))
    all_ids = {s.id for s in mentcare.model.all_stages()}
    assert set(uncovered) == all_ids - union


def test_exported_corpus_carries_the_dangerousness_decision(mentcare):
    graph = export_activity(simplify(mentcare.model))
    decisions = [n for n in graph.nodes if n.kind == "Decision"]
    assert len(decisions) == 1
    guards = sorted(e.guard for e in graph.edges if e.source == decisions[0].id)
    assert guards == [
        "the person is dangerous and a secure location is available",
        "the person is dangerous and no secure location is available",
        "the person is not dangerous",
    ]
    labels = {n.label for n in graph.nodes if n.kind == "Action"}
    assert {"Person", "DangerAssessment", "PoliceStation", "SecureLocation"} <= labels


def test_behavioral_graph_has_single_source(mentcare):
    assert mentcare.behavior.sources() == {"E1"}


def test_detention_walkthrough_flows_present(mentcare):
    pairs = {(f.source, f.target) for f in mentcare.model.flows}
    # spot checks along the circles 1-19 chain
    assert ("Person.create", "Person.process") in pairs
    assert ("DangerAssessment.transfer", "PoliceStation.transfer") in pairs
    assert ("DetaineeInfo.transfer", "SocialServices.transfer") in pairs
    assert ("InfoSystem.receive", "InfoSystem.process") in pairs
