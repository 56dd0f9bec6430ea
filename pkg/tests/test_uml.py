"""Activity-diagram import/export."""

from __future__ import annotations

import pytest
from hypothesis import given, settings

from strategies import activity_graphs
from tmkit import (
    ActionKind,
    ActivityEdge,
    ActivityGraph,
    ActivityNode,
    AmbiguousInitial,
    MalformedDecision,
    UnsupportedConstruct,
    activity_from_json,
    activity_isomorphic,
    activity_to_json,
    export_activity,
    has_errors,
    import_activity,
    model_isomorphic,
    parse_or_raise,
    validate_static,
)

C, P = ActionKind.CREATE, ActionKind.PROCESS


def linear(*labels: str) -> ActivityGraph:
    nodes = [ActivityNode("i", "Initial")]
    edges = []
    prev = "i"
    for k, label in enumerate(labels):
        nodes.append(ActivityNode(f"a{k}", "Action", label))
        edges.append(ActivityEdge(prev, f"a{k}"))
        prev = f"a{k}"
    nodes.append(ActivityNode("f", "Final"))
    edges.append(ActivityEdge(prev, "f"))
    return ActivityGraph.build(nodes, edges)


def test_single_action_import():
    model = import_activity(linear("Record detention decision"))
    expected = parse_or_raise(
        'machine RecordDetentionDecision : "Record detention decision" { create; process; }\n'
        "flow RecordDetentionDecision.create -> RecordDetentionDecision.process;"
    ).model
    assert model_isomorphic(model, expected)
    machine = next(iter(model.all_machines()))
    assert machine.name == "Record detention decision"


def test_import_output_is_simplified_and_clean():
    model = import_activity(linear("one", "two", "three"))
    assert not has_errors(validate_static(model, mode="simplified"))
    assert all(s.kind in (C, P) for s in model.all_stages())


def test_decision_guards_become_triggers_verbatim():
    g = ActivityGraph.build(
        nodes=[
            ActivityNode("i", "Initial"),
            ActivityNode("a", "Action", "triage"),
            ActivityNode("d", "Decision"),
            ActivityNode("b", "Action", "hold"),
            ActivityNode("c", "Action", "admit"),
            ActivityNode("f", "Final"),
        ],
        edges=[
            ActivityEdge("i", "a"),
            ActivityEdge("a", "d"),
            ActivityEdge("d", "b", "dangerous"),
            ActivityEdge("d", "c", "not dangerous"),
            ActivityEdge("b", "f"),
            ActivityEdge("c", "f"),
        ],
    )
    model = import_activity(g)
    guards = sorted(t.guard for t in model.triggers)
    assert guards == ["dangerous", "not dangerous"]
    assert all(t.source.endswith(".process") for t in model.triggers)


def test_fork_raises_unsupported_construct():
    text = (
        '{"nodes": [{"id": "i", "kind": "Initial", "label": ""},'
        ' {"id": "x", "kind": "Fork", "label": ""},'
        ' {"id": "f", "kind": "Final", "label": ""}],'
        ' "edges": []}'
    )
    with pytest.raises(UnsupportedConstruct, match="x"):
        activity_from_json(text)


def test_unguarded_decision_edge_raises():
    with pytest.raises(MalformedDecision):
        ActivityGraph.build(
            nodes=[
                ActivityNode("i", "Initial"),
                ActivityNode("a", "Action", "a"),
                ActivityNode("d", "Decision"),
                ActivityNode("b", "Action", "b"),
                ActivityNode("c", "Action", "c"),
                ActivityNode("f", "Final"),
            ],
            edges=[
                ActivityEdge("i", "a"),
                ActivityEdge("a", "d"),
                ActivityEdge("d", "b"),
                ActivityEdge("d", "c", "guarded"),
                ActivityEdge("b", "f"),
                ActivityEdge("c", "f"),
            ],
        )


def test_smallest_model_exports_to_initial_action_final():
    model = parse_or_raise(
        "machine A { create; process; }\nflow A.create -> A.process;"
    ).model
    g = export_activity(model)
    kinds = sorted(n.kind for n in g.nodes)
    assert kinds == ["Action", "Final", "Initial"]
    assert {(e.source, e.target) for e in g.edges} == {("initial", "a_A"), ("a_A", "final")}


def test_export_requires_simplified_form():
    from test_model import two_machine_chain
    from tmkit import NotSimplified

    with pytest.raises(NotSimplified):
        export_activity(two_machine_chain())


def test_export_with_no_initial_candidate_raises():
    text = (
        "machine A { create; process; }\nmachine B { process; }\n"
        "flow A.create -> A.process;\ntrigger B.process => A.create;\n"
    )
    model = parse_or_raise(text).model
    with pytest.raises(AmbiguousInitial) as exc:
        export_activity(model)
    assert exc.value.candidates == ()


def test_export_with_two_initial_candidates_names_them():
    text = "machine A { create; }\nmachine B { create; }\n"
    model = parse_or_raise(text).model
    with pytest.raises(AmbiguousInitial) as exc:
        export_activity(model)
    assert exc.value.candidates == ("A", "B")


def test_activity_json_round_trip():
    g = linear("alpha", "beta")
    text = activity_to_json(g)
    again = activity_from_json(text)
    assert activity_isomorphic(g, again)
    assert activity_to_json(again) == text


def test_activity_isomorphism_checks_labels_and_guards():
    a = linear("one")
    b = linear("two")
    assert not activity_isomorphic(a, b)


@settings(max_examples=100, deadline=None)
@given(activity_graphs())
def test_import_export_round_trip(g):
    model = import_activity(g)
    assert not has_errors(validate_static(model, mode="simplified"))
    back = export_activity(model)
    assert activity_isomorphic(g, back)


@settings(max_examples=60, deadline=None)
@given(activity_graphs())
def test_guards_survive_byte_identically(g):
    model = import_activity(g)
    original = sorted(e.guard for e in g.edges if e.guard is not None)
    imported = sorted(t.guard for t in model.triggers if t.guard is not None)
    assert imported == original
    back = export_activity(model)
    exported = sorted(e.guard for e in back.edges if e.guard is not None)
    assert exported == original


@settings(max_examples=60, deadline=None)
@given(activity_graphs())
def test_import_is_deterministic(g):
    assert model_isomorphic(import_activity(g), import_activity(g))
