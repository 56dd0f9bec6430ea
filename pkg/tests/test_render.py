"""DOT output: shape conventions and byte determinism."""

from __future__ import annotations

import re

import pytest
from hypothesis import given, settings

from strategies import documents
from tmkit import (
    BehavioralModel,
    Region,
    StaticModel,
    UnknownStage,
    eventize,
    parse_or_raise,
    render_behavior,
    render_static,
)

_NODE = re.compile(r'^\s*"[^"]*(\\.[^"]*)*" \[.*\];$')
_EDGE = re.compile(r'^\s*"[^"]*(\\.[^"]*)*" -> "[^"]*(\\.[^"]*)*"( \[.*\])?;$')
_ATTR = re.compile(r"^\s*\w+=.*;$")
_DEFAULTS = re.compile(r"^\s*(node|edge|graph) \[.*\];$")
_SUBGRAPH = re.compile(r'^\s*subgraph "[^"]+" \{$')


def assert_valid_dot(text: str) -> None:
    """Small structural check: balanced braces, every line a known statement."""
    lines = text.splitlines()
    assert lines[0].startswith("digraph ") and lines[0].endswith("{")
    assert lines[-1] == "}"
    depth = 0
    for line in lines:
        stripped = line.strip()
        if stripped.endswith("{"):
            depth += 1
            if stripped != lines[0].strip():
                assert _SUBGRAPH.match(line) or stripped.startswith("digraph"), line
            continue
        if stripped == "}":
            depth -= 1
            continue
        assert (
            _NODE.match(line)
            or _EDGE.match(line)
            or _ATTR.match(line)
            or _DEFAULTS.match(line)
        ), f"unrecognized DOT line: {line!r}"
    assert depth == 0


def test_empty_model_renders_valid_empty_digraph():
    out = render_static(StaticModel())
    assert_valid_dot(out)
    assert "->" not in out


def test_single_machine_flow_renders_cluster_boxes_edge():
    model = parse_or_raise(
        "machine A { create; process store; }\nflow A.create -> A.process;"
    ).model
    out = render_static(model)
    assert_valid_dot(out)
    assert out.count("subgraph") == 1
    assert '"A.create" [label="create"];' in out
    assert "shape=cylinder" in out  # storage stage
    assert '"A.create" -> "A.process";' in out


def test_triggers_render_dashed_with_guard():
    model = parse_or_raise(
        'machine A { process; }\nmachine B { create; }\ntrigger A.process => B.create if "go";'
    ).model
    out = render_static(model)
    assert 'style=dashed, label="go"' in out


def test_nested_machines_render_nested_clusters():
    model = parse_or_raise("machine A { create; machine B { process; } }").model
    out = render_static(model)
    assert 'subgraph "cluster_A"' in out
    assert 'subgraph "cluster_A.B"' in out


def test_highlight_marks_region_stages_and_edges():
    result = parse_or_raise(
        "machine A { create; process; }\nflow f1: A.create -> A.process;\n"
        'event E1 { time "t"; region { A.create A.process } }\n'
    )
    closed = eventize(result.model, result.events[0])
    out = render_static(result.model, closed.region)
    assert "style=filled" in out
    assert "penwidth=2.5" in out


def test_highlight_with_unknown_stage_raises():
    model = parse_or_raise("machine A { create; }").model
    with pytest.raises(UnknownStage):
        render_static(model, Region(frozenset({"ghost"})))


def test_empty_behavior_renders_valid_digraph():
    assert_valid_dot(render_behavior(BehavioralModel()))


def test_behavior_nodes_and_edges():
    result = parse_or_raise(
        "machine A { create; }\n"
        'event E1 : "one" { time "t1"; region { A.create } }\n'
        'event E2 { time "t2"; region { A.create } }\n'
        "behavior { E1 -> E2 excl \"grp\"; }\n"
    )
    out = render_behavior(result.behavior, result.events)
    assert_valid_dot(out)
    assert '"E1" [label="E1: one"];' in out
    assert '"E2" [label="E2"];' in out
    assert 'label="grp"' in out and "color=" in out


def test_rendering_is_pure():
    model = parse_or_raise("machine A { create; process; }\nflow A.create -> A.process;").model
    assert render_static(model) == render_static(model)


@settings(max_examples=60, deadline=None)
@given(documents(max_machines=3))
def test_generated_models_render_valid_dot(doc):
    model, events, behavior = doc
    assert_valid_dot(render_static(model))
    assert_valid_dot(render_behavior(behavior, events))
