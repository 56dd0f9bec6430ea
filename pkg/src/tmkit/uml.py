"""Bridge between a UML activity-diagram subset and machine models.

Supported node kinds: Initial, Final, Action, Decision, Merge.  Import turns
each action into a machine with a process stage, the initial node into a
create stage inside its successor's machine, control edges into direct
process-to-process flows (simplified form), decisions into guarded triggers,
and erases merge/final nodes.  Export reverses the construction; merge and
final nodes are synthesized back at fan-ins and chain ends.

Round-trips are exact on the strict subset the import targets: one initial
feeding one action, one final whose incoming edges are their actions' only
out-edges, every fan-in routed through a merge, at most one decision hanging
off an action, decision successors are actions or merges.  Export also
accepts looser models (machines holding only a create stage become actions;
unguarded triggers export as control edges); those rules go beyond the
round-trip contract and are interpretation.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .model import (
    ActionKind,
    Flow,
    GATE_KINDS,
    Machine,
    Stage,
    StaticModel,
    TmError,
    Trigger,
    natural_key,
)
from .dsl import RESERVED
from .transform import NotSimplified

NODE_KINDS = ("Initial", "Final", "Action", "Decision", "Merge")


class ActivityError(TmError):
    pass


class UnsupportedConstruct(ActivityError):
    """A node kind or shape outside the supported subset."""


class MalformedDecision(ActivityError):
    """A decision out-edge is missing its guard."""


class AmbiguousInitial(ActivityError):
    """Zero or several machines qualify as the initial node."""

    def __init__(self, candidates: Iterable[str]):
        self.candidates = tuple(sorted(candidates, key=natural_key))
        listing = ", ".join(self.candidates) or "<none>"
        super().__init__(f"initial machine candidates: {listing}")


@dataclass(frozen=True)
class ActivityNode:
    id: str
    kind: str
    label: str = ""


@dataclass(frozen=True)
class ActivityEdge:
    source: str
    target: str
    guard: Optional[str] = None


@dataclass(frozen=True)
class ActivityGraph:
    nodes: tuple[ActivityNode, ...] = ()
    edges: tuple[ActivityEdge, ...] = ()

    @classmethod
    def build(
        cls, nodes: Sequence[ActivityNode], edges: Sequence[ActivityEdge]
    ) -> "ActivityGraph":
        by_id: dict[str, ActivityNode] = {}
        for node in nodes:
            if node.kind not in NODE_KINDS:
                raise UnsupportedConstruct(f"node {node.id!r} has kind {node.kind!r}")
            if node.id in by_id:
                raise ActivityError(f"duplicate node id {node.id!r}")
            by_id[node.id] = node
        out_deg: dict[str, int] = {}
        in_deg: dict[str, int] = {}
        for edge in edges:
            for end in (edge.source, edge.target):
                if end not in by_id:
                    raise ActivityError(f"edge endpoint {end!r} does not resolve")
            out_deg[edge.source] = out_deg.get(edge.source, 0) + 1
            in_deg[edge.target] = in_deg.get(edge.target, 0) + 1
            if by_id[edge.source].kind == "Decision" and edge.guard is None:
                raise MalformedDecision(
                    f"decision {edge.source!r} has an unguarded edge to {edge.target!r}"
                )
        initials = [n for n in nodes if n.kind == "Initial"]
        if len(initials) != 1:
            raise ActivityError(f"exactly one initial node required, found {len(initials)}")
        if not any(n.kind == "Final" for n in nodes):
            raise ActivityError("at least one final node required")
        for node in nodes:
            if node.kind == "Decision" and out_deg.get(node.id, 0) < 2:
                raise ActivityError(f"decision {node.id!r} needs at least two outgoing edges")
            if node.kind == "Merge" and in_deg.get(node.id, 0) < 2:
                raise ActivityError(f"merge {node.id!r} needs at least two incoming edges")
        return cls(nodes=tuple(nodes), edges=tuple(edges))

    def node(self, node_id: str) -> ActivityNode:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise ActivityError(f"no node {node_id!r}")

    def out_edges(self, node_id: str) -> list[ActivityEdge]:
        return [e for e in self.edges if e.source == node_id]

    def in_edges(self, node_id: str) -> list[ActivityEdge]:
        return [e for e in self.edges if e.target == node_id]


# -- JSON interchange (.act.json) ----------------------------------------------


def activity_to_json(graph: ActivityGraph) -> str:
    doc = {
        "nodes": [
            {"id": n.id, "kind": n.kind, "label": n.label}
            for n in sorted(graph.nodes, key=lambda n: natural_key(n.id))
        ],
        "edges": [
            {"from": e.source, "to": e.target, "guard": e.guard}
            for e in sorted(
                graph.edges, key=lambda e: (natural_key(e.source), natural_key(e.target))
            )
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def activity_from_json(text: str) -> ActivityGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ActivityError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "nodes" not in doc or "edges" not in doc:
        raise ActivityError("expected an object with 'nodes' and 'edges'")
    nodes = []
    for raw in doc["nodes"]:
        try:
            nodes.append(ActivityNode(str(raw["id"]), str(raw["kind"]), str(raw.get("label", ""))))
        except (TypeError, KeyError) as exc:
            raise ActivityError(f"bad node entry {raw!r}") from exc
    edges = []
    for raw in doc["edges"]:
        try:
            guard = raw.get("guard")
            edges.append(
                ActivityEdge(str(raw["from"]), str(raw["to"]), None if guard is None else str(guard))
            )
        except (TypeError, KeyError) as exc:
            raise ActivityError(f"bad edge entry {raw!r}") from exc
    return ActivityGraph.build(nodes, edges)


# -- import --------------------------------------------------------------------

_CAMEL_STRIP = re.compile(r"[^A-Za-z0-9]+")


def _machine_token(label: str, taken: set[str]) -> str:
    words = [w for w in _CAMEL_STRIP.split(label) if w]
    base = "".join(w[:1].upper() + w[1:] for w in words) or "Step"
    if not base[0].isalpha():
        base = "M" + base
    if base in RESERVED:
        base += "Machine"
    token = base
    suffix = 2
    while token in taken:
        token = f"{base}{suffix}"
        suffix += 1
    taken.add(token)
    return token


def import_activity(graph: ActivityGraph) -> StaticModel:
    """Deterministic mapping into a simplified-form model.

    Apply `transform.expand` afterwards for the full five-stage form.
    """
    graph = ActivityGraph.build(graph.nodes, graph.edges)  # revalidate invariants

    # merges vanish: route their in-edges straight to the merge's successor
    resolved: dict[str, str] = {}

    def resolve(node_id: str, trail: tuple[str, ...] = ()) -> str:
        node = graph.node(node_id)
        if node.kind != "Merge":
            return node_id
        if node_id in trail:
            raise UnsupportedConstruct(f"merge {node_id!r} feeds itself")
        if node_id not in resolved:
            outs = graph.out_edges(node_id)
            if len(outs) != 1:
                raise UnsupportedConstruct(f"merge {node_id!r} needs exactly one successor")
            resolved[node_id] = resolve(outs[0].target, trail + (node_id,))
        return resolved[node_id]

    actions = [n for n in graph.nodes if n.kind == "Action"]
    taken: set[str] = set()
    tokens = {n.id: _machine_token(n.label, taken) for n in actions}

    initial = next(n for n in graph.nodes if n.kind == "Initial")
    initial_outs = graph.out_edges(initial.id)
    if len(initial_outs) != 1 or initial_outs[0].guard is not None:
        raise UnsupportedConstruct(f"initial {initial.id!r} needs one unguarded out-edge")
    entry_id = resolve(initial_outs[0].target)
    if graph.node(entry_id).kind != "Action":
        raise UnsupportedConstruct(f"initial {initial.id!r} must lead to an action")

    machines = []
    for node in actions:
        token = tokens[node.id]
        stages = [Stage(f"{token}.process", ActionKind.PROCESS, token)]
        if node.id == entry_id:
            stages.insert(0, Stage(f"{token}.create", ActionKind.CREATE, token))
        machines.append(Machine(id=token, name=node.label, stages=tuple(stages)))
    machines.sort(key=lambda m: natural_key(m.id))

    flows: list[Flow] = []
    triggers: list[Trigger] = []
    flow_n = 0
    trig_n = 0

    def add_flow(src: str, dst: str) -> None:
        nonlocal flow_n
        if any(f.source == src and f.target == dst for f in flows):
            return
        flow_n += 1
        flows.append(Flow(f"f{flow_n}", src, dst))

    if entry_id is not None:
        token = tokens[entry_id]
        add_flow(f"{token}.create", f"{token}.process")

    ordered_nodes = sorted(graph.nodes, key=lambda n: natural_key(n.id))
    for node in ordered_nodes:
        if node.kind == "Action":
            src = f"{tokens[node.id]}.process"
            for edge in graph.out_edges(node.id):
                succ = graph.node(resolve(edge.target))
                if succ.kind == "Final":
                    continue
                if succ.kind == "Decision":
                    if edge.guard is not None:
                        raise UnsupportedConstruct(
                            f"edge from {node.id!r} into decision {succ.id!r} carries a guard"
                        )
                    continue  # handled by the decision itself
                if succ.kind != "Action":
                    raise UnsupportedConstruct(
                        f"edge from {node.id!r} reaches unsupported {succ.kind} node {succ.id!r}"
                    )
                dst = f"{tokens[succ.id]}.process"
                if edge.guard is not None:
                    trig_n += 1
                    triggers.append(Trigger(f"t{trig_n}", src, dst, edge.guard))
                else:
                    add_flow(src, dst)
        elif node.kind == "Decision":
            ins = graph.in_edges(node.id)
            if len(ins) != 1 or graph.node(ins[0].source).kind != "Action":
                raise UnsupportedConstruct(
                    f"decision {node.id!r} needs exactly one incoming edge from an action"
                )
            src = f"{tokens[ins[0].source]}.process"
            for edge in sorted(
                graph.out_edges(node.id), key=lambda e: (e.guard or "", natural_key(e.target))
            ):
                if edge.guard is None:
                    raise MalformedDecision(
                        f"decision {node.id!r} has an unguarded edge to {edge.target!r}"
                    )
                succ = graph.node(resolve(edge.target))
                if succ.kind != "Action":
                    raise UnsupportedConstruct(
                        f"decision {node.id!r} targets unsupported {succ.kind} node {succ.id!r}"
                    )
                trig_n += 1
                triggers.append(Trigger(f"t{trig_n}", src, f"{tokens[succ.id]}.process", edge.guard))

    return StaticModel.build(machines, flows, triggers)


# -- export --------------------------------------------------------------------


def export_activity(model: StaticModel) -> ActivityGraph:
    """Rebuild an activity graph from a simplified model."""
    gates = sorted((s.id for s in model.all_stages() if s.kind in GATE_KINDS), key=natural_key)
    if gates:
        raise NotSimplified("model still contains gate stages: " + ", ".join(gates))
    for machine in model.all_machines():
        if sum(1 for s in machine.stages if s.kind is ActionKind.PROCESS) > 1:
            raise ActivityError(f"machine {machine.id!r} has several process stages")

    acting = [m for m in model.all_machines() if m.stages]
    acting.sort(key=lambda m: natural_key(m.id))
    action_ids = {m.id: f"a_{m.id}" for m in acting}
    stage_machine = {s.id: m.id for m in acting for s in m.stages}

    candidates = [
        m.id
        for m in acting
        if (create := m.stage_of(ActionKind.CREATE)) is not None
        and not model.flows_into.get(create.id)
        and not model.triggers_into.get(create.id)
    ]
    if len(candidates) != 1:
        raise AmbiguousInitial(candidates)
    initial_machine = candidates[0]

    nodes = [ActivityNode("initial", "Initial")]
    for m in acting:
        nodes.append(ActivityNode(action_ids[m.id], "Action", m.name))
    edges: list[ActivityEdge] = [ActivityEdge("initial", action_ids[initial_machine])]

    decision_n = 0
    for machine in acting:
        src_action = action_ids[machine.id]
        out_flows = [
            f
            for s in machine.stages
            for f in model.flows_from.get(s.id, ())
            if stage_machine[f.target] != machine.id
        ]
        out_flows.sort(key=lambda f: natural_key(f.id))
        for flow in out_flows:
            edges.append(ActivityEdge(src_action, action_ids[stage_machine[flow.target]]))
        plain = []
        guarded = []
        for stage in machine.stages:
            for trig in model.triggers_from.get(stage.id, ()):
                (guarded if trig.guard is not None else plain).append(trig)
        plain.sort(key=lambda t: natural_key(t.id))
        guarded.sort(key=lambda t: natural_key(t.id))
        for trig in plain:
            edges.append(ActivityEdge(src_action, action_ids[stage_machine[trig.target]]))
        if len(guarded) == 1:
            trig = guarded[0]
            edges.append(
                ActivityEdge(src_action, action_ids[stage_machine[trig.target]], trig.guard)
            )
        elif len(guarded) > 1:
            decision_n += 1
            decision_id = f"d{decision_n}"
            nodes.append(ActivityNode(decision_id, "Decision"))
            edges.append(ActivityEdge(src_action, decision_id))
            for trig in guarded:
                edges.append(
                    ActivityEdge(decision_id, action_ids[stage_machine[trig.target]], trig.guard)
                )

    # synthesize merges at fan-ins (the initial edge stands for the internal
    # create->process flow and stays direct)
    merge_n = 0
    final_edges: list[ActivityEdge] = []
    rebuilt: list[ActivityEdge] = []
    by_target: dict[str, list[ActivityEdge]] = {}
    for edge in edges:
        if edge.source == "initial":
            rebuilt.append(edge)
        else:
            by_target.setdefault(edge.target, []).append(edge)
    merge_nodes: list[ActivityNode] = []
    for target in sorted(by_target, key=natural_key):
        incoming = by_target[target]
        if len(incoming) >= 2:
            merge_n += 1
            merge_id = f"m{merge_n}"
            merge_nodes.append(ActivityNode(merge_id, "Merge"))
            rebuilt.extend(ActivityEdge(e.source, merge_id, e.guard) for e in incoming)
            rebuilt.append(ActivityEdge(merge_id, target))
        else:
            rebuilt.extend(incoming)
    nodes.extend(merge_nodes)

    # terminal actions close on one synthesized final node
    has_out = {e.source for e in rebuilt}
    terminals = [
        action_ids[m.id] for m in acting if action_ids[m.id] not in has_out
    ]
    if terminals:
        nodes.append(ActivityNode("final", "Final"))
        final_edges = [ActivityEdge(t, "final") for t in sorted(terminals, key=natural_key)]
    return ActivityGraph.build(tuple(nodes), tuple(rebuilt + final_edges))


# -- structural comparison -------------------------------------------------------


def activity_isomorphic(a: ActivityGraph, b: ActivityGraph) -> bool:
    """True iff a node bijection preserves kinds, labels, edges, and guards."""
    if len(a.nodes) != len(b.nodes) or len(a.edges) != len(b.edges):
        return False

    def groups(g: ActivityGraph) -> dict[tuple, list[str]]:
        out: dict[tuple, list[str]] = {}
        for n in g.nodes:
            key = (
                n.kind,
                n.label,
                len(g.out_edges(n.id)),
                len(g.in_edges(n.id)),
                tuple(sorted(e.guard or "" for e in g.out_edges(n.id))),
                tuple(sorted(e.guard or "" for e in g.in_edges(n.id))),
            )
            out.setdefault(key, []).append(n.id)
        return out

    ga, gb = groups(a), groups(b)
    if set(ga) != set(gb) or any(len(ga[k]) != len(gb[k]) for k in ga):
        return False

    b_edges = {(e.source, e.target, e.guard or "") for e in b.edges}
    order = sorted(ga, key=lambda k: len(ga[k]))
    slots = [(key, aid) for key in order for aid in ga[key]]
    mapping: dict[str, str] = {}
    used: set[str] = set()

    def consistent(aid: str, bid: str) -> bool:
        for e in a.edges:
            if e.source == aid and e.target in mapping:
                if (bid, mapping[e.target], e.guard or "") not in b_edges:
                    return False
            if e.target == aid and e.source in mapping:
                if (mapping[e.source], bid, e.guard or "") not in b_edges:
                    return False
        return True

    def assign(i: int) -> bool:
        if i == len(slots):
            mapped = {(mapping[e.source], mapping[e.target], e.guard or "") for e in a.edges}
            return mapped == b_edges
        key, aid = slots[i]
        for bid in gb[key]:
            if bid in used or not consistent(aid, bid):
                continue
            mapping[aid] = bid
            used.add(bid)
            if assign(i + 1):
                return True
            used.discard(bid)
            del mapping[aid]
        return False

    return assign(0)
