"""Structural legality rules for machine models, events, and behavior graphs.

Rule codes are stable public identifiers:

    V1  global id uniqueness
    V2  intra-machine flow steps restricted to the legal adjacency table
    V3  inter-machine flows connect transfer stages only
    V4  trigger sources are create, process, or receive stages
    V5  at most one stage of each kind per machine
    V6  orphan stage (warning): no incident edge and no storage
    V7  constraint machines carry a process stage and a guarded out-trigger
    V8  event regions resolve and stay closed
    V9  behavior graphs reference declared events; cycles and unreachable
        events are warnings

V1 and V5 restate guarantees the constructors already enforce; they fire only
on models assembled without `StaticModel.build` (defense in depth).

The intra-machine adjacency table is a reading of the five-stage diagram, not
a set the source material enumerates, so `validate_static` accepts a custom
table.  In simplified mode (gate stages eliminated) V2/V3 relax to flows
between create/process stages.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from .model import (
    ActionKind,
    BehavioralModel,
    CORE_KINDS,
    Event,
    StaticModel,
    natural_key,
)

C, P, R, T, V = (
    ActionKind.CREATE,
    ActionKind.PROCESS,
    ActionKind.RELEASE,
    ActionKind.TRANSFER,
    ActionKind.RECEIVE,
)

#: Legal intra-machine flow steps: things enter through transfer/receive,
#: leave through release/transfer; create and process interchange freely.
LEGAL_INTRA_STEPS: frozenset[tuple[ActionKind, ActionKind]] = frozenset(
    {
        (T, V),
        (V, P),
        (V, R),
        (P, R),
        (P, C),
        (C, P),
        (C, R),
        (R, T),
    }
)

#: Allowed trigger origins.
TRIGGER_SOURCES = frozenset({C, P, V})


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    rule: str
    subject: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity.value.upper()} {self.rule} {self.subject}: {self.message}"


def _sorted(diags: list[Diagnostic]) -> list[Diagnostic]:
    return sorted(diags, key=lambda d: (natural_key(d.subject), d.rule, d.message))


def has_errors(diags: Sequence[Diagnostic]) -> bool:
    return any(d.severity is Severity.ERROR for d in diags)


def validate_static(
    model: StaticModel,
    *,
    mode: str = "full",
    intra_steps: Optional[frozenset[tuple[ActionKind, ActionKind]]] = None,
) -> list[Diagnostic]:
    """Check rules V1-V7.  `mode` is "full" or "simplified"."""
    if mode not in ("full", "simplified"):
        raise ValueError(f"unknown mode {mode!r}")
    steps = LEGAL_INTRA_STEPS if intra_steps is None else intra_steps
    diags: list[Diagnostic] = []

    def err(rule: str, subject: str, message: str) -> None:
        diags.append(Diagnostic(Severity.ERROR, rule, subject, message))

    def warn(rule: str, subject: str, message: str) -> None:
        diags.append(Diagnostic(Severity.WARNING, rule, subject, message))

    # V1 / V5
    seen: set[str] = set()
    for machine in model.all_machines():
        if machine.id in seen:
            err("V1", machine.id, "id declared more than once")
        seen.add(machine.id)
        per_kind: dict[ActionKind, int] = {}
        for stage in machine.stages:
            if stage.id in seen:
                err("V1", stage.id, "id declared more than once")
            seen.add(stage.id)
            per_kind[stage.kind] = per_kind.get(stage.kind, 0) + 1
        for kind, count in sorted(per_kind.items(), key=lambda kv: kv[0].value):
            if count > 1:
                err("V5", machine.id, f"{count} {kind.value} stages; at most one allowed")
    for edge in (*model.flows, *model.triggers):
        if edge.id in seen:
            err("V1", edge.id, "id declared more than once")
        seen.add(edge.id)

    stages = model.stages_by_id

    # V2 / V3
    for flow in model.flows:
        src = stages.get(flow.source)
        dst = stages.get(flow.target)
        if src is None or dst is None:
            err("V1", flow.id, "flow endpoint does not resolve")
            continue
        intra = src.owner == dst.owner
        if mode == "simplified":
            if src.kind not in CORE_KINDS or dst.kind not in CORE_KINDS:
                rule = "V2" if intra else "V3"
                err(
                    rule,
                    flow.id,
                    f"{src.kind.value} -> {dst.kind.value} is not between create/process stages",
                )
            continue
        if intra:
            if (src.kind, dst.kind) not in steps:
                err(
                    "V2",
                    flow.id,
                    f"illegal intra-machine step {src.kind.value} -> {dst.kind.value}",
                )
        elif not (src.kind is T and dst.kind is T):
            err(
                "V3",
                flow.id,
                f"inter-machine flow must be transfer -> transfer, got "
                f"{src.kind.value} -> {dst.kind.value}",
            )

    # V4
    for trig in model.triggers:
        src = stages.get(trig.source)
        if src is None:
            err("V1", trig.id, "trigger endpoint does not resolve")
            continue
        if src.kind not in TRIGGER_SOURCES:
            err("V4", trig.id, f"trigger cannot originate at a {src.kind.value} stage")

    # V6
    touched = set()
    for edge in (*model.flows, *model.triggers):
        touched.add(edge.source)
        touched.add(edge.target)
    for stage in model.all_stages():
        if stage.id not in touched and not stage.has_storage:
            warn("V6", stage.id, "stage has no incident flow, trigger, or storage")

    # V7
    for machine in model.all_machines():
        if not machine.is_constraint:
            continue
        process = machine.stage_of(P)
        if process is None:
            err("V7", machine.id, "constraint machine has no process stage")
        own = {s.id for s in machine.stages}
        guarded = [
            t for t in model.triggers if t.source in own and t.guard is not None
        ]
        if not guarded:
            err("V7", machine.id, "constraint machine has no outgoing guarded trigger")

    return _sorted(diags)


def validate_events(model: StaticModel, events: Sequence[Event]) -> list[Diagnostic]:
    """Check V8: regions resolve, stay closed, and carry a time."""
    diags: list[Diagnostic] = []
    seen: set[str] = set()
    for event in events:
        def err(message: str, *, _id=event.id) -> None:
            diags.append(Diagnostic(Severity.ERROR, "V8", _id, message))

        if event.id in seen:
            err("event id declared more than once")
        seen.add(event.id)
        if not event.time.strip():
            err("event has no time annotation")
        if not event.region.stage_ids:
            err("event region is empty")
        for sid in sorted(event.region.stage_ids, key=natural_key):
            if sid not in model.stages_by_id:
                err(f"region references unknown stage {sid!r}")
        for eid in sorted(event.region.edge_ids, key=natural_key):
            edge = model.flows_by_id.get(eid) or model.triggers_by_id.get(eid)
            if edge is None:
                err(f"region references unknown edge {eid!r}")
            elif not {edge.source, edge.target} <= event.region.stage_ids:
                err(f"region edge {eid!r} has an endpoint outside the region")
    return _sorted(diags)


def validate_behavior(
    model: StaticModel, events: Sequence[Event], behavior: BehavioralModel
) -> list[Diagnostic]:
    """Check V9: edges reference declared events; warn on cycles and on
    events unreachable from every source."""
    diags: list[Diagnostic] = []
    declared = {e.id for e in events}

    for eid in sorted(behavior.event_ids, key=natural_key):
        if eid not in declared:
            diags.append(
                Diagnostic(Severity.ERROR, "V9", eid, "behavior names an undeclared event")
            )
    adjacency: dict[str, list[str]] = {}
    for edge in behavior.edges:
        adjacency.setdefault(edge.source, []).append(edge.target)
        for end in (edge.source, edge.target):
            if end not in behavior.event_ids:
                diags.append(
                    Diagnostic(
                        Severity.ERROR,
                        "V9",
                        end,
                        f"edge {edge.source} -> {edge.target} references an undeclared event",
                    )
                )
        if edge.source == edge.target:
            diags.append(
                Diagnostic(Severity.ERROR, "V9", edge.source, "behavior edge loops on one event")
            )

    # cycle detection (iterative DFS, deterministic order)
    color: dict[str, int] = {}
    on_cycle: set[str] = set()

    def visit(start: str) -> None:
        stack = [(start, iter(sorted(adjacency.get(start, ()), key=natural_key)))]
        color[start] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if color.get(nxt, 0) == 0:
                    color[nxt] = 1
                    stack.append((nxt, iter(sorted(adjacency.get(nxt, ()), key=natural_key))))
                    advanced = True
                    break
                if color.get(nxt) == 1:
                    on_cycle.add(nxt)  # back edge: nxt is still on the stack
            if not advanced:
                color[node] = 2
                stack.pop()

    for eid in sorted(behavior.event_ids, key=natural_key):
        if color.get(eid, 0) == 0:
            visit(eid)
    for eid in sorted(on_cycle, key=natural_key):
        diags.append(Diagnostic(Severity.WARNING, "V9", eid, "event lies on a cycle"))

    # reachability from source events
    sources = behavior.sources()
    reached = set(sources)
    frontier = sorted(sources, key=natural_key)
    while frontier:
        nxt: list[str] = []
        for node in frontier:
            for succ in adjacency.get(node, ()):
                if succ not in reached:
                    reached.add(succ)
                    nxt.append(succ)
        frontier = sorted(nxt, key=natural_key)
    for eid in sorted(behavior.event_ids - reached, key=natural_key):
        diags.append(
            Diagnostic(Severity.WARNING, "V9", eid, "event is unreachable from any source event")
        )
    return _sorted(diags)


def validate_document(
    model: StaticModel,
    events: Sequence[Event] = (),
    behavior: Optional[BehavioralModel] = None,
    *,
    mode: str = "full",
) -> list[Diagnostic]:
    """Run the full rule set over a parsed document."""
    diags = validate_static(model, mode=mode)
    diags.extend(validate_events(model, events))
    if behavior is not None:
        diags.extend(validate_behavior(model, events, behavior))
    return diags
