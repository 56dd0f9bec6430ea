"""Canonical JSON interchange for model documents.

The document object carries ``machines`` (nested), ``flows``, ``triggers``,
``events``, and ``behavior`` with the same field names as the domain types.
Keys serialize alphabetically and lists sort by id, so byte output is stable.
"""

from __future__ import annotations

import json
from typing import Optional, Sequence

from .model import (
    ActionKind,
    BehavioralModel,
    BehaviorEdge,
    Event,
    Flow,
    Machine,
    Region,
    Stage,
    StaticModel,
    TmError,
    Trigger,
    natural_key,
)


class JsonFormatError(TmError):
    pass


def _machine_dict(machine: Machine) -> dict:
    return {
        "id": machine.id,
        "name": machine.name,
        "is_constraint": machine.is_constraint,
        "parent": machine.parent,
        "stages": [
            {
                "id": s.id,
                "kind": s.kind.value,
                "has_storage": s.has_storage,
                "label": s.label,
                "owner": s.owner,
            }
            for s in sorted(machine.stages, key=lambda s: natural_key(s.id))
        ],
        "submachines": [
            _machine_dict(sub)
            for sub in sorted(machine.submachines, key=lambda m: natural_key(m.id))
        ],
    }


def document_to_json(
    model: Optional[StaticModel],
    events: Sequence[Event] = (),
    behavior: Optional[BehavioralModel] = None,
) -> str:
    model = model or StaticModel()
    behavior = behavior or BehavioralModel()
    doc = {
        "machines": [
            _machine_dict(m) for m in sorted(model.machines, key=lambda m: natural_key(m.id))
        ],
        "flows": [
            {"id": f.id, "source": f.source, "target": f.target}
            for f in sorted(model.flows, key=lambda f: natural_key(f.id))
        ],
        "triggers": [
            {"id": t.id, "source": t.source, "target": t.target, "guard": t.guard}
            for t in sorted(model.triggers, key=lambda t: natural_key(t.id))
        ],
        "events": [
            {
                "id": e.id,
                "name": e.name,
                "time": e.time,
                "region": {
                    "stage_ids": sorted(e.region.stage_ids, key=natural_key),
                    "edge_ids": sorted(e.region.edge_ids, key=natural_key),
                },
                "intensity": e.intensity,
            }
            for e in sorted(events, key=lambda e: natural_key(e.id))
        ],
        "behavior": {
            "event_ids": sorted(behavior.event_ids, key=natural_key),
            "edges": [
                {"from": e.source, "to": e.target, "exclusive_group": e.exclusive_group}
                for e in behavior.edges
            ],
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _opt_str(value, what: str) -> Optional[str]:
    if value is None:
        return None
    if not isinstance(value, str):
        raise JsonFormatError(f"{what} must be a string or null, got {value!r}")
    return value


def _machine_from(raw: dict) -> Machine:
    try:
        stages = tuple(
            Stage(
                id=str(s["id"]),
                kind=ActionKind(str(s["kind"])),
                owner=str(s["owner"]),
                has_storage=bool(s.get("has_storage", False)),
                label=_opt_str(s.get("label"), "stage label"),
            )
            for s in raw.get("stages", ())
        )
        subs = tuple(_machine_from(sub) for sub in raw.get("submachines", ()))
        return Machine(
            id=str(raw["id"]),
            name=str(raw.get("name", raw["id"])),
            is_constraint=bool(raw.get("is_constraint", False)),
            stages=stages,
            submachines=subs,
            parent=_opt_str(raw.get("parent"), "parent"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise JsonFormatError(f"bad machine entry: {exc}") from exc


def document_from_json(
    text: str,
) -> tuple[StaticModel, tuple[Event, ...], BehavioralModel]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise JsonFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise JsonFormatError("expected a JSON object")
    try:
        machines = tuple(_machine_from(m) for m in doc.get("machines", ()))
        flows = tuple(
            Flow(str(f["id"]), str(f["source"]), str(f["target"]))
            for f in doc.get("flows", ())
        )
        triggers = tuple(
            Trigger(
                str(t["id"]),
                str(t["source"]),
                str(t["target"]),
                _opt_str(t.get("guard"), "guard"),
            )
            for t in doc.get("triggers", ())
        )
        events = tuple(
            Event(
                id=str(e["id"]),
                name=str(e.get("name", e["id"])),
                time=str(e["time"]),
                region=Region(
                    frozenset(str(s) for s in e["region"]["stage_ids"]),
                    frozenset(str(x) for x in e["region"].get("edge_ids", ())),
                ),
                intensity=_opt_str(e.get("intensity"), "intensity"),
            )
            for e in doc.get("events", ())
        )
        raw_behavior = doc.get("behavior", {})
        behavior = BehavioralModel.build(
            [str(x) for x in raw_behavior.get("event_ids", ())],
            [
                BehaviorEdge(
                    str(e["from"]),
                    str(e["to"]),
                    _opt_str(e.get("exclusive_group"), "exclusive_group"),
                )
                for e in raw_behavior.get("edges", ())
            ],
        )
    except (KeyError, TypeError) as exc:
        raise JsonFormatError(f"malformed document: {exc}") from exc
    try:
        model = StaticModel.build(machines, flows, triggers)
    except TmError as exc:
        raise JsonFormatError(str(exc)) from exc
    events = tuple(sorted(events, key=lambda e: natural_key(e.id)))
    return model, events, behavior
